// Section filter: a conv/dense network over stacked word vectors that decides
// whether a sentence (via its enclosing paragraph) belongs to the
// Experimental/Methodology section.
#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "arix/corpus.hpp"
#include "arix/embedding.hpp"
#include "arix/errors.hpp"
#include "arix/nn.hpp"
#include "arix/tokenize.hpp"

namespace arix {

struct ParagraphTensor {
  nn::Tensor values;  // L x D, zero-padded/truncated
  int label = 0;      // 1 = Experimental/Methodology
  std::vector<std::int64_t> source_doc_ids;
};

struct SectionFilterModel {
  nn::Network network;
  std::size_t input_length = 0;  // L
  std::size_t embedding_dim = 0;
  std::uint64_t embedding_hash = 0;
  double threshold = 0.5;
  std::vector<double> epoch_loss;  // mean BCE per training epoch
};

struct SectionFilterHyperParams {
  // layer setup: conv filters 100/200 with kernels 3/5, dense 500/100/10/1,
  // dropout 0.2 on the first three dense layers, ELU + final sigmoid
  std::size_t filters1 = 100;
  std::size_t filters2 = 200;
  std::size_t kernel1 = 3;
  std::size_t kernel2 = 5;
  std::vector<std::size_t> dense_sizes = {500, 100, 10, 1};
  double dropout = 0.2;
  std::size_t epochs = 30;
  double learning_rate = 0.01;
  std::uint64_t seed = 1;
};

inline std::vector<nn::LayerSpec> section_filter_layers(std::size_t embedding_dim,
                                                        const SectionFilterHyperParams& hp) {
  if (hp.dense_sizes.size() != 4 || hp.dense_sizes.back() != 1)
    throw SpecError("section filter needs four dense layers ending in one unit");
  std::vector<nn::LayerSpec> specs;
  specs.push_back(nn::conv1d(embedding_dim, hp.filters1, hp.kernel1, nn::Activation::elu));
  specs.push_back(nn::conv1d(hp.filters1, hp.filters2, hp.kernel2, nn::Activation::elu));
  specs.push_back(nn::global_max_pool());
  specs.push_back(nn::dense(hp.filters2, hp.dense_sizes[0], nn::Activation::elu, hp.dropout));
  specs.push_back(nn::dense(hp.dense_sizes[0], hp.dense_sizes[1], nn::Activation::elu, hp.dropout));
  specs.push_back(nn::dense(hp.dense_sizes[1], hp.dense_sizes[2], nn::Activation::elu, hp.dropout));
  specs.push_back(nn::dense(hp.dense_sizes[2], hp.dense_sizes[3], nn::Activation::sigmoid));
  return specs;
}

// Stacks the word vectors of a paragraph's tokens in order, padded or
// truncated to L rows. OOV tokens have no vector and are skipped.
inline ParagraphTensor assemble_tensor(const std::vector<Document>& docs,
                                       const EmbeddingMatrix& emb, const Vocabulary& vocab,
                                       std::size_t L) {
  if (L == 0) throw ConfigError("paragraph tensor length must be > 0");
  ParagraphTensor pt;
  pt.values = nn::Tensor(L, emb.D);
  std::size_t row = 0;
  bool experimental = false;
  for (const auto& d : docs) {
    if (d.section == Section::Methodology) experimental = true;
    pt.source_doc_ids.push_back(d.doc_id);
    if (row >= L) continue;
    for (auto& t : tokenize(d.text)) {
      if (row >= L) break;
      auto it = vocab.index.find(t);
      if (it == vocab.index.end()) continue;
      const double* v = emb.row(it->second);
      std::copy(v, v + emb.D, pt.values.data.begin() + row * emb.D);
      ++row;
    }
  }
  pt.label = experimental ? 1 : 0;
  return pt;
}

// Groups consecutive same-section sentences of one article into paragraphs.
inline std::vector<std::vector<Document>> group_paragraphs(const std::vector<Document>& docs,
                                                           std::size_t max_sentences = 8) {
  std::vector<std::vector<Document>> out;
  for (const auto& d : docs) {
    const bool fresh = out.empty() || out.back().back().article_id != d.article_id ||
                       out.back().back().section != d.section ||
                       out.back().size() >= max_sentences;
    if (fresh) out.emplace_back();
    out.back().push_back(d);
  }
  return out;
}

inline SectionFilterModel train_section_filter(const std::vector<ParagraphTensor>& tensors,
                                               const SectionFilterHyperParams& hp,
                                               std::size_t input_length, std::size_t embedding_dim,
                                               std::uint64_t embedding_hash) {
  std::size_t pos = 0, neg = 0;
  for (const auto& t : tensors) (t.label ? pos : neg)++;
  if (pos == 0 || neg == 0)
    throw SingleClassError("training set must contain both classes");

  std::mt19937_64 rng(hp.seed);

  // downsample the majority class to a 1:1 ratio
  std::vector<std::size_t> pos_idx, neg_idx;
  for (std::size_t i = 0; i < tensors.size(); ++i)
    (tensors[i].label ? pos_idx : neg_idx).push_back(i);
  auto& majority = pos_idx.size() > neg_idx.size() ? pos_idx : neg_idx;
  const std::size_t keep = std::min(pos_idx.size(), neg_idx.size());
  std::shuffle(majority.begin(), majority.end(), rng);
  majority.resize(keep);
  std::vector<std::size_t> order;
  order.insert(order.end(), pos_idx.begin(), pos_idx.end());
  order.insert(order.end(), neg_idx.begin(), neg_idx.end());
  std::sort(order.begin(), order.end());

  SectionFilterModel model;
  model.network = nn::init_network(section_filter_layers(embedding_dim, hp), hp.seed);
  model.input_length = input_length;
  model.embedding_dim = embedding_dim;
  model.embedding_hash = embedding_hash;

  for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (auto i : order) {
      auto fp = nn::forward_cached(model.network, tensors[i].values, true, &rng);
      loss_sum += nn::loss_bce(fp.output().data[0], tensors[i].label);
      auto grads = nn::backward_bce(model.network, fp, tensors[i].label);
      nn::sgd_step(model.network, grads, hp.learning_rate);
    }
    model.epoch_loss.push_back(loss_sum / static_cast<double>(order.size()));
  }
  return model;
}

inline double predict_section(const ParagraphTensor& tensor, const SectionFilterModel& model) {
  if (tensor.values.rows != model.input_length || tensor.values.cols != model.embedding_dim)
    throw ShapeError("paragraph tensor does not match the model geometry");
  return nn::forward(model.network, tensor.values, false).data[0];
}

inline double predict_section(const std::vector<Document>& paragraph,
                              const SectionFilterModel& model, const EmbeddingMatrix& emb,
                              const Vocabulary& vocab) {
  if (embedding_hash(emb) != model.embedding_hash)
    throw EmbeddingMismatchError("embedding does not match the trained section filter");
  return predict_section(assemble_tensor(paragraph, emb, vocab, model.input_length), model);
}

// ---------------------------------------------------------------------------
// persistence: neuralnet model format plus geometry metadata

inline void save_section_filter(const SectionFilterModel& m, const std::string& path) {
  nlohmann::json j = nn::network_to_json(m.network);
  j["format"] = "arix-section-filter";
  j["input_length"] = m.input_length;
  j["embedding_dim"] = m.embedding_dim;
  j["embedding_hash"] = m.embedding_hash;
  j["threshold"] = m.threshold;
  j["epoch_loss"] = m.epoch_loss;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump() << '\n';
}

inline SectionFilterModel load_section_filter(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  nlohmann::json j;
  in >> j;
  if (j.value("format", "") != "arix-section-filter")
    throw IoError("not an arix section-filter file");
  SectionFilterModel m;
  j["format"] = "arix-network";  // reuse the network reader
  m.network = nn::network_from_json(j);
  m.input_length = j.at("input_length").get<std::size_t>();
  m.embedding_dim = j.at("embedding_dim").get<std::size_t>();
  m.embedding_hash = j.at("embedding_hash").get<std::uint64_t>();
  m.threshold = j.at("threshold").get<double>();
  m.epoch_loss = j.at("epoch_loss").get<std::vector<double>>();
  return m;
}

}  // namespace arix
