// CBOW word embeddings: a single hidden-layer network (M -> D -> M) trained
// with softmax cross-entropy over sentence chunks; the input-to-hidden weight
// rows are the word vectors.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "arix/corpus.hpp"
#include "arix/errors.hpp"
#include "arix/hash.hpp"
#include "arix/matrix.hpp"
#include "arix/tokenize.hpp"

namespace arix {

struct EmbeddingMatrix {
  std::size_t M = 0;
  std::size_t D = 0;
  std::uint64_t vocab_hash = 0;
  std::vector<double> vectors;  // row-major M x D

  const double* row(std::size_t token_id) const { return vectors.data() + token_id * D; }
  double* row(std::size_t token_id) { return vectors.data() + token_id * D; }
};

struct CbowParams {
  std::size_t D = 100;
  std::size_t chunk_min = 3;
  std::size_t chunk_max = 6;
  std::size_t epochs = 5;
  double learning_rate = 0.025;
  std::uint64_t seed = 1;
};

inline std::uint64_t embedding_hash(const EmbeddingMatrix& emb) {
  std::uint64_t h = kFnvOffset;
  h = fnv1a_u64(emb.M, h);
  h = fnv1a_u64(emb.D, h);
  h = fnv1a_u64(emb.vocab_hash, h);
  for (double v : emb.vectors) h = fnv1a_double(v, h);
  return h;
}

inline EmbeddingMatrix train_cbow(const Corpus& corpus, const Vocabulary& vocab,
                                  const CbowParams& params) {
  if (corpus.N == 0) throw EmptyCorpusError("cannot train embeddings on empty corpus");
  if (vocab.M == 0) throw VocabMismatchError("vocabulary is empty");
  if (params.D < 2) throw ConfigError("embedding dimension must be >= 2");
  if (params.chunk_min < 2 || params.chunk_max < params.chunk_min)
    throw ConfigError("invalid chunk range");

  const std::size_t M = vocab.M, D = params.D;
  EmbeddingMatrix emb;
  emb.M = M;
  emb.D = D;
  emb.vocab_hash = vocab_hash(vocab);

  std::mt19937_64 rng(params.seed);
  // conventional word2vec init: input rows uniform in [-0.5/D, 0.5/D], output zero
  emb.vectors.resize(M * D);
  std::uniform_real_distribution<double> uni(-0.5 / D, 0.5 / D);
  for (auto& v : emb.vectors) v = uni(rng);
  std::vector<double> w_out(D * M, 0.0);  // hidden -> output, row-major D x M

  // pre-tokenize to vocab ids
  std::vector<std::vector<std::size_t>> sentences;
  sentences.reserve(corpus.N);
  std::size_t total_positions = 0;
  for (const auto& d : corpus.documents) {
    std::vector<std::size_t> ids;
    for (auto& t : tokenize(d.text)) {
      auto it = vocab.index.find(t);
      if (it != vocab.index.end()) ids.push_back(it->second);
    }
    total_positions += ids.size();
    sentences.push_back(std::move(ids));
  }

  const double total_steps =
      std::max<double>(1.0, static_cast<double>(total_positions * params.epochs));
  double processed = 0.0;

  std::uniform_int_distribution<std::size_t> chunk_len(params.chunk_min, params.chunk_max);
  std::vector<double> hidden(D), grad_hidden(D), probs(M);

  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    for (const auto& sent : sentences) {
      for (std::size_t pos = 0; pos < sent.size(); ++pos) {
        processed += 1.0;
        std::size_t len = chunk_len(rng);
        if (pos + len > sent.size()) continue;  // window must fit
        const std::size_t center = pos + len / 2;
        const double lr =
            params.learning_rate * std::max(1e-4, 1.0 - processed / total_steps);

        // hidden = mean of context vectors
        std::fill(hidden.begin(), hidden.end(), 0.0);
        const double ctx_n = static_cast<double>(len - 1);
        for (std::size_t k = pos; k < pos + len; ++k) {
          if (k == center) continue;
          const double* r = emb.row(sent[k]);
          for (std::size_t j = 0; j < D; ++j) hidden[j] += r[j];
        }
        for (std::size_t j = 0; j < D; ++j) hidden[j] /= ctx_n;

        // softmax over output layer
        double max_logit = -1e300;
        for (std::size_t m = 0; m < M; ++m) {
          double s = 0.0;
          for (std::size_t j = 0; j < D; ++j) s += hidden[j] * w_out[j * M + m];
          probs[m] = s;
          max_logit = std::max(max_logit, s);
        }
        double z = 0.0;
        for (std::size_t m = 0; m < M; ++m) {
          probs[m] = std::exp(probs[m] - max_logit);
          z += probs[m];
        }
        for (std::size_t m = 0; m < M; ++m) probs[m] /= z;

        // cross-entropy gradient: e = p - onehot(center)
        probs[sent[center]] -= 1.0;

        // grad wrt hidden, then update output weights (rank-1)
        for (std::size_t j = 0; j < D; ++j) {
          double s = 0.0;
          const double* wo = w_out.data() + j * M;
          for (std::size_t m = 0; m < M; ++m) s += wo[m] * probs[m];
          grad_hidden[j] = s;
        }
        for (std::size_t j = 0; j < D; ++j) {
          double* wo = w_out.data() + j * M;
          const double hj = lr * hidden[j];
          for (std::size_t m = 0; m < M; ++m) wo[m] -= hj * probs[m];
        }

        // update context rows
        for (std::size_t k = pos; k < pos + len; ++k) {
          if (k == center) continue;
          double* r = emb.row(sent[k]);
          for (std::size_t j = 0; j < D; ++j) r[j] -= lr * grad_hidden[j] / ctx_n;
        }
      }
    }
  }
  return emb;
}

inline double cosine_similarity(const double* u, const double* v, std::size_t n) {
  double uu = 0.0, vv = 0.0, uv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    uu += u[i] * u[i];
    vv += v[i] * v[i];
    uv += u[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) throw ZeroVectorError("cosine of zero vector");
  return uv / (std::sqrt(uu) * std::sqrt(vv));
}

inline double cosine_similarity(const std::vector<double>& u, const std::vector<double>& v) {
  if (u.size() != v.size()) throw ShapeError("cosine of different-length vectors");
  return cosine_similarity(u.data(), v.data(), u.size());
}

// Top-k most similar tokens by cosine (higher = more similar), query excluded,
// ties broken lexicographically.
inline std::vector<std::pair<std::string, double>> most_similar(const std::string& token,
                                                                const EmbeddingMatrix& emb,
                                                                const Vocabulary& vocab,
                                                                std::size_t k = 20) {
  const std::size_t q = vocab.id(token);
  if (emb.M != vocab.M) throw VocabMismatchError("embedding/vocabulary size mismatch");
  std::vector<std::pair<std::string, double>> scored;
  scored.reserve(emb.M);
  const double* qv = emb.row(q);
  double qq = 0.0;
  for (std::size_t j = 0; j < emb.D; ++j) qq += qv[j] * qv[j];
  if (qq == 0.0) throw ZeroVectorError("query token has a zero vector");
  for (std::size_t m = 0; m < emb.M; ++m) {
    if (m == q) continue;
    const double* v = emb.row(m);
    double vv = 0.0, uv = 0.0;
    for (std::size_t j = 0; j < emb.D; ++j) {
      vv += v[j] * v[j];
      uv += qv[j] * v[j];
    }
    if (vv == 0.0) continue;  // untrained zero rows are not comparable
    scored.emplace_back(vocab.tokens[m], uv / (std::sqrt(qq) * std::sqrt(vv)));
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (scored.size() > k) scored.resize(k);
  return scored;
}

// ---------------------------------------------------------------------------
// persistence: binary header (magic, M, D, vocab hash) + row-major doubles

inline void save_embedding(const EmbeddingMatrix& emb, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  const char magic[8] = {'A', 'R', 'I', 'X', 'E', 'M', 'B', '1'};
  out.write(magic, 8);
  std::uint64_t m = emb.M, d = emb.D, vh = emb.vocab_hash;
  out.write(reinterpret_cast<const char*>(&m), 8);
  out.write(reinterpret_cast<const char*>(&d), 8);
  out.write(reinterpret_cast<const char*>(&vh), 8);
  out.write(reinterpret_cast<const char*>(emb.vectors.data()),
            static_cast<std::streamsize>(emb.vectors.size() * sizeof(double)));
  if (!out) throw IoError("write failure on " + path);
}

inline EmbeddingMatrix load_embedding(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::string(magic, 8) != "ARIXEMB1") throw IoError("not an arix embedding file");
  std::uint64_t m = 0, d = 0, vh = 0;
  in.read(reinterpret_cast<char*>(&m), 8);
  in.read(reinterpret_cast<char*>(&d), 8);
  in.read(reinterpret_cast<char*>(&vh), 8);
  EmbeddingMatrix emb;
  emb.M = m;
  emb.D = d;
  emb.vocab_hash = vh;
  emb.vectors.resize(m * d);
  in.read(reinterpret_cast<char*>(emb.vectors.data()),
          static_cast<std::streamsize>(emb.vectors.size() * sizeof(double)));
  if (!in) throw IoError("truncated embedding file " + path);
  return emb;
}

inline void export_embedding_tsv(const EmbeddingMatrix& emb, const Vocabulary& vocab,
                                 const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out.precision(17);
  for (std::size_t m = 0; m < emb.M; ++m) {
    out << vocab.tokens[m];
    for (std::size_t j = 0; j < emb.D; ++j) out << '\t' << emb.row(m)[j];
    out << '\n';
  }
}

}  // namespace arix
