// Bayesian machine: Laplace-smoothed token PMFs for a subject and a
// low-correlation background, combined in a two-class naive Bayes classifier.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "arix/corpus.hpp"
#include "arix/errors.hpp"
#include "arix/matrix.hpp"
#include "arix/tokenize.hpp"
#include "arix/topic.hpp"

namespace arix {

struct Pmf {
  std::vector<double> probs;  // dense over the vocabulary, all > 0 (smoothed)
  double alpha = 1.0;
  std::size_t support_size = 0;
};

struct BayesModel {
  Pmf pmf_subject;
  Pmf pmf_background;
  double prior_subject = 0.5;
  std::uint64_t vocab_hash = 0;
};

// probs(t) = (count(t) + alpha) / (total + alpha * M): summed, normalized BOW.
inline Pmf fit_pmf(const std::vector<Document>& docs, const Vocabulary& vocab,
                   double alpha = 1.0) {
  if (docs.empty()) throw EmptyInputError("fit_pmf needs at least one document");
  if (alpha <= 0.0) throw ConfigError("alpha must be > 0");
  Pmf pmf;
  pmf.alpha = alpha;
  pmf.support_size = vocab.M;
  std::vector<double> counts(vocab.M, 0.0);
  double total = 0.0;
  for (const auto& d : docs) {
    for (auto& t : tokenize(d.text)) {
      auto it = vocab.index.find(t);
      if (it == vocab.index.end()) continue;
      counts[it->second] += 1.0;
      total += 1.0;
    }
  }
  pmf.probs.resize(vocab.M);
  const double denom = total + alpha * static_cast<double>(vocab.M);
  for (std::size_t t = 0; t < vocab.M; ++t) pmf.probs[t] = (counts[t] + alpha) / denom;
  return pmf;
}

// Background PMF from a seeded sample of documents whose topic correlation is
// below `low_threshold`.
inline Pmf fit_background(const Corpus& corpus, const Vocabulary& vocab,
                          const TopicVector& topic, const TopicModel& model,
                          double low_threshold, std::size_t sample_size, std::uint64_t seed,
                          double alpha = 1.0) {
  const auto corr = all_correlations(topic, model);
  std::vector<std::size_t> pool;
  for (std::size_t d = 0; d < corr.size(); ++d)
    if (corr[d].second && corr[d].first < low_threshold) pool.push_back(d);
  if (pool.size() < 10)
    throw InsufficientSampleError("fewer than 10 low-correlation documents available");

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> sample;
  std::sample(pool.begin(), pool.end(), std::back_inserter(sample),
              std::min(sample_size, pool.size()), rng);
  std::vector<Document> docs;
  docs.reserve(sample.size());
  for (auto d : sample) docs.push_back(corpus.documents[d]);
  return fit_pmf(docs, vocab, alpha);
}

// log_odds = ln(prior/(1-prior)) + sum over tokens of ln ps(t)/pb(t), with BOW
// multiplicity; OOV tokens are skipped (all-OOV docs decide by prior alone).
inline std::pair<bool, double> classify(const Document& doc, const BayesModel& model,
                                        const Vocabulary& vocab) {
  double log_odds = std::log(model.prior_subject / (1.0 - model.prior_subject));
  for (auto& t : tokenize(doc.text)) {
    auto it = vocab.index.find(t);
    if (it == vocab.index.end()) continue;
    log_odds += std::log(model.pmf_subject.probs[it->second]) -
                std::log(model.pmf_background.probs[it->second]);
  }
  return {log_odds > 0.0, log_odds};
}

// ---------------------------------------------------------------------------
// persistence: sparse log-prob arrays (default value + overrides)

namespace detail {

inline nlohmann::json pmf_to_json(const Pmf& pmf) {
  // entries that share the all-unseen baseline compress to a default
  nlohmann::json j;
  j["alpha"] = pmf.alpha;
  j["support_size"] = pmf.support_size;
  double baseline = 0.0;
  std::vector<std::pair<std::size_t, double>> overrides;
  if (!pmf.probs.empty()) {
    baseline = *std::min_element(pmf.probs.begin(), pmf.probs.end());
    for (std::size_t t = 0; t < pmf.probs.size(); ++t)
      if (pmf.probs[t] != baseline) overrides.emplace_back(t, std::log(pmf.probs[t]));
  }
  j["default_log_prob"] = std::log(baseline);
  nlohmann::json entries = nlohmann::json::array();
  for (auto& [t, lp] : overrides) entries.push_back({t, lp});
  j["entries"] = std::move(entries);
  return j;
}

inline Pmf pmf_from_json(const nlohmann::json& j) {
  Pmf pmf;
  pmf.alpha = j.at("alpha").get<double>();
  pmf.support_size = j.at("support_size").get<std::size_t>();
  const double baseline = std::exp(j.at("default_log_prob").get<double>());
  pmf.probs.assign(pmf.support_size, baseline);
  for (const auto& e : j.at("entries"))
    pmf.probs[e.at(0).get<std::size_t>()] = std::exp(e.at(1).get<double>());
  return pmf;
}

}  // namespace detail

inline void save_bayes_model(const BayesModel& m, const std::string& path) {
  nlohmann::json j;
  j["format"] = "arix-bayes";
  j["version"] = 1;
  j["prior_subject"] = m.prior_subject;
  j["vocab_hash"] = m.vocab_hash;
  j["pmf_subject"] = detail::pmf_to_json(m.pmf_subject);
  j["pmf_background"] = detail::pmf_to_json(m.pmf_background);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << '\n';
}

inline BayesModel load_bayes_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  nlohmann::json j;
  in >> j;
  if (j.value("format", "") != "arix-bayes") throw IoError("not an arix bayes file");
  BayesModel m;
  m.prior_subject = j.at("prior_subject").get<double>();
  m.vocab_hash = j.at("vocab_hash").get<std::uint64_t>();
  m.pmf_subject = detail::pmf_from_json(j.at("pmf_subject"));
  m.pmf_background = detail::pmf_from_json(j.at("pmf_background"));
  return m;
}

}  // namespace arix
