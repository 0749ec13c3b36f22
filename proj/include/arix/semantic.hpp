// Semantic machine: recursive embedding-neighborhood expansion of seed tokens
// into a subject cluster, plus 2-gram attachment via the adjacency score.
#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "arix/corpus.hpp"
#include "arix/embedding.hpp"
#include "arix/errors.hpp"
#include "arix/tokenize.hpp"

namespace arix {

struct TokenCluster {
  std::string subject;
  std::vector<std::string> seeds;
  std::size_t n_iterations = 0;
  // members sorted by (overlap count desc, term asc); n-grams have n in {1,2}
  std::vector<std::pair<std::string, std::int64_t>> members;

  // searchable term set used by downstream machines: members plus seeds
  std::vector<std::string> all_terms() const {
    std::vector<std::string> t;
    t.reserve(members.size() + seeds.size());
    for (const auto& [term, c] : members) t.push_back(term);
    for (const auto& s : seeds)
      if (std::find(t.begin(), t.end(), s) == t.end()) t.push_back(s);
    return t;
  }
};

// Iteration 1 expands the seeds; iteration i>1 expands the tokens first found
// in iteration i-1. Counts accumulate with multiplicity over every neighbor
// list. Already-expanded tokens are not re-expanded, and seeds themselves are
// not counted as findings.
inline TokenCluster expand_cluster(const std::vector<std::string>& seeds,
                                   const EmbeddingMatrix& emb, const Vocabulary& vocab,
                                   std::size_t n_iterations, std::size_t k = 20,
                                   std::int64_t min_overlap = 1,
                                   const std::string& subject = "") {
  if (n_iterations < 1) throw ConfigError("n_iterations must be >= 1");
  for (const auto& s : seeds)
    if (!vocab.contains(s)) throw UnknownTokenError("seed not in vocabulary: " + s);

  TokenCluster cluster;
  cluster.subject = subject;
  cluster.seeds = seeds;
  cluster.n_iterations = n_iterations;

  std::set<std::string> seed_set(seeds.begin(), seeds.end());
  std::set<std::string> expanded(seed_set);
  std::vector<std::string> frontier(seeds.begin(), seeds.end());
  std::map<std::string, std::int64_t> counts;

  for (std::size_t it = 0; it < n_iterations && !frontier.empty(); ++it) {
    std::vector<std::string> next;
    for (const auto& tok : frontier) {
      for (const auto& [nb, sim] : most_similar(tok, emb, vocab, k)) {
        if (seed_set.count(nb)) continue;
        ++counts[nb];
        if (expanded.insert(nb).second) next.push_back(nb);
      }
    }
    frontier = std::move(next);
  }

  for (const auto& [tok, c] : counts)
    if (c >= min_overlap) cluster.members.emplace_back(tok, c);
  std::sort(cluster.members.begin(), cluster.members.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return cluster;
}

// Unigram and adjacent-bigram counts over the tokenized corpus.
struct CorpusCounts {
  std::unordered_map<std::string, std::int64_t> unigrams;
  std::unordered_map<std::string, std::int64_t> bigrams;  // key "a\x1fb"

  static std::string key(const std::string& a, const std::string& b) { return a + '\x1f' + b; }

  std::int64_t unigram(const std::string& t) const {
    auto it = unigrams.find(t);
    return it == unigrams.end() ? 0 : it->second;
  }
  std::int64_t bigram(const std::string& a, const std::string& b) const {
    auto it = bigrams.find(key(a, b));
    return it == bigrams.end() ? 0 : it->second;
  }
};

inline CorpusCounts count_corpus(const Corpus& corpus) {
  CorpusCounts c;
  for (const auto& d : corpus.documents) {
    auto toks = tokenize(d.text);
    for (std::size_t i = 0; i < toks.size(); ++i) {
      ++c.unigrams[toks[i]];
      if (i + 1 < toks.size()) ++c.bigrams[CorpusCounts::key(toks[i], toks[i + 1])];
    }
  }
  return c;
}

inline double ngram_score(const std::string& token_i, const std::string& token_j,
                          const CorpusCounts& counts, double thr) {
  const std::int64_t ci = counts.unigram(token_i);
  const std::int64_t cj = counts.unigram(token_j);
  if (ci == 0) throw UnknownTokenError("token has zero corpus count: " + token_i);
  if (cj == 0) throw UnknownTokenError("token has zero corpus count: " + token_j);
  const std::int64_t cij = counts.bigram(token_i, token_j);
  return (static_cast<double>(cij) - thr) / (static_cast<double>(ci) * static_cast<double>(cj));
}

inline double ngram_score(const std::string& token_i, const std::string& token_j,
                          const Corpus& corpus, double thr) {
  return ngram_score(token_i, token_j, count_corpus(corpus), thr);
}

// Joins frequently adjacent member pairs as 2-grams. A bigram's count is the
// smaller of its parents' counts (seeds, which carry no count, do not bound).
inline TokenCluster attach_bigrams(const TokenCluster& cluster, const CorpusCounts& counts,
                                   double thr = 5.0, double score_min = 1e-5) {
  TokenCluster out = cluster;
  std::map<std::string, std::int64_t> member_count(cluster.members.begin(),
                                                   cluster.members.end());
  std::vector<std::string> unigrams;
  for (const auto& t : cluster.all_terms())
    if (t.find(' ') == std::string::npos) unigrams.push_back(t);
  std::sort(unigrams.begin(), unigrams.end());

  std::set<std::string> existing;
  for (const auto& [term, c] : out.members) existing.insert(term);

  std::vector<std::pair<std::string, std::int64_t>> added;
  for (const auto& a : unigrams) {
    if (counts.unigram(a) == 0) continue;
    for (const auto& b : unigrams) {
      if (a == b || counts.unigram(b) == 0) continue;
      if (counts.bigram(a, b) == 0) continue;
      if (ngram_score(a, b, counts, thr) <= score_min) continue;
      std::string bigram = a + ' ' + b;
      if (!existing.insert(bigram).second) continue;
      std::int64_t c = INT64_MAX;
      if (auto it = member_count.find(a); it != member_count.end()) c = std::min(c, it->second);
      if (auto it = member_count.find(b); it != member_count.end()) c = std::min(c, it->second);
      if (c == INT64_MAX) c = 1;  // both parents are seeds
      added.emplace_back(std::move(bigram), c);
    }
  }
  out.members.insert(out.members.end(), added.begin(), added.end());
  std::sort(out.members.begin(), out.members.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second > y.second;
    return x.first < y.first;
  });
  return out;
}

inline TokenCluster attach_bigrams(const TokenCluster& cluster, const Corpus& corpus,
                                   double thr = 5.0, double score_min = 1e-5) {
  return attach_bigrams(cluster, count_corpus(corpus), thr, score_min);
}

// ---------------------------------------------------------------------------
// persistence: JSON, the machine-readable analogue of a subject term table

inline nlohmann::json cluster_to_json(const TokenCluster& c) {
  nlohmann::json j;
  j["format"] = "arix-cluster";
  j["version"] = 1;
  j["subject"] = c.subject;
  j["seeds"] = c.seeds;
  j["params"] = {{"n_iterations", c.n_iterations}};
  j["members"] = nlohmann::json::array();
  for (const auto& [term, count] : c.members)
    j["members"].push_back({{"ngram", term}, {"count", count}});
  return j;
}

inline TokenCluster cluster_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "arix-cluster") throw IoError("not an arix cluster file");
  TokenCluster c;
  c.subject = j.value("subject", "");
  c.seeds = j.at("seeds").get<std::vector<std::string>>();
  c.n_iterations = j.at("params").value("n_iterations", 1);
  for (const auto& m : j.at("members"))
    c.members.emplace_back(m.at("ngram").get<std::string>(), m.at("count").get<std::int64_t>());
  return c;
}

inline void save_cluster(const TokenCluster& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << cluster_to_json(c).dump(2) << '\n';
}

inline TokenCluster load_cluster(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  nlohmann::json j;
  in >> j;
  return cluster_from_json(j);
}

}  // namespace arix
