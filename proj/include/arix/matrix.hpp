// Vocabulary and doc-token matrices (one-hot / BOW / TFIDF).
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "arix/corpus.hpp"
#include "arix/errors.hpp"
#include "arix/hash.hpp"
#include "arix/tokenize.hpp"

namespace arix {

struct Vocabulary {
  std::vector<std::string> tokens;              // ordered by (freq desc, lex asc)
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::int64_t> freq;               // corpus frequency per token
  std::size_t M = 0;

  bool contains(const std::string& t) const { return index.count(t) != 0; }
  std::size_t id(const std::string& t) const {
    auto it = index.find(t);
    if (it == index.end()) throw UnknownTokenError("token not in vocabulary: " + t);
    return it->second;
  }
};

inline Vocabulary build_vocabulary(const Corpus& corpus, std::int64_t min_count = 2) {
  if (corpus.N == 0) throw EmptyCorpusError("cannot build vocabulary from empty corpus");
  if (min_count < 1) throw ConfigError("min_count must be >= 1");
  std::map<std::string, std::int64_t> counts;
  for (const auto& d : corpus.documents)
    for (auto& t : tokenize(d.text)) ++counts[t];

  std::vector<std::pair<std::string, std::int64_t>> items(counts.begin(), counts.end());
  std::erase_if(items, [&](const auto& kv) { return kv.second < min_count; });
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  Vocabulary v;
  v.tokens.reserve(items.size());
  for (auto& [tok, c] : items) {
    v.index.emplace(tok, v.tokens.size());
    v.tokens.push_back(tok);
    v.freq.push_back(c);
  }
  v.M = v.tokens.size();
  return v;
}

inline std::uint64_t vocab_hash(const Vocabulary& v) {
  std::uint64_t h = kFnvOffset;
  for (const auto& t : v.tokens) {
    h = fnv1a(t, h);
    h = fnv1a("\x1f", h);
  }
  return h;
}

enum class Weighting { one_hot, bow, tfidf };

inline const char* to_string(Weighting w) {
  switch (w) {
    case Weighting::one_hot: return "one-hot";
    case Weighting::bow: return "bow";
    case Weighting::tfidf: return "tfidf";
  }
  return "?";
}

struct DocTokenMatrix {
  Weighting weighting = Weighting::bow;
  std::size_t N = 0;  // docs (rows)
  std::size_t M = 0;  // tokens (cols)
  // sparse rows: (token index, weight), token indices ascending
  std::vector<std::vector<std::pair<std::size_t, double>>> rows;
};

inline DocTokenMatrix build_matrix(const Corpus& corpus, const Vocabulary& vocab,
                                   Weighting weighting) {
  for (std::size_t i = 0; i < corpus.documents.size(); ++i)
    if (corpus.documents[i].doc_id != static_cast<std::int64_t>(i))
      throw ShapeError("corpus doc_ids are not dense");

  DocTokenMatrix m;
  m.weighting = weighting;
  m.N = corpus.N;
  m.M = vocab.M;
  m.rows.resize(m.N);

  std::vector<std::int64_t> df(vocab.M, 0);  // document frequency per token
  for (std::size_t d = 0; d < corpus.N; ++d) {
    std::map<std::size_t, double> counts;
    for (auto& t : tokenize(corpus.documents[d].text)) {
      auto it = vocab.index.find(t);
      if (it != vocab.index.end()) counts[it->second] += 1.0;
    }
    auto& row = m.rows[d];
    row.reserve(counts.size());
    for (auto& [tid, c] : counts) {
      row.emplace_back(tid, c);
      ++df[tid];
    }
  }

  if (weighting == Weighting::one_hot) {
    for (auto& row : m.rows)
      for (auto& [tid, w] : row) w = 1.0;
  } else if (weighting == Weighting::tfidf) {
    const double n = static_cast<double>(m.N);
    std::vector<double> idf(vocab.M);
    for (std::size_t t = 0; t < vocab.M; ++t)
      idf[t] = std::log((1.0 + n) / (1.0 + static_cast<double>(df[t]))) + 1.0;
    for (auto& row : m.rows) {
      double norm2 = 0.0;
      for (auto& [tid, w] : row) {
        w *= idf[tid];
        norm2 += w * w;
      }
      if (norm2 > 0.0) {
        const double inv = 1.0 / std::sqrt(norm2);
        for (auto& [tid, w] : row) w *= inv;
      }
    }
  }
  return m;
}

}  // namespace arix
