// Topic machine: LSA from the SVD of the transposed TFIDF matrix, topic
// vectors as sums of token-topic rows, and correlation-based sentence
// matching.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "arix/errors.hpp"
#include "arix/hash.hpp"
#include "arix/matrix.hpp"
#include "arix/semantic.hpp"
#include "arix/tokenize.hpp"

namespace arix {

struct TopicModel {
  std::size_t E = 0;
  std::size_t M = 0;  // tokens
  std::size_t N = 0;  // docs
  std::uint64_t vocab_hash = 0;
  std::uint64_t corpus_hash = 0;
  std::vector<double> singular_values;  // all min(M,N), non-increasing
  std::vector<double> token_topic;      // row-major M x E (truncated U)
  std::vector<double> doc_topic;        // row-major N x E (TFIDF * U_E)

  const double* token_row(std::size_t t) const { return token_topic.data() + t * E; }
  const double* doc_row(std::size_t d) const { return doc_topic.data() + d * E; }
};

struct TopicVector {
  std::string subject;
  std::vector<double> values;  // length E
  std::vector<std::string> source_tokens;
};

// SVD of TFIDF^T (M x N). Columns of U are sign-fixed so the entry of largest
// magnitude is positive, which pins down the run-to-run sign ambiguity.
inline TopicModel fit_lsa(const DocTokenMatrix& matrix, std::size_t E,
                          std::uint64_t vhash = 0, std::uint64_t chash = 0) {
  const std::size_t M = matrix.M, N = matrix.N;
  if (E < 1 || E > std::min(M, N)) throw RankError("E must be in [1, min(M,N)]");

  Eigen::MatrixXd a(M, N);  // TFIDF^T: token-doc
  a.setZero();
  for (std::size_t d = 0; d < N; ++d)
    for (const auto& [tid, w] : matrix.rows[d]) a(static_cast<Eigen::Index>(tid),
                                                  static_cast<Eigen::Index>(d)) = w;

  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU);
  Eigen::MatrixXd u = svd.matrixU();  // M x min(M,N)
  const auto& s = svd.singularValues();

  // sign fix per column
  for (Eigen::Index c = 0; c < u.cols(); ++c) {
    Eigen::Index imax = 0;
    double best = 0.0;
    for (Eigen::Index r = 0; r < u.rows(); ++r)
      if (std::abs(u(r, c)) > best) { best = std::abs(u(r, c)); imax = r; }
    if (u(imax, c) < 0.0) u.col(c) = -u.col(c);
  }

  TopicModel model;
  model.E = E;
  model.M = M;
  model.N = N;
  model.vocab_hash = vhash;
  model.corpus_hash = chash;
  model.singular_values.assign(s.data(), s.data() + s.size());

  model.token_topic.resize(M * E);
  for (std::size_t t = 0; t < M; ++t)
    for (std::size_t e = 0; e < E; ++e)
      model.token_topic[t * E + e] = u(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(e));

  // doc-topic = TFIDF * U_E, using the sparse rows directly
  model.doc_topic.assign(N * E, 0.0);
  for (std::size_t d = 0; d < N; ++d) {
    double* dst = model.doc_topic.data() + d * E;
    for (const auto& [tid, w] : matrix.rows[d]) {
      const double* tt = model.token_row(tid);
      for (std::size_t e = 0; e < E; ++e) dst[e] += w * tt[e];
    }
  }
  return model;
}

// Sums the token-topic rows of every resolvable cluster token (2-grams are
// decomposed). Unknown tokens are skipped and reported through `skipped`.
inline TopicVector make_topic_vector(const std::vector<TokenCluster>& clusters,
                                     const TopicModel& model, const Vocabulary& vocab,
                                     std::vector<std::string>* skipped = nullptr) {
  TopicVector tv;
  tv.values.assign(model.E, 0.0);
  std::vector<std::string> labels;
  std::size_t resolved = 0;
  for (const auto& cluster : clusters) {
    labels.push_back(cluster.subject);
    for (const auto& term : cluster.all_terms()) {
      for (const auto& tok : tokenize(term)) {
        auto it = vocab.index.find(tok);
        if (it == vocab.index.end()) {
          if (skipped) skipped->push_back(tok);
          continue;
        }
        const double* row = model.token_row(it->second);
        for (std::size_t e = 0; e < model.E; ++e) tv.values[e] += row[e];
        tv.source_tokens.push_back(tok);
        ++resolved;
      }
    }
  }
  if (resolved == 0) throw EmptyTopicError("no cluster token resolved in the vocabulary");
  std::string subject;
  for (const auto& l : labels) {
    if (!subject.empty()) subject += " + ";
    subject += l;
  }
  tv.subject = subject;
  return tv;
}

inline double pearson(const double* x, const double* y, std::size_t n, bool* degenerate) {
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  if (degenerate) *degenerate = false;
  return sxy / std::sqrt(sxx * syy);
}

enum class MatchMetric { pearson, cosine };

// Docs whose doc-topic row correlates with the topic vector above `threshold`,
// sorted by correlation descending. Zero-variance doc rows are skipped; a
// degenerate topic vector is an error.
inline std::vector<std::pair<std::int64_t, double>> match_documents(
    const TopicVector& topic, const TopicModel& model, double threshold,
    MatchMetric metric = MatchMetric::pearson) {
  if (threshold < -1.0 || threshold > 1.0) throw ConfigError("threshold must be in [-1,1]");
  if (topic.values.size() != model.E) throw ShapeError("topic vector length != model E");

  bool degen = false;
  if (metric == MatchMetric::pearson) {
    pearson(topic.values.data(), topic.values.data(), model.E, &degen);
    if (degen) throw DegenerateVectorError("topic vector has zero variance");
  } else {
    double n2 = 0.0;
    for (double v : topic.values) n2 += v * v;
    if (n2 == 0.0) throw DegenerateVectorError("topic vector is zero");
  }

  std::vector<std::pair<std::int64_t, double>> out;
  for (std::size_t d = 0; d < model.N; ++d) {
    double r;
    if (metric == MatchMetric::pearson) {
      bool dd = false;
      r = pearson(topic.values.data(), model.doc_row(d), model.E, &dd);
      if (dd) continue;
    } else {
      double n2 = 0.0;
      const double* row = model.doc_row(d);
      for (std::size_t e = 0; e < model.E; ++e) n2 += row[e] * row[e];
      if (n2 == 0.0) continue;
      double q2 = 0.0, dot = 0.0;
      for (std::size_t e = 0; e < model.E; ++e) {
        q2 += topic.values[e] * topic.values[e];
        dot += topic.values[e] * row[e];
      }
      r = dot / (std::sqrt(q2) * std::sqrt(n2));
    }
    if (r > threshold) out.emplace_back(static_cast<std::int64_t>(d), r);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return out;
}

// Correlations for every doc (NaN-free; degenerate rows reported as nullopt
// via a parallel validity mask), used by the background sampler.
inline std::vector<std::pair<double, bool>> all_correlations(const TopicVector& topic,
                                                             const TopicModel& model) {
  std::vector<std::pair<double, bool>> out(model.N);
  for (std::size_t d = 0; d < model.N; ++d) {
    bool degen = false;
    const double r = pearson(topic.values.data(), model.doc_row(d), model.E, &degen);
    out[d] = {r, !degen};
  }
  return out;
}

// ---------------------------------------------------------------------------
// persistence

inline void save_topic_model(const TopicModel& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  const char magic[8] = {'A', 'R', 'I', 'X', 'L', 'S', 'A', '1'};
  out.write(magic, 8);
  auto w64 = [&](std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); };
  w64(m.E);
  w64(m.M);
  w64(m.N);
  w64(m.vocab_hash);
  w64(m.corpus_hash);
  w64(m.singular_values.size());
  auto wvec = [&](const std::vector<double>& v) {
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
  };
  wvec(m.singular_values);
  wvec(m.token_topic);
  wvec(m.doc_topic);
  if (!out) throw IoError("write failure on " + path);
}

inline TopicModel load_topic_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::string(magic, 8) != "ARIXLSA1") throw IoError("not an arix LSA file");
  auto r64 = [&]() {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 8);
    return v;
  };
  TopicModel m;
  m.E = r64();
  m.M = r64();
  m.N = r64();
  m.vocab_hash = r64();
  m.corpus_hash = r64();
  const std::uint64_t ns = r64();
  m.singular_values.resize(ns);
  m.token_topic.resize(m.M * m.E);
  m.doc_topic.resize(m.N * m.E);
  auto rvec = [&](std::vector<double>& v) {
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
  };
  rvec(m.singular_values);
  rvec(m.token_topic);
  rvec(m.doc_topic);
  if (!in) throw IoError("truncated LSA file " + path);
  return m;
}

}  // namespace arix
