#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "arix/topic.hpp"
#include "oracles.hpp"

using namespace arix;

namespace {

DocTokenMatrix random_matrix(std::size_t N, std::size_t M, std::uint64_t seed,
                             double density = 0.5) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.05, 1.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  DocTokenMatrix m;
  m.weighting = Weighting::tfidf;
  m.N = N;
  m.M = M;
  m.rows.resize(N);
  for (std::size_t d = 0; d < N; ++d)
    for (std::size_t t = 0; t < M; ++t)
      if (coin(rng) < density) m.rows[d].emplace_back(t, uni(rng));
  return m;
}

// A^T as a dense oracle matrix (M x N)
oracles::Mat to_dense_at(const DocTokenMatrix& m) {
  oracles::Mat a(m.M, std::vector<double>(m.N, 0.0));
  for (std::size_t d = 0; d < m.N; ++d)
    for (auto& [t, w] : m.rows[d]) a[t][d] = w;
  return a;
}

Vocabulary toy_vocab(std::size_t M) {
  Vocabulary v;
  for (std::size_t i = 0; i < M; ++i) {
    std::string t = "tok" + std::to_string(i);
    v.index.emplace(t, i);
    v.tokens.push_back(t);
    v.freq.push_back(1);
  }
  v.M = M;
  return v;
}

}  // namespace

TEST_CASE("fit_lsa") {
  SECTION("identity matrix: unit singular values, identity token-topic") {
    const std::size_t k = 6;
    DocTokenMatrix m;
    m.weighting = Weighting::tfidf;
    m.N = k;
    m.M = k;
    m.rows.resize(k);
    for (std::size_t d = 0; d < k; ++d) m.rows[d].emplace_back(d, 1.0);
    auto model = fit_lsa(m, k);
    for (double s : model.singular_values) CHECK(s == Catch::Approx(1.0));
    for (std::size_t t = 0; t < k; ++t)
      for (std::size_t e = 0; e < k; ++e)
        CHECK(model.token_topic[t * k + e] == Catch::Approx(t == e ? 1.0 : 0.0).margin(1e-12));
  }

  SECTION("reconstruction error equals the tail singular values") {
    for (std::uint64_t seed : {11, 12, 13}) {
      auto m = random_matrix(9, 7, seed);
      const std::size_t E = 3;
      auto model = fit_lsa(m, E);
      // A_E = U_E U_E^T A  (projection onto the truncated left space)
      auto a = to_dense_at(m);  // M x N
      oracles::Mat u(m.M, std::vector<double>(E));
      for (std::size_t t = 0; t < m.M; ++t)
        for (std::size_t e = 0; e < E; ++e) u[t][e] = model.token_topic[t * model.E + e];
      auto proj = oracles::matmul(u, oracles::matmul(oracles::transpose(u), a));
      oracles::Mat diff = a;
      for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[0].size(); ++j) diff[i][j] -= proj[i][j];
      double tail = 0.0;
      for (std::size_t i = E; i < model.singular_values.size(); ++i)
        tail += model.singular_values[i] * model.singular_values[i];
      CHECK(oracles::frobenius(diff) == Catch::Approx(std::sqrt(tail)).margin(1e-8));
    }
  }

  SECTION("rank-1 matrix reconstructs exactly with E=1") {
    DocTokenMatrix m;
    m.weighting = Weighting::tfidf;
    m.N = 5;
    m.M = 4;
    m.rows.resize(5);
    // outer product u v^T with u = (1,2,3,4), v = (1,.5,.25,2,1)
    const double uvec[4] = {1, 2, 3, 4};
    const double vvec[5] = {1, 0.5, 0.25, 2, 1};
    for (std::size_t d = 0; d < 5; ++d)
      for (std::size_t t = 0; t < 4; ++t) m.rows[d].emplace_back(t, uvec[t] * vvec[d]);
    auto model = fit_lsa(m, 1);
    auto a = to_dense_at(m);
    oracles::Mat u(4, std::vector<double>(1));
    for (std::size_t t = 0; t < 4; ++t) u[t][0] = model.token_topic[t * model.E];
    auto proj = oracles::matmul(u, oracles::matmul(oracles::transpose(u), a));
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 5; ++j) CHECK(proj[i][j] == Catch::Approx(a[i][j]).margin(1e-10));
  }

  SECTION("singular values match the Jacobi oracle") {
    for (std::uint64_t seed : {21, 22}) {
      auto m = random_matrix(8, 10, seed);
      auto model = fit_lsa(m, 4);
      auto oracle = oracles::jacobi_singular_values(to_dense_at(m));
      REQUIRE(model.singular_values.size() == oracle.size());
      for (std::size_t i = 0; i < oracle.size(); ++i)
        CHECK(model.singular_values[i] == Catch::Approx(oracle[i]).margin(1e-8));
    }
  }

  SECTION("doc_topic equals TFIDF times the truncated U") {
    auto m = random_matrix(7, 6, 31);
    auto model = fit_lsa(m, 3);
    for (std::size_t d = 0; d < m.N; ++d)
      for (std::size_t e = 0; e < model.E; ++e) {
        double s = 0.0;
        for (auto& [t, w] : m.rows[d]) s += w * model.token_topic[t * model.E + e];
        CHECK(model.doc_topic[d * model.E + e] == Catch::Approx(s).margin(1e-10));
      }
  }

  SECTION("singular values are non-increasing and E is validated") {
    auto m = random_matrix(6, 5, 41);
    auto model = fit_lsa(m, 5);
    for (std::size_t i = 1; i < model.singular_values.size(); ++i)
      CHECK(model.singular_values[i] <= model.singular_values[i - 1] + 1e-14);
    CHECK_THROWS_AS(fit_lsa(m, 6), RankError);
    CHECK_THROWS_AS(fit_lsa(m, 0), RankError);
  }

  SECTION("sign fix makes runs deterministic") {
    auto m = random_matrix(8, 8, 51);
    auto a = fit_lsa(m, 4);
    auto b = fit_lsa(m, 4);
    CHECK(a.token_topic == b.token_topic);
    CHECK(a.doc_topic == b.doc_topic);
    for (std::size_t e = 0; e < a.E; ++e) {
      double best = 0.0;
      for (std::size_t t = 0; t < a.M; ++t)
        if (std::abs(a.token_topic[t * a.E + e]) > std::abs(best))
          best = a.token_topic[t * a.E + e];
      CHECK(best > 0.0);
    }
  }
}

TEST_CASE("make_topic_vector") {
  auto m = random_matrix(6, 5, 61);
  auto model = fit_lsa(m, 3);
  auto vocab = toy_vocab(5);

  auto cluster_of = [](std::vector<std::string> toks) {
    TokenCluster c;
    c.subject = "s";
    for (auto& t : toks) c.members.emplace_back(t, 1);
    return c;
  };

  SECTION("single token gives that row verbatim") {
    auto tv = make_topic_vector({cluster_of({"tok2"})}, model, vocab);
    for (std::size_t e = 0; e < model.E; ++e)
      CHECK(tv.values[e] == model.token_topic[2 * model.E + e]);
  }
  SECTION("two tokens sum commutatively") {
    auto ab = make_topic_vector({cluster_of({"tok0", "tok3"})}, model, vocab);
    auto ba = make_topic_vector({cluster_of({"tok3", "tok0"})}, model, vocab);
    for (std::size_t e = 0; e < model.E; ++e)
      CHECK(ab.values[e] == Catch::Approx(ba.values[e]).margin(1e-15));
  }
  SECTION("combining clusters sums their vectors") {
    auto c1 = cluster_of({"tok0", "tok1"});
    auto c2 = cluster_of({"tok3"});
    auto joint = make_topic_vector({c1, c2}, model, vocab);
    auto v1 = make_topic_vector({c1}, model, vocab);
    auto v2 = make_topic_vector({c2}, model, vocab);
    for (std::size_t e = 0; e < model.E; ++e)
      CHECK(joint.values[e] == Catch::Approx(v1.values[e] + v2.values[e]).margin(1e-12));
  }
  SECTION("2-grams decompose; unknown tokens are skipped with a warning") {
    auto c = cluster_of({"tok0 tok1"});
    auto tv = make_topic_vector({c}, model, vocab);
    auto direct = make_topic_vector({cluster_of({"tok0", "tok1"})}, model, vocab);
    CHECK(tv.values == direct.values);
    std::vector<std::string> skipped;
    auto c2 = cluster_of({"tok0", "ghost"});
    make_topic_vector({c2}, model, vocab, &skipped);
    CHECK(skipped == std::vector<std::string>{"ghost"});
  }
  SECTION("nothing resolvable is an error") {
    auto c = cluster_of({"ghost"});
    CHECK_THROWS_AS(make_topic_vector({c}, model, vocab), EmptyTopicError);
  }
}

TEST_CASE("match_documents") {
  auto m = random_matrix(8, 6, 71);
  auto model = fit_lsa(m, 4);

  SECTION("a doc identical to the topic vector correlates at 1") {
    TopicVector tv;
    tv.values.assign(model.doc_row(2), model.doc_row(2) + model.E);
    auto hits = match_documents(tv, model, 0.99);
    bool found = false;
    for (auto& [d, r] : hits)
      if (d == 2) {
        found = true;
        CHECK(r == Catch::Approx(1.0));
      }
    CHECK(found);
  }
  SECTION("Pearson is shift invariant") {
    TopicVector tv;
    tv.values.assign(model.doc_row(1), model.doc_row(1) + model.E);
    for (auto& v : tv.values) v += 100.0;  // constant shift
    auto hits = match_documents(tv, model, 0.99);
    bool found = false;
    for (auto& [d, r] : hits)
      if (d == 1) {
        found = true;
        CHECK(r == Catch::Approx(1.0).margin(1e-10));
      }
    CHECK(found);
  }
  SECTION("equals a brute-force Pearson scan") {
    TopicVector tv;
    tv.values.assign(model.doc_row(0), model.doc_row(0) + model.E);
    tv.values[0] += 0.37;  // make it distinct
    const double thr = -0.6;
    auto hits = match_documents(tv, model, thr);
    std::vector<std::pair<std::int64_t, double>> expect;
    for (std::size_t d = 0; d < model.N; ++d) {
      std::vector<double> row(model.doc_row(d), model.doc_row(d) + model.E);
      const double r = oracles::pearson(tv.values, row);
      if (r > thr) expect.emplace_back(static_cast<std::int64_t>(d), r);
    }
    std::sort(expect.begin(), expect.end(),
              [](const auto& a, const auto& b) { return a.second > b.second; });
    REQUIRE(hits.size() == expect.size());
    for (std::size_t i = 0; i < hits.size(); ++i) {
      CHECK(hits[i].first == expect[i].first);
      CHECK(hits[i].second == Catch::Approx(expect[i].second).margin(1e-12));
    }
  }
  SECTION("raising the threshold only shrinks the retained set") {
    TopicVector tv;
    tv.values.assign(model.doc_row(3), model.doc_row(3) + model.E);
    auto lo = match_documents(tv, model, 0.6);
    auto hi = match_documents(tv, model, 0.7);
    CHECK(hi.size() <= lo.size());
    std::set<std::int64_t> lo_set;
    for (auto& [d, r] : lo) lo_set.insert(d);
    for (auto& [d, r] : hi) CHECK(lo_set.count(d) == 1);
  }
  SECTION("degenerate topic vector is an error") {
    TopicVector tv;
    tv.values.assign(model.E, 3.14);
    CHECK_THROWS_AS(match_documents(tv, model, 0.5), DegenerateVectorError);
  }
}

TEST_CASE("topic model persistence") {
  auto m = random_matrix(6, 5, 81);
  auto model = fit_lsa(m, 2, 111, 222);
  auto path = (std::filesystem::temp_directory_path() / "lsa_test.bin").string();
  save_topic_model(model, path);
  auto back = load_topic_model(path);
  CHECK(back.E == model.E);
  CHECK(back.M == model.M);
  CHECK(back.N == model.N);
  CHECK(back.vocab_hash == 111);
  CHECK(back.corpus_hash == 222);
  CHECK(back.singular_values == model.singular_values);
  CHECK(back.token_topic == model.token_topic);
  CHECK(back.doc_topic == model.doc_topic);
}
