#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "arix/embedding.hpp"

using namespace arix;

namespace {

Corpus corpus_from(const std::vector<std::string>& sents) {
  std::vector<std::vector<Document>> arts(1);
  for (std::size_t i = 0; i < sents.size(); ++i) {
    Document d;
    d.article_id = "a";
    d.sent_idx = static_cast<std::int64_t>(i);
    d.text = sents[i];
    arts[0].push_back(d);
  }
  return build_corpus(arts);
}

// wheat and corn appear in literally identical frames; distractors do not
Corpus identical_context_corpus() {
  std::vector<std::string> sents;
  const char* frames[] = {
      "the %s grows in the northern field",   "farmers harvest the %s every autumn",
      "the %s needs rain and warm soil",      "mills grind the %s into fine flour",
      "traders ship the %s across the river",
  };
  for (const char* f : frames) {
    for (const char* w : {"wheat", "corn"}) {
      char buf[128];
      std::snprintf(buf, sizeof buf, f, w);
      sents.push_back(buf);
      sents.push_back(buf);
    }
  }
  for (int i = 0; i < 10; ++i) {
    sents.push_back("ships sail across deep water at night");
    sents.push_back("engines burn fuel under heavy load");
    sents.push_back("birds nest high above quiet valleys");
  }
  return corpus_from(sents);
}

}  // namespace

TEST_CASE("train_cbow") {
  SECTION("fixed seed reproduces the matrix exactly") {
    auto corpus = identical_context_corpus();
    auto vocab = build_vocabulary(corpus, 1);
    CbowParams p;
    p.D = 50;
    p.epochs = 2;
    p.seed = 9;
    auto a = train_cbow(corpus, vocab, p);
    auto b = train_cbow(corpus, vocab, p);
    CHECK(a.vectors == b.vectors);
  }
  SECTION("sentence shorter than the chunk minimum trains nothing") {
    auto corpus = corpus_from({"alpha beta"});
    auto vocab = build_vocabulary(corpus, 1);
    CbowParams p;
    p.D = 50;
    p.seed = 4;
    p.epochs = 1;
    auto once = train_cbow(corpus, vocab, p);
    p.epochs = 7;
    auto more = train_cbow(corpus, vocab, p);
    // no window ever fits, so the vectors stay at their initialization
    CHECK(once.vectors == more.vectors);
  }
  SECTION("empty corpus / vocab errors") {
    Corpus empty;
    Vocabulary v;
    CHECK_THROWS_AS(train_cbow(empty, v, {}), EmptyCorpusError);
  }
}

TEST_CASE("cosine_similarity") {
  std::vector<double> v = {1.0, 2.0, -3.0};
  std::vector<double> nv = {-1.0, -2.0, 3.0};
  SECTION("identity, antipodal, orthogonal") {
    CHECK(cosine_similarity(v, v) == Catch::Approx(1.0));
    CHECK(cosine_similarity(v, nv) == Catch::Approx(-1.0));
    CHECK(cosine_similarity({1.0, 0.0}, {0.0, 1.0}) == Catch::Approx(0.0).margin(1e-15));
  }
  SECTION("zero vector is an error") {
    CHECK_THROWS_AS(cosine_similarity({0.0, 0.0}, {1.0, 0.0}), ZeroVectorError);
  }
  SECTION("symmetry and scale invariance within 1e-12") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> a(8), b(8), a3(8);
      for (int i = 0; i < 8; ++i) {
        a[i] = dist(rng);
        b[i] = dist(rng);
        a3[i] = 3.0 * a[i];
      }
      CHECK(std::abs(cosine_similarity(a, b) - cosine_similarity(b, a)) < 1e-12);
      CHECK(std::abs(cosine_similarity(a3, b) - cosine_similarity(a, b)) < 1e-12);
    }
  }
}

TEST_CASE("most_similar") {
  // small hand-made embedding
  Vocabulary vocab;
  for (auto t : {"a", "b", "c", "d", "e"}) {
    vocab.index.emplace(t, vocab.tokens.size());
    vocab.tokens.push_back(t);
    vocab.freq.push_back(1);
  }
  vocab.M = 5;
  EmbeddingMatrix emb;
  emb.M = 5;
  emb.D = 3;
  emb.vocab_hash = vocab_hash(vocab);
  std::mt19937_64 rng(77);
  std::normal_distribution<double> dist(0.0, 1.0);
  emb.vectors.resize(15);
  for (auto& v : emb.vectors) v = dist(rng);

  SECTION("k=0 gives an empty list") { CHECK(most_similar("a", emb, vocab, 0).empty()); }
  SECTION("k larger than M-1 clamps") {
    CHECK(most_similar("a", emb, vocab, 20).size() == 4);
  }
  SECTION("unknown token") {
    CHECK_THROWS_AS(most_similar("zz", emb, vocab, 3), UnknownTokenError);
  }
  SECTION("matches an exhaustive scan and stays sorted") {
    for (const auto& query : vocab.tokens) {
      auto top = most_similar(query, emb, vocab, 3);
      // brute force
      std::vector<std::pair<double, std::string>> all;
      const double* q = emb.row(vocab.id(query));
      for (std::size_t m = 0; m < emb.M; ++m) {
        if (vocab.tokens[m] == query) continue;
        all.emplace_back(cosine_similarity(q, emb.row(m), emb.D), vocab.tokens[m]);
      }
      std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) {
        if (x.first != y.first) return x.first > y.first;
        return x.second < y.second;
      });
      REQUIRE(top.size() == 3);
      for (std::size_t i = 0; i < top.size(); ++i) {
        CHECK(top[i].first == all[i].second);
        CHECK(top[i].second == Catch::Approx(all[i].first));
        CHECK(top[i].first != query);
        if (i > 0) CHECK(top[i].second <= top[i - 1].second);
      }
    }
  }
}

TEST_CASE("identical contexts cluster") {
  auto corpus = identical_context_corpus();
  auto vocab = build_vocabulary(corpus, 1);
  for (std::uint64_t seed : {1, 2}) {  // full 5-seed sweep runs in the acceptance suite
    CbowParams p;
    p.D = 50;
    p.epochs = 30;
    p.learning_rate = 0.05;
    p.seed = seed;
    auto emb = train_cbow(corpus, vocab, p);
    auto top = most_similar("wheat", emb, vocab, 20);
    bool corn_in_top3 = false;
    for (std::size_t i = 0; i < std::min<std::size_t>(3, top.size()); ++i)
      if (top[i].first == "corn") corn_in_top3 = true;
    CHECK(corn_in_top3);
    auto top2 = most_similar("corn", emb, vocab, 20);
    bool wheat_in_top3 = false;
    for (std::size_t i = 0; i < std::min<std::size_t>(3, top2.size()); ++i)
      if (top2[i].first == "wheat") wheat_in_top3 = true;
    CHECK(wheat_in_top3);
  }
}

TEST_CASE("embedding persistence") {
  auto corpus = corpus_from({"one two three four five", "two three four five six"});
  auto vocab = build_vocabulary(corpus, 1);
  CbowParams p;
  p.D = 50;
  p.epochs = 2;
  p.seed = 3;
  auto emb = train_cbow(corpus, vocab, p);
  auto path = (std::filesystem::temp_directory_path() / "emb_test.bin").string();
  save_embedding(emb, path);
  auto back = load_embedding(path);
  CHECK(back.M == emb.M);
  CHECK(back.D == emb.D);
  CHECK(back.vocab_hash == emb.vocab_hash);
  CHECK(back.vectors == emb.vectors);
  CHECK(embedding_hash(back) == embedding_hash(emb));
}
