#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>

#include "arix/bayes.hpp"

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

Vocabulary vocab_of(const std::vector<std::string>& tokens) {
  Vocabulary v;
  for (auto& t : tokens) {
    v.index.emplace(t, v.tokens.size());
    v.tokens.push_back(t);
    v.freq.push_back(1);
  }
  v.M = v.tokens.size();
  return v;
}

Document doc_of(const std::string& text) {
  Document d;
  d.article_id = "x";
  d.text = text;
  return d;
}

}  // namespace

TEST_CASE("fit_pmf") {
  auto vocab = vocab_of({"a", "b"});
  SECTION("hand count in the small-alpha limit") {
    auto pmf = fit_pmf({doc_of("a a b")}, vocab, 1e-12);
    CHECK(pmf.probs[0] == Catch::Approx(2.0 / 3.0).margin(1e-9));
    CHECK(pmf.probs[1] == Catch::Approx(1.0 / 3.0).margin(1e-9));
  }
  SECTION("no in-vocab tokens gives the uniform smoothed distribution") {
    auto pmf = fit_pmf({doc_of("zzz qqq")}, vocab, 0.7);
    CHECK(pmf.probs[0] == Catch::Approx(0.5));
    CHECK(pmf.probs[1] == Catch::Approx(0.5));
  }
  SECTION("probabilities sum to one for arbitrary inputs") {
    auto big_vocab = vocab_of({"a", "b", "c", "d", "e", "f"});
    for (double alpha : {0.1, 1.0, 5.0}) {
      auto pmf = fit_pmf({doc_of("a a a b c"), doc_of("d d e"), doc_of("f")}, big_vocab, alpha);
      double sum = 0.0;
      for (double p : pmf.probs) {
        sum += p;
        CHECK(p > 0.0);
      }
      CHECK(sum == Catch::Approx(1.0).margin(1e-9));
    }
  }
  SECTION("empty input") {
    CHECK_THROWS_AS(fit_pmf({}, vocab, 1.0), EmptyInputError);
  }
}

TEST_CASE("classify") {
  auto vocab = vocab_of({"a", "b"});

  SECTION("identical PMFs and even prior give exactly zero log odds") {
    BayesModel m;
    m.pmf_subject = fit_pmf({doc_of("a b")}, vocab, 1.0);
    m.pmf_background = m.pmf_subject;
    m.prior_subject = 0.5;
    auto [is_subject, lo] = classify(doc_of("a a b a b"), m, vocab);
    CHECK(lo == 0.0);
    CHECK_FALSE(is_subject);
  }
  SECTION("three tokens each 10x likelier add 3 ln 10") {
    BayesModel m;
    m.pmf_subject.probs = {0.5, 0.5};
    m.pmf_background.probs = {0.05, 0.5};
    m.prior_subject = 0.5;
    auto [is_subject, lo] = classify(doc_of("a a a"), m, vocab);
    CHECK(lo == Catch::Approx(3.0 * std::log(10.0)).margin(1e-12));
    CHECK(is_subject);
  }
  SECTION("log odds equal the enumerated Bayes-rule posterior") {
    BayesModel m;
    m.pmf_subject.probs = {0.7, 0.3};
    m.pmf_background.probs = {0.4, 0.6};
    m.prior_subject = 0.6;
    const std::string texts[] = {"a", "b", "a b", "a a b", "b b b a"};
    for (const auto& t : texts) {
      auto [is_subject, lo] = classify(doc_of(t), m, vocab);
      // direct enumeration: P(subject | doc) by Bayes rule with multiplicities
      double like_s = 1.0, like_b = 1.0;
      for (auto& tok : tokenize(t)) {
        like_s *= m.pmf_subject.probs[vocab.id(tok)];
        like_b *= m.pmf_background.probs[vocab.id(tok)];
      }
      const double post = m.prior_subject * like_s /
                          (m.prior_subject * like_s + (1.0 - m.prior_subject) * like_b);
      CHECK(lo == Catch::Approx(std::log(post / (1.0 - post))).margin(1e-9));
      CHECK(is_subject == (post > 0.5));
    }
  }
  SECTION("log odds are additive over a document split") {
    BayesModel m;
    m.pmf_subject.probs = {0.7, 0.3};
    m.pmf_background.probs = {0.4, 0.6};
    m.prior_subject = 0.5;  // zero prior term, so parts add exactly
    const double whole = classify(doc_of("a a b"), m, vocab).second;
    const double p1 = classify(doc_of("a a"), m, vocab).second;
    const double p2 = classify(doc_of("b"), m, vocab).second;
    CHECK(whole == Catch::Approx(p1 + p2).margin(1e-12));
  }
  SECTION("all-OOV document decides by prior alone") {
    BayesModel m;
    m.pmf_subject.probs = {0.7, 0.3};
    m.pmf_background.probs = {0.4, 0.6};
    m.prior_subject = 0.8;
    auto [is_subject, lo] = classify(doc_of("zzz yyy"), m, vocab);
    CHECK(lo == Catch::Approx(std::log(0.8 / 0.2)));
    CHECK(is_subject);
  }
  SECTION("doubling all counts barely moves the decision at fixed alpha") {
    auto big_vocab = vocab_of({"a", "b", "c", "d"});
    std::vector<Document> once;
    for (int i = 0; i < 50; ++i) {
      once.push_back(doc_of("a a b c"));
      once.push_back(doc_of("a b b d"));
    }
    std::vector<Document> twice = once;
    twice.insert(twice.end(), once.begin(), once.end());
    BayesModel m1, m2;
    m1.pmf_subject = fit_pmf(once, big_vocab, 1.0);
    m2.pmf_subject = fit_pmf(twice, big_vocab, 1.0);
    m1.pmf_background = fit_pmf({doc_of("c d d")}, big_vocab, 1.0);
    m2.pmf_background = m1.pmf_background;
    const double lo1 = classify(doc_of("a b"), m1, big_vocab).second;
    const double lo2 = classify(doc_of("a b"), m2, big_vocab).second;
    CHECK(std::abs(lo1 - lo2) < 0.01);
  }
}

TEST_CASE("fit_background") {
  // corpus and model kept tiny; correlations come from a real LSA fit
  std::vector<std::string> sents;
  for (int i = 0; i < 12; ++i) sents.push_back("crop wheat field harvest");
  for (int i = 0; i < 12; ++i) sents.push_back("engine fuel piston torque");
  auto corpus = corpus_from(sents);
  auto vocab = build_vocabulary(corpus, 1);
  auto tfidf = build_matrix(corpus, vocab, Weighting::tfidf);
  auto model = fit_lsa(tfidf, 4, vocab_hash(vocab), corpus_hash(corpus));
  TokenCluster crop;
  crop.subject = "crop";
  crop.members = {{"wheat", 1}, {"harvest", 1}};
  auto topic = make_topic_vector({crop}, model, vocab);

  SECTION("vacuous threshold admits every comparable doc") {
    auto pmf = fit_background(corpus, vocab, topic, model, 1.0, 100, 3);
    double sum = 0.0;
    for (double p : pmf.probs) sum += p;
    CHECK(sum == Catch::Approx(1.0).margin(1e-9));
  }
  SECTION("fixed seed reproduces the sample") {
    auto a = fit_background(corpus, vocab, topic, model, 0.9, 8, 5);
    auto b = fit_background(corpus, vocab, topic, model, 0.9, 8, 5);
    CHECK(a.probs == b.probs);
  }
  SECTION("threshold below every correlation leaves an empty pool") {
    CHECK_THROWS_AS(fit_background(corpus, vocab, topic, model, -2.0, 8, 5),
                    InsufficientSampleError);
  }
}

TEST_CASE("bayes persistence") {
  auto vocab = vocab_of({"a", "b", "c"});
  BayesModel m;
  m.pmf_subject = fit_pmf({doc_of("a a b")}, vocab, 1.0);
  m.pmf_background = fit_pmf({doc_of("c c b")}, vocab, 1.0);
  m.prior_subject = 0.4;
  m.vocab_hash = vocab_hash(vocab);
  auto path = (std::filesystem::temp_directory_path() / "bayes_test.json").string();
  save_bayes_model(m, path);
  auto back = load_bayes_model(path);
  CHECK(back.prior_subject == m.prior_subject);
  CHECK(back.vocab_hash == m.vocab_hash);
  REQUIRE(back.pmf_subject.probs.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.pmf_subject.probs[i] == Catch::Approx(m.pmf_subject.probs[i]).margin(1e-12));
    CHECK(back.pmf_background.probs[i] ==
          Catch::Approx(m.pmf_background.probs[i]).margin(1e-12));
  }
  const double lo_orig = classify(doc_of("a b c"), m, vocab).second;
  const double lo_back = classify(doc_of("a b c"), back, vocab).second;
  CHECK(lo_back == Catch::Approx(lo_orig).margin(1e-9));
}
