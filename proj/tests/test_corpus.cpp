#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "arix/corpus.hpp"

using namespace arix;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& bytes) {
  fs::path p = fs::temp_directory_path() / name;
  std::ofstream out(p, std::ios::binary);
  out << bytes;
  return p;
}

}  // namespace

TEST_CASE("ingest_article") {
  SECTION("identity pass-through") {
    auto p = write_temp("a1.txt", "Abstract\nWe study X.");
    auto a = ingest_article(p);
    REQUIRE(a.article_id == "a1");
    REQUIRE(a.text == "Abstract\nWe study X.");
  }
  SECTION("empty file is rejected") {
    auto p = write_temp("empty.txt", "");
    REQUIRE_THROWS_AS(ingest_article(p), EmptyArticleError);
  }
  SECTION("CRLF becomes LF, byte for byte") {
    auto p = write_temp("crlf.txt", "line one\r\nline two\rline three\n");
    auto a = ingest_article(p);
    REQUIRE(a.text == "line one\nline two\nline three\n");
  }
  SECTION("invalid UTF-8 is rejected") {
    auto p = write_temp("bad.txt", std::string("ok \xff\xfe bytes"));
    REQUIRE_THROWS_AS(ingest_article(p), EncodingError);
  }
  SECTION("missing file") {
    REQUIRE_THROWS_AS(ingest_article("/nonexistent/path.txt"), IoError);
  }
}

TEST_CASE("label_sections") {
  const auto patterns = default_heading_patterns();

  SECTION("three headings produce three spans") {
    RawArticle a{"x", "Introduction\nA.\nMethods\nB.\nReferences\n[1] C."};
    auto sec = label_sections(a, patterns);
    REQUIRE(sec.spans.size() == 3);
    CHECK(sec.spans[0].label == Section::Introduction);
    CHECK(sec.spans[1].label == Section::Methodology);
    CHECK(sec.spans[2].label == Section::References);
    // spans partition the text, hand-checked against string positions
    CHECK(sec.spans[0].begin == 0);
    CHECK(sec.spans[0].end == a.text.find("Methods"));
    CHECK(sec.spans[1].end == a.text.find("References"));
    CHECK(sec.spans[2].end == a.text.size());
  }
  SECTION("no headings -> one Unknown span") {
    RawArticle a{"x", "just some text without structure"};
    auto sec = label_sections(a, patterns);
    REQUIRE(sec.spans.size() == 1);
    CHECK(sec.spans[0].label == Section::Unknown);
    CHECK(sec.spans[0].begin == 0);
    CHECK(sec.spans[0].end == a.text.size());
  }
  SECTION("uppercase combined heading maps to Results") {
    RawArticle a{"x", "Intro text.\nRESULTS AND DISCUSSION\nEverything worked."};
    auto sec = label_sections(a, patterns);
    REQUIRE(sec.spans.size() == 2);
    CHECK(sec.spans[0].label == Section::Unknown);
    CHECK(sec.spans[1].label == Section::Results);
    CHECK(sec.spans[1].begin == a.text.find("RESULTS"));
  }
  SECTION("numbered headings are recognized") {
    RawArticle a{"x", "2. Materials and Methods\nWe mixed things."};
    auto sec = label_sections(a, patterns);
    REQUIRE(sec.spans[0].label == Section::Methodology);
  }
  SECTION("every character belongs to exactly one span") {
    RawArticle a{"x", "preamble\nAbstract\nsummary\nIntroduction\nbody\nConclusions\nend"};
    auto sec = label_sections(a, patterns);
    std::size_t covered = 0;
    std::size_t expect = 0;
    for (const auto& sp : sec.spans) {
      CHECK(sp.begin == expect);
      covered += sp.end - sp.begin;
      expect = sp.end;
    }
    CHECK(covered == a.text.size());
  }
}

TEST_CASE("strip_references") {
  const auto patterns = default_heading_patterns();
  SECTION("references span removed, others kept") {
    RawArticle a{"x", "Introduction\nA.\nReferences\n[1] C."};
    auto sec = strip_references(label_sections(a, patterns));
    REQUIRE(sec.spans.size() == 1);
    CHECK(sec.spans[0].label == Section::Introduction);
  }
  SECTION("no references -> unchanged") {
    RawArticle a{"x", "Introduction\nA."};
    auto before = label_sections(a, patterns);
    auto after = strip_references(before);
    REQUIRE(after.spans.size() == before.spans.size());
  }
  SECTION("article that is all references yields nothing downstream") {
    RawArticle a{"x", "References\n[1] A.\n[2] B."};
    auto sec = strip_references(label_sections(a, patterns));
    CHECK(sec.spans.empty());
    CHECK(split_sentences(sec).empty());
  }
}

TEST_CASE("normalize_text") {
  const auto filters = default_filters();
  SECTION("canonical text is a fixed point") {
    CHECK(normalize_text("300 °C", filters) == "300 °C");
  }
  SECTION("unit spacing") {
    CHECK(normalize_text("345 m2g-1", filters) == "345 m2 g-1");
    CHECK(normalize_text("125mg", filters) == "125 mg");
    CHECK(normalize_text("mgmL-1", filters) == "mg mL-1");
  }
  SECTION("hyphenation repair") {
    CHECK(normalize_text("inhibi-\ntion", filters) == "inhibition");
  }
  SECTION("superscripts") {
    CHECK(normalize_text("m² g⁻¹", filters) == "m^2 g^-1");
    CHECK(normalize_text("10⁻³", filters) == "10^-3");
  }
  SECTION("scientific notation survives") {
    CHECK(normalize_text("1e5 and 2.5e-3", filters) == "1e5 and 2.5e-3");
  }
  SECTION("idempotence on fixtures") {
    const std::string fixtures[] = {
        "345 m2g-1 was measured",
        "inhibi-\ntion of E. coli at 300°C",
        "m² g⁻¹ and 10⁻³ mol L⁻¹",
        "  spaced   out\ttext \n with breaks ",
        "The MIC of 125mgmL-1 was found",
    };
    for (const auto& f : fixtures) {
      const std::string once = normalize_text(f, filters);
      CHECK(normalize_text(once, filters) == once);
    }
  }
}

TEST_CASE("split_sentences") {
  const auto patterns = default_heading_patterns();
  const auto filters = default_filters();

  auto docs_for = [&](const std::string& text) {
    RawArticle a{"x", text};
    return split_sentences(normalize_sections(strip_references(label_sections(a, patterns)),
                                              filters));
  };

  SECTION("two plain sentences inherit the span label") {
    auto docs = docs_for("Results\nA was done. B was seen.");
    REQUIRE(docs.size() == 2);
    CHECK(docs[0].text == "A was done.");
    CHECK(docs[1].text == "B was seen.");
    for (const auto& d : docs) CHECK(d.section == Section::Results);
  }
  SECTION("abbreviation guard keeps genus initials intact") {
    auto docs = docs_for("Similar to E. coli. Next we tested.");
    REQUIRE(docs.size() == 2);
    CHECK(docs[0].text == "Similar to E. coli.");
    CHECK(docs[1].text == "Next we tested.");
  }
  SECTION("heading-only span yields nothing") {
    RawArticle a{"x", "Introduction\n"};
    auto sec = normalize_sections(label_sections(a, patterns), filters);
    CHECK(split_sentences(sec).empty());
  }
  SECTION("sentence index counts across the whole article") {
    auto docs = docs_for("Introduction\nOne. Two.\nMethods\nThree.");
    std::vector<std::int64_t> idx;
    for (auto& d : docs) idx.push_back(d.sent_idx);
    for (std::size_t i = 0; i < idx.size(); ++i) CHECK(idx[i] == static_cast<std::int64_t>(i));
  }
}

TEST_CASE("build_corpus") {
  auto make_doc = [](const std::string& aid, int i) {
    Document d;
    d.article_id = aid;
    d.sent_idx = i;
    d.text = "sentence " + std::to_string(i);
    return d;
  };
  SECTION("counts and dense ids") {
    std::vector<std::vector<Document>> arts(2);
    for (int i = 0; i < 3; ++i) arts[0].push_back(make_doc("a", i));
    for (int i = 0; i < 4; ++i) arts[1].push_back(make_doc("b", i));
    auto corpus = build_corpus(arts);
    CHECK(corpus.N == 7);
    CHECK(corpus.R == 2);
    for (std::size_t i = 0; i < corpus.N; ++i)
      CHECK(corpus.documents[i].doc_id == static_cast<std::int64_t>(i));
  }
  SECTION("empty input") {
    auto corpus = build_corpus({});
    CHECK(corpus.N == 0);
    CHECK(corpus.R == 0);
  }
  SECTION("duplicate article id") {
    std::vector<std::vector<Document>> arts(2);
    arts[0].push_back(make_doc("a", 0));
    arts[1].push_back(make_doc("a", 0));
    REQUIRE_THROWS_AS(build_corpus(arts), DuplicateArticleError);
  }
}

TEST_CASE("corpus pipeline properties") {
  const std::string fixture =
      "Abstract\nWe study compounds. They are active.\n"
      "Introduction\nPlants make molecules. Similar to E. coli works exist.\n"
      "Methods\nLeaves were dried at 300°C. Extracts were filtered.\n"
      "Results\nThe MIC was 125 mg L-1. Yields reached 80 %.\n"
      "References\n[1] Someone. [2] Else.";

  SECTION("no document carries the References label") {
    auto docs = process_article(RawArticle{"f", fixture});
    for (const auto& d : docs) CHECK(d.section != Section::References);
    CHECK(!docs.empty());
  }
  SECTION("segmentation is deterministic") {
    auto d1 = process_article(RawArticle{"f", fixture});
    auto d2 = process_article(RawArticle{"f", fixture});
    REQUIRE(d1.size() == d2.size());
    for (std::size_t i = 0; i < d1.size(); ++i) {
      CHECK(d1[i].text == d2[i].text);
      CHECK(d1[i].section == d2[i].section);
    }
  }
  SECTION("per-article counts add up to N") {
    auto da = process_article(RawArticle{"a", fixture});
    auto db = process_article(RawArticle{"b", fixture});
    auto corpus = build_corpus({da, db});
    CHECK(corpus.N == da.size() + db.size());
    CHECK(corpus.R == 2);
  }
  SECTION("documents are single-line") {
    for (const auto& d : process_article(RawArticle{"f", fixture}))
      CHECK(d.text.find('\n') == std::string::npos);
  }
}
