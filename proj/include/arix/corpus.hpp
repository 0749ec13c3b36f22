// Corpus ingestion: plain-text articles -> section-labeled, normalized,
// sentence-segmented Document table.
#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "arix/errors.hpp"
#include "arix/hash.hpp"

namespace arix {

enum class Section {
  Abstract,
  Introduction,
  Methodology,
  Results,
  Discussion,
  Conclusions,
  References,
  Unknown,
};

inline const char* to_string(Section s) {
  switch (s) {
    case Section::Abstract: return "Abstract";
    case Section::Introduction: return "Introduction";
    case Section::Methodology: return "Methodology";
    case Section::Results: return "Results";
    case Section::Discussion: return "Discussion";
    case Section::Conclusions: return "Conclusions";
    case Section::References: return "References";
    case Section::Unknown: return "Unknown";
  }
  return "Unknown";
}

inline Section section_from_string(const std::string& name) {
  static const std::map<std::string, Section> table = {
      {"Abstract", Section::Abstract},       {"Introduction", Section::Introduction},
      {"Methodology", Section::Methodology}, {"Results", Section::Results},
      {"Discussion", Section::Discussion},   {"Conclusions", Section::Conclusions},
      {"References", Section::References},   {"Unknown", Section::Unknown}};
  auto it = table.find(name);
  if (it == table.end()) throw ConfigError("unknown section label: " + name);
  return it->second;
}

struct RawArticle {
  std::string article_id;
  std::string text;  // LF line endings
};

struct SectionSpan {
  Section label = Section::Unknown;
  std::size_t begin = 0;  // char range [begin, end) into SectionedArticle::text
  std::size_t end = 0;
};

struct SectionedArticle {
  std::string article_id;
  std::string text;
  std::vector<SectionSpan> spans;  // non-overlapping, ordered
};

struct Document {
  std::int64_t doc_id = -1;  // dense, assigned by build_corpus
  std::string article_id;
  Section section = Section::Unknown;
  std::int64_t sent_idx = 0;  // sentence index within the article
  std::string text;           // normalized, single line
};

struct Corpus {
  std::vector<Document> documents;
  std::size_t R = 0;  // article count
  std::size_t N = 0;  // document (sentence) count
};

// ---------------------------------------------------------------------------
// ingest

inline bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    unsigned char c = s[i];
    std::size_t extra;
    if (c < 0x80) extra = 0;
    else if ((c >> 5) == 0x6) extra = 1;
    else if ((c >> 4) == 0xE) extra = 2;
    else if ((c >> 3) == 0x1E) extra = 3;
    else return false;
    if (i + extra >= s.size()) return false;
    for (std::size_t k = 1; k <= extra; ++k)
      if ((static_cast<unsigned char>(s[i + k]) >> 6) != 0x2) return false;
    i += extra + 1;
  }
  return true;
}

inline RawArticle ingest_article(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failure on " + path.string());
  std::string text = buf.str();
  if (!valid_utf8(text)) throw EncodingError("invalid UTF-8 in " + path.string());
  // normalize line endings to LF
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\r') {
      out.push_back('\n');
      if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
    } else {
      out.push_back(text[i]);
    }
  }
  if (out.find_first_not_of(" \t\n") == std::string::npos)
    throw EmptyArticleError("article is empty: " + path.string());
  return RawArticle{path.stem().string(), std::move(out)};
}

// ---------------------------------------------------------------------------
// section labeling

struct HeadingPattern {
  Section label;
  std::regex re;  // matched against a heading line, numbering already stripped
};

using PatternSet = std::vector<HeadingPattern>;

inline PatternSet default_heading_patterns() {
  auto rx = [](const char* p) {
    return std::regex(p, std::regex::icase | std::regex::ECMAScript);
  };
  PatternSet ps;
  ps.push_back({Section::References, rx(R"(^(references|bibliography|literature\s+cited)\s*[:.]?\s*$)")});
  ps.push_back({Section::Abstract, rx(R"(^abstract\s*[:.]?\s*$)")});
  ps.push_back({Section::Introduction, rx(R"(^introduction\s*[:.]?\s*$)")});
  ps.push_back({Section::Methodology,
                rx(R"(^((materials\s+and\s+)?methods|methodology|experimental(\s+(part|section|methods))?)\s*[:.]?\s*$)")});
  ps.push_back({Section::Results, rx(R"(^results(\s+and\s+discussion)?\s*[:.]?\s*$)")});
  ps.push_back({Section::Conclusions, rx(R"(^conclusions?\s*[:.]?\s*$)")});
  ps.push_back({Section::Discussion, rx(R"(^discussion\s*[:.]?\s*$)")});
  return ps;
}

// Strips leading "2.", "3.1", "IV." style numbering from a candidate heading line.
inline std::string strip_heading_numbering(const std::string& line) {
  static const std::regex pre(R"(^\s*(?:(?:\d+(?:\.\d+)*|[IVXLC]+)[.\)]?\s+|\d+(?:\.\d+)*[.\)]?\s*)?)");
  std::smatch m;
  if (std::regex_search(line, m, pre)) return line.substr(m[0].length());
  return line;
}

inline SectionedArticle label_sections(const RawArticle& article, const PatternSet& patterns) {
  if (patterns.empty()) throw ConfigError("heading pattern set is empty");
  SectionedArticle out;
  out.article_id = article.article_id;
  out.text = article.text;

  struct Hit { std::size_t pos; Section label; };
  std::vector<Hit> hits;
  const std::string& t = out.text;
  std::size_t line_start = 0;
  while (line_start <= t.size()) {
    std::size_t line_end = t.find('\n', line_start);
    if (line_end == std::string::npos) line_end = t.size();
    std::string line = t.substr(line_start, line_end - line_start);
    if (!line.empty() && line.size() <= 80) {
      std::string stripped = strip_heading_numbering(line);
      for (const auto& p : patterns) {
        if (std::regex_search(stripped, p.re)) {
          hits.push_back({line_start, p.label});
          break;
        }
      }
    }
    if (line_end == t.size()) break;
    line_start = line_end + 1;
  }

  if (hits.empty()) {
    out.spans.push_back({Section::Unknown, 0, t.size()});
    return out;
  }
  if (hits.front().pos > 0) out.spans.push_back({Section::Unknown, 0, hits.front().pos});
  for (std::size_t i = 0; i < hits.size(); ++i) {
    std::size_t end = (i + 1 < hits.size()) ? hits[i + 1].pos : t.size();
    out.spans.push_back({hits[i].label, hits[i].pos, end});
  }
  return out;
}

inline SectionedArticle strip_references(const SectionedArticle& sectioned) {
  SectionedArticle out;
  out.article_id = sectioned.article_id;
  out.text = sectioned.text;
  for (const auto& s : sectioned.spans)
    if (s.label != Section::References) out.spans.push_back(s);
  return out;
}

// ---------------------------------------------------------------------------
// text normalization

// Versioned rule table; the paper does not enumerate its REGEX filters, so the
// shipped set is a reconstruction and results should cite this version.
inline const char* kNormalizeRulesVersion = "arix-normrules-1";

struct FilterSet {
  std::string version = kNormalizeRulesVersion;
  // regex rewrites applied in order, after the builtin superscript pass
  std::vector<std::pair<std::regex, std::string>> rules;
};

inline FilterSet default_filters() {
  FilterSet fs;
  auto rx = [](const char* p) { return std::regex(p, std::regex::ECMAScript); };
  // hyphenation repair at line breaks: "inhibi-\ntion" -> "inhibition"
  fs.rules.emplace_back(rx(R"(([a-z])-[ \t]*\n[ \t]*([a-z]))"), "$1$2");
  // split glued mass/volume compounds first: "mgmL-1" -> "mg mL-1"
  fs.rules.emplace_back(rx(R"((mg|µg|μg|ng|kg|g)(m?[Ll])(\^?-1))"), "$1 $2$3");
  // space between a number and a trailing unit token: "125mg" -> "125 mg"
  fs.rules.emplace_back(
      rx(R"(([0-9])(?!(?:st|nd|rd|th)\b)(°|µ|μ|(?=(?:mg|kg|ng|g|mmol|mol|mL|ml|L|l|cm|mm|nm|m|kJ|mJ|J|h|min|s)(?:[-^0-9\s,.;:)]|$))[A-Za-z]))"),
      "$1 $2");
  // canonical degree spacing: "° C" -> "°C"
  fs.rules.emplace_back(rx(R"(°\s+([CF])\b)"), "°$1");
  // whitespace collapse
  fs.rules.emplace_back(rx(R"(\s+)"), " ");
  return fs;
}

// Rewrites runs of unicode superscript digits (with optional superscript minus)
// to caret form: "m² g⁻¹" -> "m^2 g^-1".
inline std::string rewrite_superscripts(const std::string& text) {
  auto sup_digit = [](std::string_view s, std::size_t i, char* out) -> std::size_t {
    // ¹ U+00B9 (C2 B9), ² U+00B2 (C2 B2), ³ U+00B3 (C2 B3)
    if (i + 1 < s.size() && static_cast<unsigned char>(s[i]) == 0xC2) {
      unsigned char b = s[i + 1];
      if (b == 0xB9) { *out = '1'; return 2; }
      if (b == 0xB2) { *out = '2'; return 2; }
      if (b == 0xB3) { *out = '3'; return 2; }
    }
    // ⁰ U+2070, ⁴..⁹ U+2074..U+2079 (E2 81 B0, E2 81 B4..B9)
    if (i + 2 < s.size() && static_cast<unsigned char>(s[i]) == 0xE2 &&
        static_cast<unsigned char>(s[i + 1]) == 0x81) {
      unsigned char b = s[i + 2];
      if (b == 0xB0) { *out = '0'; return 3; }
      if (b >= 0xB4 && b <= 0xB9) { *out = static_cast<char>('4' + (b - 0xB4)); return 3; }
    }
    return 0;
  };
  auto sup_minus = [](std::string_view s, std::size_t i) -> std::size_t {
    // ⁻ U+207B (E2 81 BB)
    if (i + 2 < s.size() && static_cast<unsigned char>(s[i]) == 0xE2 &&
        static_cast<unsigned char>(s[i + 1]) == 0x81 &&
        static_cast<unsigned char>(s[i + 2]) == 0xBB)
      return 3;
    return 0;
  };

  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    bool neg = false;
    std::size_t j = i;
    if (std::size_t n = sup_minus(text, j)) { neg = true; j += n; }
    std::string digits;
    char d;
    while (std::size_t n = sup_digit(text, j, &d)) {
      digits.push_back(d);
      j += n;
    }
    if (!digits.empty()) {
      out.push_back('^');
      if (neg) out.push_back('-');
      out += digits;
      i = j;
    } else {
      out.push_back(text[i]);
      ++i;
    }
  }
  return out;
}

inline std::string normalize_text(const std::string& text, const FilterSet& filters) {
  std::string s = rewrite_superscripts(text);
  for (const auto& [re, repl] : filters.rules) s = std::regex_replace(s, re, repl);
  // trim
  std::size_t b = s.find_first_not_of(' ');
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(' ');
  return s.substr(b, e - b + 1);
}

inline std::string normalize_text(const std::string& text) {
  static const FilterSet fs = default_filters();
  return normalize_text(text, fs);
}

// Rebuilds a SectionedArticle with every span's text normalized (ranges
// recomputed). Labeled spans start at their heading line, which is metadata,
// not content; it is dropped here.
inline SectionedArticle normalize_sections(const SectionedArticle& sectioned, const FilterSet& filters) {
  SectionedArticle out;
  out.article_id = sectioned.article_id;
  for (const auto& sp : sectioned.spans) {
    std::size_t begin = sp.begin;
    if (sp.label != Section::Unknown) {
      const std::size_t nl = sectioned.text.find('\n', begin);
      begin = (nl == std::string::npos || nl >= sp.end) ? sp.end : nl + 1;
    }
    std::string norm = normalize_text(sectioned.text.substr(begin, sp.end - begin), filters);
    std::size_t b = out.text.size();
    out.text += norm;
    out.spans.push_back({sp.label, b, out.text.size()});
  }
  return out;
}

inline SectionedArticle normalize_sections(const SectionedArticle& sectioned) {
  static const FilterSet fs = default_filters();
  return normalize_sections(sectioned, fs);
}

// ---------------------------------------------------------------------------
// sentence segmentation

namespace detail {

inline const std::set<std::string>& abbreviation_guards() {
  static const std::set<std::string> g = {
      "e.g.", "i.e.", "al.", "fig.", "figs.", "tab.", "no.", "vs.", "cf.",
      "ca.", "sp.", "spp.", "approx.", "ref.", "refs.", "etc."};
  return g;
}

// True when the terminal punctuation at `pos` must not split (abbreviation or
// single-letter genus initial like "E." in "E. coli").
inline bool guarded(const std::string& s, std::size_t pos) {
  if (s[pos] != '.') return false;
  std::size_t w = pos;
  while (w > 0 && !std::isspace(static_cast<unsigned char>(s[w - 1]))) --w;
  std::string word = s.substr(w, pos - w + 1);  // includes the dot
  std::string lower = word;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (abbreviation_guards().count(lower)) return true;
  // single capital initial: "E."
  if (word.size() == 2 && std::isupper(static_cast<unsigned char>(word[0]))) return true;
  return false;
}

}  // namespace detail

inline std::vector<std::string> split_sentence_text(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  const std::size_t n = text.size();
  for (std::size_t i = 0; i < n; ++i) {
    char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;
    std::size_t j = i + 1;
    if (j >= n || !std::isspace(static_cast<unsigned char>(text[j]))) continue;
    while (j < n && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j >= n) continue;
    unsigned char next = text[j];
    if (!(std::isupper(next) || std::isdigit(next) || next == '(')) continue;
    if (detail::guarded(text, i)) continue;
    std::string sent = text.substr(start, i - start + 1);
    if (sent.find_first_not_of(' ') != std::string::npos) out.push_back(sent);
    start = j;
  }
  if (start < n) {
    std::string tail = text.substr(start);
    std::size_t b = tail.find_first_not_of(' ');
    if (b != std::string::npos) {
      std::size_t e = tail.find_last_not_of(' ');
      out.push_back(tail.substr(b, e - b + 1));
    }
  }
  return out;
}

inline std::vector<Document> split_sentences(const SectionedArticle& sectioned) {
  std::vector<Document> docs;
  std::int64_t sent_idx = 0;
  for (const auto& sp : sectioned.spans) {
    std::string span_text = sectioned.text.substr(sp.begin, sp.end - sp.begin);
    for (auto& sent : split_sentence_text(span_text)) {
      Document d;
      d.article_id = sectioned.article_id;
      d.section = sp.label;
      d.sent_idx = sent_idx++;
      d.text = std::move(sent);
      docs.push_back(std::move(d));
    }
  }
  return docs;
}

// Full single-article path: label -> strip references -> normalize -> segment.
inline std::vector<Document> process_article(const RawArticle& article,
                                             const PatternSet& patterns,
                                             const FilterSet& filters) {
  SectionedArticle sec = label_sections(article, patterns);
  sec = strip_references(sec);
  sec = normalize_sections(sec, filters);
  return split_sentences(sec);
}

inline std::vector<Document> process_article(const RawArticle& article) {
  return process_article(article, default_heading_patterns(), default_filters());
}

// ---------------------------------------------------------------------------
// corpus merge

inline Corpus build_corpus(const std::vector<std::vector<Document>>& articles) {
  Corpus corpus;
  std::set<std::string> seen;
  for (const auto& docs : articles) {
    std::set<std::string> ids;
    for (const auto& d : docs) ids.insert(d.article_id);
    for (const auto& id : ids) {
      if (!seen.insert(id).second)
        throw DuplicateArticleError("article id appears twice: " + id);
    }
    for (const auto& d : docs) {
      corpus.documents.push_back(d);
      corpus.documents.back().doc_id = static_cast<std::int64_t>(corpus.documents.size()) - 1;
    }
  }
  corpus.N = corpus.documents.size();
  // R counts articles that contributed documents
  std::set<std::string> present;
  for (const auto& d : corpus.documents) present.insert(d.article_id);
  corpus.R = present.size();
  return corpus;
}

inline std::uint64_t corpus_hash(const Corpus& corpus) {
  std::uint64_t h = kFnvOffset;
  h = fnv1a_u64(corpus.N, h);
  h = fnv1a_u64(corpus.R, h);
  for (const auto& d : corpus.documents) {
    h = fnv1a(d.article_id, h);
    h = fnv1a(to_string(d.section), h);
    h = fnv1a_u64(static_cast<std::uint64_t>(d.sent_idx), h);
    h = fnv1a(d.text, h);
  }
  return h;
}

}  // namespace arix
