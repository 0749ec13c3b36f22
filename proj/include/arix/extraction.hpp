// Literal-search patterns, physical-unit recognition, and the categorical /
// numerical extractors (All-Val and Grouped-Val modes).
#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "arix/corpus.hpp"
#include "arix/errors.hpp"
#include "arix/semantic.hpp"
#include "arix/tokenize.hpp"

namespace arix {

// ---------------------------------------------------------------------------
// unit table

struct UnitEntry {
  std::string pattern;  // regex, matched case-insensitively at a token start
  std::string canonical;
  double scale = 1.0;
  std::regex re;
};

struct UnitTable {
  int version = 1;
  // unit class -> surface entries; longest match wins across all classes
  std::map<std::string, std::vector<UnitEntry>> classes;

  void compile() {
    for (auto& [cls, entries] : classes)
      for (auto& e : entries)
        e.re = std::regex(e.pattern, std::regex::icase | std::regex::ECMAScript);
  }
  bool has_class(const std::string& cls) const { return classes.count(cls) != 0; }
};

// Built-in table; also shipped as data/units.json so new units can be added
// without a rebuild. Patterns assume normalize_text output ("m^2 g^-1" style;
// superscripts already rewritten).
inline UnitTable default_unit_table() {
  UnitTable t;
  auto add = [&](const std::string& cls, const char* pattern, const char* canonical,
                 double scale) { t.classes[cls].push_back({pattern, canonical, scale, {}}); };

  // mass per volume
  add("conc", R"(kg\s*(?:/\s*L|L\s*\^?-1)(?![\w^]))", "g L-1", 1e3);
  add("conc", R"(mg\s*(?:/\s*mL|mL\s*\^?-1)(?![\w^]))", "g L-1", 1.0);
  add("conc", R"(mg\s*(?:/\s*L|L\s*\^?-1)(?![\w^]))", "g L-1", 1e-3);
  add("conc", R"((?:µ|μ|u)g\s*(?:/\s*mL|mL\s*\^?-1)(?![\w^]))", "g L-1", 1e-3);
  add("conc", R"((?:µ|μ|u)g\s*(?:/\s*L|L\s*\^?-1)(?![\w^]))", "g L-1", 1e-6);
  add("conc", R"(ng\s*(?:/\s*mL|mL\s*\^?-1)(?![\w^]))", "g L-1", 1e-6);
  add("conc", R"(g\s*(?:/\s*mL|mL\s*\^?-1)(?![\w^]))", "g L-1", 1e3);
  add("conc", R"(g\s*(?:/\s*L|L\s*\^?-1)(?![\w^]))", "g L-1", 1.0);
  // molarity (not convertible to conc without a molar mass)
  add("molar", R"(mmol\s*(?:/\s*L|L\s*\^?-1)(?![\w^]))", "mol L-1", 1e-3);
  add("molar", R"((?:µ|μ|u)mol\s*(?:/\s*L|L\s*\^?-1)(?![\w^]))", "mol L-1", 1e-6);
  add("molar", R"(nmol\s*(?:/\s*L|L\s*\^?-1)(?![\w^]))", "mol L-1", 1e-9);
  add("molar", R"(mol\s*(?:/\s*L|L\s*\^?-1)(?![\w^]))", "mol L-1", 1.0);
  add("molar", R"(mM(?![\w^]))", "mol L-1", 1e-3);
  // temperature
  add("temperature", R"(°\s*C(?![\w^]))", "°C", 1.0);
  add("temperature", R"(deg\s*C(?![\w^]))", "°C", 1.0);
  // surface area per mass
  add("area_per_mass", R"(m\s*\^?2\s*(?:/\s*g|g\s*\^?-1)(?![\w^]))", "m2 g-1", 1.0);
  add("area_per_mass", R"(cm\s*\^?2\s*(?:/\s*g|g\s*\^?-1)(?![\w^]))", "m2 g-1", 1e-4);
  // mass
  add("mass", R"(kg(?![\w^]))", "g", 1e3);
  add("mass", R"(mg(?![\w^-]))", "g", 1e-3);
  add("mass", R"((?:µ|μ|u)g(?![\w^-]))", "g", 1e-6);
  add("mass", R"(ng(?![\w^-]))", "g", 1e-9);
  add("mass", R"(g(?![\w^-]))", "g", 1.0);
  // volume
  add("volume", R"(mL(?![\w^-]))", "L", 1e-3);
  add("volume", R"((?:µ|μ|u)L(?![\w^-]))", "L", 1e-6);
  add("volume", R"(L(?![\w^-]))", "L", 1.0);
  // energy
  add("energy", R"(kJ(?![\w^-]))", "J", 1e3);
  add("energy", R"(mJ(?![\w^-]))", "J", 1e-3);
  add("energy", R"(J(?![\w^-]))", "J", 1.0);
  // time
  add("time", R"(ms(?![\w^-]))", "s", 1e-3);
  add("time", R"(min(?:utes?|s)?(?![\w^-]))", "s", 60.0);
  add("time", R"(h(?:ours?|rs?)?(?![\w^-]))", "s", 3600.0);
  add("time", R"(s(?:econds?)?(?![\w^-]))", "s", 1.0);
  add("time", R"(days?(?![\w^-]))", "s", 86400.0);
  // length
  add("length", R"(km(?![\w^-]))", "m", 1e3);
  add("length", R"(cm(?![\w^-]))", "m", 1e-2);
  add("length", R"(mm(?![\w^-]))", "m", 1e-3);
  add("length", R"((?:µ|μ|u)m(?![\w^-]))", "m", 1e-6);
  add("length", R"(nm(?![\w^-]))", "m", 1e-9);
  add("length", R"(m(?![\w^-]))", "m", 1.0);
  // percentage and dimensionless ratios
  add("percentage", R"((?:wt\.?\s*|vol\.?\s*|mol\s*)?%)", "%", 1.0);
  add("dimensionless", R"(w\s*/\s*w(?![\w^]))", "ratio", 1.0);
  add("dimensionless", R"(v\s*/\s*v(?![\w^]))", "ratio", 1.0);

  t.compile();
  return t;
}

inline UnitTable load_unit_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  nlohmann::json j;
  in >> j;
  if (j.value("format", "") != "arix-units") throw IoError("not an arix unit table");
  UnitTable t;
  t.version = j.value("version", 1);
  for (auto& [cls, arr] : j.at("classes").items())
    for (auto& e : arr)
      t.classes[cls].push_back({e.at("pattern").get<std::string>(),
                                e.at("canonical").get<std::string>(),
                                e.at("scale").get<double>(),
                                {}});
  t.compile();
  return t;
}

inline void save_unit_table(const UnitTable& t, const std::string& path) {
  nlohmann::json j;
  j["format"] = "arix-units";
  j["version"] = t.version;
  for (const auto& [cls, entries] : t.classes) {
    auto arr = nlohmann::json::array();
    for (const auto& e : entries)
      arr.push_back({{"pattern", e.pattern}, {"canonical", e.canonical}, {"scale", e.scale}});
    j["classes"][cls] = std::move(arr);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// number scanner

struct NumberToken {
  double lo = 0.0, hi = 0.0;  // lo == hi unless a range like "300-700"
  bool is_range = false;
  int int_digits = 0;  // digits before the decimal point, as written
  std::size_t begin = 0, end = 0;
};

namespace detail {

// A number may not start inside an identifier ("X300"), after a decimal
// point, after '^' (exponent notation), or after a letter-hyphen ("g-1").
inline bool number_can_start(const std::string& s, std::size_t i) {
  if (i == 0) return true;
  const unsigned char prev = s[i - 1];
  if (std::isalnum(prev) || prev == '.' || prev == '_' || prev == '^') return false;
  if (prev == '-' && i >= 2) {
    const unsigned char p2 = s[i - 2];
    if (std::isalnum(p2) || p2 == '^') return false;
  }
  return true;
}

// Parses an unsigned decimal (with optional fraction and exponent) at `i`.
inline bool parse_number(const std::string& s, std::size_t i, double* value, int* int_digits,
                         std::size_t* end) {
  std::size_t j = i;
  int digits = 0;
  while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
    ++digits;
    ++j;
  }
  if (digits == 0) return false;
  if (j < s.size() && s[j] == '.' && j + 1 < s.size() &&
      std::isdigit(static_cast<unsigned char>(s[j + 1]))) {
    ++j;
    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
  }
  if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
    std::size_t k = j + 1;
    if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
    if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
      j = k;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
    }
  }
  *value = std::strtod(s.c_str() + i, nullptr);
  *int_digits = digits;
  *end = j;
  return true;
}

// Matches a range dash at `i`: '-', en dash, em dash or minus sign.
inline std::size_t range_dash(const std::string& s, std::size_t i) {
  if (i < s.size() && s[i] == '-') return 1;
  if (i + 2 < s.size() && static_cast<unsigned char>(s[i]) == 0xE2) {
    const unsigned char b1 = s[i + 1], b2 = s[i + 2];
    if (b1 == 0x80 && (b2 == 0x93 || b2 == 0x94)) return 3;  // – —
    if (b1 == 0x88 && b2 == 0x92) return 3;                  // −
  }
  return 0;
}

}  // namespace detail

inline std::vector<NumberToken> scan_numbers(const std::string& text) {
  std::vector<NumberToken> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!std::isdigit(static_cast<unsigned char>(text[i])) ||
        !detail::number_can_start(text, i)) {
      ++i;
      continue;
    }
    NumberToken tok;
    tok.begin = i;
    double v = 0.0;
    int digits = 0;
    std::size_t end = 0;
    if (!detail::parse_number(text, i, &v, &digits, &end)) {
      ++i;
      continue;
    }
    tok.lo = tok.hi = v;
    tok.int_digits = digits;
    tok.end = end;

    // range: number dash number (optionally one space around the dash)
    std::size_t k = end;
    std::size_t spaces = 0;
    while (k < text.size() && text[k] == ' ' && spaces < 1) { ++k; ++spaces; }
    if (std::size_t dl = detail::range_dash(text, k)) {
      std::size_t m = k + dl;
      spaces = 0;
      while (m < text.size() && text[m] == ' ' && spaces < 1) { ++m; ++spaces; }
      double hi = 0.0;
      int hd = 0;
      std::size_t hend = 0;
      if (m < text.size() && std::isdigit(static_cast<unsigned char>(text[m])) &&
          detail::parse_number(text, m, &hi, &hd, &hend)) {
        tok.hi = hi;
        tok.is_range = true;
        tok.end = hend;
      }
    }
    out.push_back(tok);
    i = tok.end;
  }
  return out;
}

// ---------------------------------------------------------------------------
// value scanning: enumeration groups share the unit that closes them

struct ValueHit {
  double value = 0.0;      // as written
  double canonical = 0.0;  // value * scale
  double scale = 1.0;
  bool is_range = false;
  double value_hi = 0.0;  // for ranges
  int int_digits = 0;
  std::string unit_class;
  std::string canonical_unit;
  std::size_t begin = 0;  // number position in the sentence
};

namespace detail {

struct UnitMatch {
  std::string unit_class, canonical;
  double scale = 1.0;
  std::size_t length = 0;
};

// Longest unit match across all classes, anchored at one of the first two
// token starts after `from` (leading brackets are skipped).
inline std::optional<UnitMatch> find_unit(const std::string& text, std::size_t from,
                                          const UnitTable& units) {
  std::vector<std::size_t> offsets;
  std::size_t i = from;
  for (int tok = 0; tok < 2 && i < text.size(); ++tok) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '(' || text[i] == '[')) ++i;
    if (i >= text.size()) break;
    offsets.push_back(i);
    while (i < text.size() && text[i] != ' ') ++i;
  }
  for (std::size_t off : offsets) {
    UnitMatch best;
    bool found = false;
    for (const auto& [cls, entries] : units.classes) {
      for (const auto& e : entries) {
        std::smatch m;
        std::string tail = text.substr(off);
        if (std::regex_search(tail, m, e.re, std::regex_constants::match_continuous)) {
          if (!found || m[0].length() > static_cast<std::ptrdiff_t>(best.length)) {
            best = {cls, e.canonical, e.scale, static_cast<std::size_t>(m[0].length())};
            found = true;
          }
        }
      }
    }
    if (found) return best;
  }
  return std::nullopt;
}

// True when the slice contains only list separators (",", ";", "and", "or",
// "to", "&"), so adjacent numbers belong to one enumeration group.
inline bool separator_only(const std::string& text, std::size_t begin, std::size_t end) {
  std::string token;
  for (std::size_t i = begin; i < end; ++i) {
    const char c = text[i];
    if (c == ' ' || c == ',' || c == ';' || c == '&') {
      if (!token.empty()) return false;
      continue;
    }
    token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (token == "and" || token == "or" || token == "to") {
      const bool boundary = i + 1 >= end || text[i + 1] == ' ' || text[i + 1] == ',';
      if (boundary) token.clear();
    } else if (token.size() > 3) {
      return false;
    }
  }
  return token.empty();
}

}  // namespace detail

// All unit-bearing numeric values in a sentence, in order of appearance.
// Comma/"and" enumerations share the unit that follows the last number.
inline std::vector<ValueHit> scan_values(const std::string& text, const UnitTable& units) {
  const auto numbers = scan_numbers(text);
  std::vector<ValueHit> out;
  std::size_t g = 0;
  while (g < numbers.size()) {
    std::size_t h = g;
    while (h + 1 < numbers.size() &&
           detail::separator_only(text, numbers[h].end, numbers[h + 1].begin))
      ++h;
    const auto unit = detail::find_unit(text, numbers[h].end, units);
    if (unit) {
      for (std::size_t i = g; i <= h; ++i) {
        ValueHit hit;
        hit.value = numbers[i].lo;
        hit.value_hi = numbers[i].hi;
        hit.is_range = numbers[i].is_range;
        hit.int_digits = numbers[i].int_digits;
        hit.canonical = numbers[i].lo * unit->scale;
        hit.scale = unit->scale;
        hit.unit_class = unit->unit_class;
        hit.canonical_unit = unit->canonical;
        hit.begin = numbers[i].begin;
        out.push_back(hit);
      }
    }
    g = h + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// pattern DSL: "[isolat*, extract*]" or "[n{1,4}{conc}]"

struct LiteralPattern {
  enum class Kind { token_wildcard, numeric_unit };
  Kind kind = Kind::token_wildcard;
  struct Stem {
    std::string text;  // lowercase
    bool wildcard = false;
  };
  std::vector<Stem> stems;  // OR semantics
  int digits_min = 1, digits_max = 9;
  std::string unit_class;
  std::string source;
};

inline LiteralPattern compile_pattern(const std::string& spec) {
  auto fail = [&](std::size_t pos, const std::string& why) {
    throw DslSyntaxError("pattern \"" + spec + "\" at position " + std::to_string(pos) + ": " +
                         why);
  };
  std::size_t b = spec.find_first_not_of(" \t");
  std::size_t e = spec.find_last_not_of(" \t");
  if (b == std::string::npos || spec[b] != '[') fail(0, "expected '['");
  if (spec[e] != ']') fail(e, "expected ']'");

  // split on commas outside braces
  std::vector<std::pair<std::string, std::size_t>> items;
  std::string cur;
  std::size_t cur_pos = b + 1;
  int depth = 0;
  for (std::size_t i = b + 1; i < e; ++i) {
    const char c = spec[i];
    if (c == '{') ++depth;
    if (c == '}') --depth;
    if (c == ',' && depth == 0) {
      items.emplace_back(cur, cur_pos);
      cur.clear();
      cur_pos = i + 1;
    } else {
      cur.push_back(c);
    }
  }
  items.emplace_back(cur, cur_pos);

  LiteralPattern pat;
  pat.source = spec;
  bool kind_set = false;
  static const std::regex numeric_re(R"(^n\{(\d+),(\d+)\}\{([A-Za-z0-9_]+)\}$)");
  static const std::regex stem_re(R"(^[A-Za-z0-9µμ°'^.\-]+\*?$)");

  for (auto& [raw, pos] : items) {
    std::string item = raw;
    const std::size_t ib = item.find_first_not_of(" \t");
    if (ib == std::string::npos) fail(pos, "empty alternative");
    const std::size_t ie = item.find_last_not_of(" \t");
    item = item.substr(ib, ie - ib + 1);

    std::smatch m;
    if (std::regex_match(item, m, numeric_re)) {
      if (kind_set && pat.kind != LiteralPattern::Kind::numeric_unit)
        fail(pos, "cannot mix token and numeric items");
      pat.kind = LiteralPattern::Kind::numeric_unit;
      kind_set = true;
      pat.digits_min = std::stoi(m[1]);
      pat.digits_max = std::stoi(m[2]);
      pat.unit_class = m[3];
      if (pat.digits_min < 1 || pat.digits_max > 9 || pat.digits_min > pat.digits_max)
        fail(pos, "digit range must satisfy 1 <= min <= max <= 9");
    } else if (std::regex_match(item, stem_re)) {
      if (kind_set && pat.kind != LiteralPattern::Kind::token_wildcard)
        fail(pos, "cannot mix token and numeric items");
      pat.kind = LiteralPattern::Kind::token_wildcard;
      kind_set = true;
      LiteralPattern::Stem s;
      s.wildcard = item.back() == '*';
      s.text = s.wildcard ? item.substr(0, item.size() - 1) : item;
      if (s.text.empty()) fail(pos, "empty stem");
      for (auto& c : s.text) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      pat.stems.push_back(std::move(s));
    } else {
      fail(pos, "unrecognized item \"" + item + "\"");
    }
  }
  return pat;
}

inline bool match_pattern(const Document& doc, const LiteralPattern& pattern,
                          const UnitTable& units) {
  if (pattern.kind == LiteralPattern::Kind::token_wildcard) {
    for (auto& tok : tokenize(doc.text)) {
      for (const auto& s : pattern.stems) {
        if (s.wildcard ? tok.rfind(s.text, 0) == 0 : tok == s.text) return true;
      }
    }
    return false;
  }
  if (!units.has_class(pattern.unit_class)) return false;
  for (const auto& hit : scan_values(doc.text, units)) {
    if (hit.unit_class != pattern.unit_class) continue;
    if (hit.int_digits >= pattern.digits_min && hit.int_digits <= pattern.digits_max) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// categorical extractor

using AliasMap = std::map<std::string, std::string>;

inline AliasMap load_alias_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  AliasMap m;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) continue;
    m.emplace(line.substr(0, tab), line.substr(tab + 1));
  }
  return m;
}

// Folds a regular plural to its singular ("olives" -> "olive"); used as a
// matching fallback so Latin -us/-is epithets stay untouched.
inline std::string fold_plural(const std::string& token) {
  const auto ends = [&](const char* suf) {
    const std::size_t n = std::strlen(suf);
    return token.size() > n && token.compare(token.size() - n, n, suf) == 0;
  };
  if (ends("ies")) return token.substr(0, token.size() - 3) + "y";
  if (ends("ses") || ends("xes") || ends("zes") || ends("ches") || ends("shes"))
    return token.substr(0, token.size() - 2);
  if (token.size() > 3 && token.back() == 's' && !ends("ss") && !ends("us") && !ends("is"))
    return token.substr(0, token.size() - 1);
  return token;
}

// Cluster n-grams present in the sentence, longest match first (a matched
// 2-gram shadows its constituent 1-grams). Surface forms are reported after
// plural folding and alias mapping.
inline std::vector<std::string> extract_categorical(const Document& doc,
                                                    const TokenCluster& cluster,
                                                    const AliasMap& aliases = {}) {
  const auto surface = tokenize(doc.text, /*lowercase=*/false);
  std::vector<std::string> lower(surface.size());
  for (std::size_t i = 0; i < surface.size(); ++i) {
    lower[i] = surface[i];
    for (auto& c : lower[i]) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }

  // candidate forms per position: exact, alias(exact), folded, alias(folded)
  struct Form { std::string text; bool folded; bool aliased; };
  std::vector<std::vector<Form>> forms(surface.size());
  for (std::size_t i = 0; i < surface.size(); ++i) {
    forms[i].push_back({lower[i], false, false});
    if (auto it = aliases.find(lower[i]); it != aliases.end())
      forms[i].push_back({it->second, false, true});
    const std::string folded = fold_plural(lower[i]);
    if (folded != lower[i]) {
      forms[i].push_back({folded, true, false});
      if (auto it = aliases.find(folded); it != aliases.end())
        forms[i].push_back({it->second, true, true});
    }
  }

  struct Term { std::vector<std::string> tokens; };
  std::vector<Term> terms;
  for (const auto& t : cluster.all_terms()) {
    Term term{tokenize(t)};
    if (!term.tokens.empty()) terms.push_back(std::move(term));
  }
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return a.tokens.size() > b.tokens.size(); });

  std::vector<char> consumed(surface.size(), 0);
  std::vector<std::pair<std::size_t, std::string>> found;  // (position, reported form)

  for (const auto& term : terms) {
    const std::size_t n = term.tokens.size();
    if (n == 0 || n > surface.size()) continue;
    for (std::size_t i = 0; i + n <= surface.size(); ++i) {
      bool blocked = false;
      for (std::size_t k = 0; k < n; ++k)
        if (consumed[i + k]) blocked = true;
      if (blocked) continue;

      std::vector<std::string> reported(n);
      bool ok = true;
      for (std::size_t k = 0; k < n && ok; ++k) {
        ok = false;
        for (const auto& f : forms[i + k]) {
          if (f.text != term.tokens[k]) continue;
          // report the surface form, folded or aliased as matched
          if (f.aliased) reported[k] = f.text;
          else if (f.folded) reported[k] = fold_plural(surface[i + k]);
          else reported[k] = surface[i + k];
          ok = true;
          break;
        }
      }
      if (!ok) continue;
      for (std::size_t k = 0; k < n; ++k) consumed[i + k] = 1;
      std::string joined;
      for (std::size_t k = 0; k < n; ++k) {
        if (k) joined += ' ';
        joined += reported[k];
      }
      found.emplace_back(i, std::move(joined));
    }
  }

  std::sort(found.begin(), found.end());
  std::vector<std::string> out;
  for (auto& [pos, term] : found)
    if (std::find(out.begin(), out.end(), term) == out.end()) out.push_back(term);
  return out;
}

// ---------------------------------------------------------------------------
// numerical extractor

enum class ExtractMode { av, gv };

inline const char* to_string(ExtractMode m) { return m == ExtractMode::av ? "AV" : "GV"; }

struct ParameterSpec {
  std::string name;        // e.g. "synthesis temperature"
  std::string unit_class;  // e.g. "temperature"
  bool strict_single = false;  // AV: use only sentences with exactly one value
};

struct GroupStats {
  std::size_t count = 0;
  double lo = 0.0, hi = 0.0, avg = 0.0;
  std::optional<double> median;
  std::optional<double> stddev;
};

struct ScanColumn {
  std::string parameter;
  std::string unit_class;
  std::string canonical_unit;
  std::vector<std::optional<double>> cells;  // AV: one per index
  std::optional<GroupStats> group;           // GV
  std::vector<std::int64_t> source_doc_ids;
};

struct IndexedValues {
  std::string article_id;
  ExtractMode mode = ExtractMode::av;
  std::size_t index_count = 0;  // fixed by the first scan (AV); 1 for GV
  std::vector<ScanColumn> scans;
};

namespace detail {

inline std::vector<ValueHit> doc_values(const Document& doc, const std::string& unit_class,
                                        const UnitTable& units) {
  std::vector<ValueHit> hits;
  for (auto& h : scan_values(doc.text, units))
    if (h.unit_class == unit_class) hits.push_back(h);
  return hits;
}

}  // namespace detail

// AV mode. First scan (no prior): the first sentence carrying values of the
// parameter's unit class fixes the indexes i_1..i_n1 in order of appearance.
// Later scans extract only when the candidate sentence yields exactly n1
// values (paired by order of appearance); otherwise every index gets None.
inline IndexedValues extract_numeric_av(const std::vector<Document>& article_docs,
                                        const ParameterSpec& param, const UnitTable& units,
                                        const IndexedValues* prior = nullptr) {
  if (!units.has_class(param.unit_class))
    throw ConfigError("unknown unit class: " + param.unit_class);

  // candidate sentence: first doc with matching values (strict: exactly one)
  std::vector<ValueHit> values;
  std::int64_t source_doc = -1;
  for (const auto& doc : article_docs) {
    auto hits = detail::doc_values(doc, param.unit_class, units);
    if (hits.empty()) continue;
    if (param.strict_single && hits.size() != 1) continue;
    values = std::move(hits);
    source_doc = doc.doc_id;
    break;
  }

  std::string article_id = article_docs.empty() ? "" : article_docs.front().article_id;
  ScanColumn col;
  col.parameter = param.name;
  col.unit_class = param.unit_class;
  col.canonical_unit = values.empty() ? "" : values.front().canonical_unit;
  if (source_doc >= 0) col.source_doc_ids.push_back(source_doc);

  if (prior == nullptr) {
    IndexedValues iv;
    iv.article_id = article_id;
    iv.mode = ExtractMode::av;
    iv.index_count = values.size();  // n1
    for (const auto& v : values) col.cells.emplace_back(v.canonical);
    iv.scans.push_back(std::move(col));
    return iv;
  }

  if (prior->mode != ExtractMode::av)
    throw NoPriorIndexError("AV scan requires an AV prior");
  for (const auto& sc : prior->scans)
    if (sc.cells.size() != prior->index_count)
      throw NoPriorIndexError("malformed prior: column width != index count");

  IndexedValues iv = *prior;
  const std::size_t n1 = iv.index_count;
  const std::size_t n2 = values.size();
  if (n2 == n1 && n1 > 0) {
    for (const auto& v : values) col.cells.emplace_back(v.canonical);
  } else {
    // n2 != n1: extraction canceled, None for every index
    col.cells.assign(n1, std::nullopt);
    col.canonical_unit = "";
    col.source_doc_ids.clear();
  }
  iv.scans.push_back(std::move(col));
  return iv;
}

// GV mode: all values of the parameter across the article's sentences pool
// into the single index i_1; summary statistics describe the pool.
inline IndexedValues extract_numeric_gv(const std::vector<Document>& article_docs,
                                        const ParameterSpec& param, const UnitTable& units,
                                        const IndexedValues* prior = nullptr) {
  if (!units.has_class(param.unit_class))
    throw ConfigError("unknown unit class: " + param.unit_class);

  std::vector<double> pool;
  ScanColumn col;
  col.parameter = param.name;
  col.unit_class = param.unit_class;
  for (const auto& doc : article_docs) {
    auto hits = detail::doc_values(doc, param.unit_class, units);
    if (!hits.empty()) col.source_doc_ids.push_back(doc.doc_id);
    for (const auto& h : hits) {
      pool.push_back(h.canonical);
      if (h.is_range) pool.push_back(h.value_hi * h.scale);
      if (col.canonical_unit.empty()) col.canonical_unit = h.canonical_unit;
    }
  }

  if (!pool.empty()) {
    GroupStats st;
    st.count = pool.size();
    std::vector<double> sorted = pool;
    std::sort(sorted.begin(), sorted.end());
    st.lo = sorted.front();
    st.hi = sorted.back();
    double sum = 0.0;
    for (double v : pool) sum += v;
    st.avg = sum / static_cast<double>(pool.size());
    if (pool.size() > 10) {
      const std::size_t n = sorted.size();
      st.median = (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
      double ss = 0.0;
      for (double v : pool) ss += (v - st.avg) * (v - st.avg);
      st.stddev = std::sqrt(ss / static_cast<double>(n - 1));
    }
    col.group = st;
  }

  IndexedValues iv;
  if (prior != nullptr) {
    if (prior->mode != ExtractMode::gv)
      throw NoPriorIndexError("GV scan requires a GV prior");
    iv = *prior;
  } else {
    iv.article_id = article_docs.empty() ? "" : article_docs.front().article_id;
    iv.mode = ExtractMode::gv;
    iv.index_count = 1;
  }
  iv.scans.push_back(std::move(col));
  return iv;
}

// ---------------------------------------------------------------------------
// CSV output

namespace detail {

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

inline std::string format_value(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace detail

struct CategoricalRecord {
  std::string article_id;
  std::string parameter;  // cluster subject
  std::string value;      // matched n-gram
  std::int64_t source_doc_id = -1;
};

inline void write_extraction_csv(const std::vector<IndexedValues>& numeric,
                                 const std::vector<CategoricalRecord>& categorical,
                                 std::ostream& out) {
  out << "article_id,parameter,index,values,canonical_unit,source_doc_id,mode\n";
  for (const auto& rec : categorical) {
    out << detail::csv_escape(rec.article_id) << ',' << detail::csv_escape(rec.parameter)
        << ",," << detail::csv_escape(rec.value) << ",," << rec.source_doc_id << ",CAT\n";
  }
  for (const auto& iv : numeric) {
    for (const auto& col : iv.scans) {
      const std::string src =
          col.source_doc_ids.empty() ? "" : std::to_string(col.source_doc_ids.front());
      if (iv.mode == ExtractMode::av) {
        for (std::size_t i = 0; i < col.cells.size(); ++i) {
          out << detail::csv_escape(iv.article_id) << ',' << detail::csv_escape(col.parameter)
              << ",i" << (i + 1) << ','
              << (col.cells[i] ? detail::format_value(*col.cells[i]) : "None") << ','
              << detail::csv_escape(col.canonical_unit) << ',' << src << ",AV\n";
        }
      } else {
        std::string values;
        if (col.group) {
          values = detail::format_value(col.group->lo);
          if (col.group->hi != col.group->lo) values += "-" + detail::format_value(col.group->hi);
        } else {
          values = "None";
        }
        out << detail::csv_escape(iv.article_id) << ',' << detail::csv_escape(col.parameter)
            << ",i1," << detail::csv_escape(values) << ',' << detail::csv_escape(col.canonical_unit)
            << ',' << src << ",GV\n";
      }
    }
  }
}

}  // namespace arix
