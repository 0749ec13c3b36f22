// Filter-chain orchestration: Sm -> Tm -> Bm -> Sf -> LSm over a corpus per a
// declarative Setup, then categorical/numerical extraction and the
// recall/accuracy metrics.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "arix/bayes.hpp"
#include "arix/corpus.hpp"
#include "arix/embedding.hpp"
#include "arix/errors.hpp"
#include "arix/extraction.hpp"
#include "arix/matrix.hpp"
#include "arix/sectionfilter.hpp"
#include "arix/semantic.hpp"
#include "arix/synthcorpus.hpp"
#include "arix/topic.hpp"

namespace arix {

// One extraction configuration; fields mirror the setup-table columns, so a
// row like "plants + [isolat*, extract*]" transcribes directly.
struct Setup {
  std::vector<std::string> sm_clusters;   // cluster labels (token presence)
  std::vector<std::string> lsm_patterns;  // bracketed literal patterns
  std::vector<std::string> tm_topics;     // cluster labels summed into one topic
  std::optional<double> tm_threshold;
  std::string bm_label;  // bayes model label, empty = off
  bool sf = false;
  double sf_threshold = 0.5;
  std::string categorical;  // cluster label, empty = off
  std::string numerical;    // unit class, empty = off
  ExtractMode mode = ExtractMode::av;
  bool strict_single = false;

  void validate() const {
    const bool lsm_active = !sm_clusters.empty() || !lsm_patterns.empty();
    const bool tm_active = !tm_topics.empty();
    const bool bm_active = !bm_label.empty();
    if (!lsm_active && !tm_active && !bm_active)
      throw ConfigError("setup needs at least one of lsm, tm, bm active");
    if (tm_active != tm_threshold.has_value())
      throw ConfigError("tm_threshold must be given exactly when tm is");
  }
};

namespace detail {

inline bool is_none(const std::string& v) {
  std::string s;
  for (char c : v) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return s.empty() || s == "none" || s == "off" || s == "-";
}

// splits "plants + [isolat*, extract*]" on '+' outside brackets
inline std::vector<std::string> split_plus(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : v) {
    if (c == '[') ++depth;
    if (c == ']') --depth;
    if (c == '+' && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  for (auto& s : out) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    s = (b == std::string::npos) ? "" : s.substr(b, e - b + 1);
  }
  std::erase_if(out, [](const std::string& s) { return s.empty(); });
  return out;
}

}  // namespace detail

// Builds a Setup from flat key-value fields (the shape of one setup-table row).
inline Setup make_setup(const std::map<std::string, std::string>& kv) {
  Setup s;
  auto get = [&](const char* key) -> std::string {
    auto it = kv.find(key);
    return it == kv.end() ? std::string() : it->second;
  };
  if (const std::string lsm = get("lsm"); !detail::is_none(lsm)) {
    for (auto& item : detail::split_plus(lsm)) {
      if (!item.empty() && item.front() == '[') s.lsm_patterns.push_back(item);
      else s.sm_clusters.push_back(item);
    }
  }
  if (const std::string tm = get("tm"); !detail::is_none(tm))
    s.tm_topics = detail::split_plus(tm);
  if (const std::string thr = get("tm_threshold"); !detail::is_none(thr)) {
    try {
      s.tm_threshold = std::stod(thr);
    } catch (const std::exception&) {
      throw ConfigError("tm_threshold is not a number: " + thr);
    }
  }
  if (const std::string bm = get("bm"); !detail::is_none(bm)) s.bm_label = bm;
  if (const std::string sf = get("sf"); !detail::is_none(sf)) {
    if (sf == "on" || sf == "1" || sf == "true") s.sf = true;
    else throw ConfigError("sf must be on/off, got: " + sf);
  }
  if (const std::string st = get("sf_threshold"); !detail::is_none(st))
    s.sf_threshold = std::stod(st);
  if (const std::string cat = get("categorical"); !detail::is_none(cat)) s.categorical = cat;
  if (const std::string num = get("numerical"); !detail::is_none(num)) s.numerical = num;
  if (const std::string mode = get("mode"); !detail::is_none(mode)) {
    if (mode == "AV" || mode == "av") s.mode = ExtractMode::av;
    else if (mode == "GV" || mode == "gv") s.mode = ExtractMode::gv;
    else throw ConfigError("mode must be AV or GV, got: " + mode);
  }
  if (const std::string strict = get("strict_single"); !detail::is_none(strict))
    s.strict_single = (strict == "on" || strict == "1" || strict == "true");
  s.validate();
  return s;
}

// Flat "key = value" config file, one key per line, '#' comments.
inline Setup load_setup(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return make_setup(kv);
}

// Trained artifacts available to run_setup. Pointers may be null when a setup
// does not reference the corresponding machine.
struct ModelSet {
  const Vocabulary* vocab = nullptr;
  const EmbeddingMatrix* embedding = nullptr;
  std::map<std::string, TokenCluster> clusters;
  const TopicModel* topic_model = nullptr;
  std::map<std::string, BayesModel> bayes;
  const SectionFilterModel* section_filter = nullptr;
  const UnitTable* units = nullptr;
  AliasMap aliases;
};

struct StageRecord {
  std::string name;
  std::size_t survivors = 0;
  std::size_t rejected = 0;
  std::vector<std::int64_t> surviving_docs;
};

struct ExtractionReport {
  std::size_t R = 0;
  std::vector<StageRecord> stages;  // stage 0 = input
  std::vector<CategoricalRecord> categorical;
  std::vector<IndexedValues> numeric;
  std::set<std::string> articles_with_extraction;
  std::size_t ne_R = 0;
  double recall = 0.0;

  const std::vector<std::int64_t>& surviving_docs() const {
    return stages.back().surviving_docs;
  }
};

inline double recall_R(std::size_t ne, std::size_t R) {
  if (R == 0) throw ConfigError("recall_R needs R > 0");
  return static_cast<double>(ne) / static_cast<double>(R);
}

namespace detail {

inline bool doc_contains_term(const std::vector<std::string>& doc_tokens,
                              const std::vector<std::string>& term_tokens) {
  if (term_tokens.empty() || term_tokens.size() > doc_tokens.size()) return false;
  for (std::size_t i = 0; i + term_tokens.size() <= doc_tokens.size(); ++i) {
    bool all = true;
    for (std::size_t k = 0; k < term_tokens.size() && all; ++k)
      all = doc_tokens[i + k] == term_tokens[k];
    if (all) return true;
  }
  return false;
}

}  // namespace detail

inline ExtractionReport run_setup(const Corpus& corpus, const ModelSet& models,
                                  const Setup& setup) {
  setup.validate();
  if (models.units == nullptr) throw MissingModelError("unit table not provided");
  if (models.vocab == nullptr) throw MissingModelError("vocabulary not provided");

  // resolve referenced models up front
  auto need_cluster = [&](const std::string& label) -> const TokenCluster& {
    auto it = models.clusters.find(label);
    if (it == models.clusters.end()) throw MissingModelError("cluster not found: " + label);
    return it->second;
  };
  for (const auto& l : setup.sm_clusters) need_cluster(l);
  for (const auto& l : setup.tm_topics) need_cluster(l);
  if (!setup.categorical.empty()) need_cluster(setup.categorical);

  std::vector<LiteralPattern> patterns;
  for (const auto& p : setup.lsm_patterns) patterns.push_back(compile_pattern(p));

  const std::uint64_t chash = corpus_hash(corpus);
  const std::uint64_t vhash = vocab_hash(*models.vocab);
  if (models.embedding != nullptr && models.embedding->vocab_hash != vhash)
    throw StaleModelError("embedding was trained on a different vocabulary");

  const BayesModel* bayes = nullptr;
  if (!setup.bm_label.empty()) {
    auto it = models.bayes.find(setup.bm_label);
    if (it == models.bayes.end())
      throw MissingModelError("bayes model not found: " + setup.bm_label);
    bayes = &it->second;
    if (bayes->vocab_hash != 0 && bayes->vocab_hash != vhash)
      throw StaleModelError("bayes model was trained on a different vocabulary");
  }

  const TopicModel* topic_model = nullptr;
  std::optional<TopicVector> topic;
  if (!setup.tm_topics.empty()) {
    topic_model = models.topic_model;
    if (topic_model == nullptr) throw MissingModelError("topic model not provided");
    if (topic_model->corpus_hash != 0 && topic_model->corpus_hash != chash)
      throw StaleModelError("topic model was trained on a different corpus");
    if (topic_model->vocab_hash != 0 && topic_model->vocab_hash != vhash)
      throw StaleModelError("topic model was trained on a different vocabulary");
    std::vector<TokenCluster> cs;
    for (const auto& l : setup.tm_topics) cs.push_back(need_cluster(l));
    topic = make_topic_vector(cs, *topic_model, *models.vocab);
  }

  if (setup.sf) {
    if (models.section_filter == nullptr)
      throw MissingModelError("section filter not provided");
    if (models.embedding == nullptr)
      throw MissingModelError("section filter needs the embedding");
    if (models.section_filter->embedding_hash != embedding_hash(*models.embedding))
      throw StaleModelError("section filter was trained on a different embedding");
  }

  ExtractionReport report;
  report.R = corpus.R;

  std::vector<std::int64_t> alive(corpus.N);
  for (std::size_t d = 0; d < corpus.N; ++d) alive[d] = static_cast<std::int64_t>(d);
  report.stages.push_back({"input", alive.size(), 0, alive});

  auto apply_stage = [&](const std::string& name, auto&& keep) {
    std::vector<std::int64_t> next;
    for (auto d : alive)
      if (keep(corpus.documents[static_cast<std::size_t>(d)])) next.push_back(d);
    report.stages.push_back({name, next.size(), alive.size() - next.size(), next});
    alive = std::move(next);
  };

  // Sm: token presence of any term of each named cluster
  if (!setup.sm_clusters.empty()) {
    std::vector<std::vector<std::vector<std::string>>> cluster_terms;
    for (const auto& l : setup.sm_clusters) {
      std::vector<std::vector<std::string>> terms;
      for (const auto& t : need_cluster(l).all_terms()) terms.push_back(tokenize(t));
      cluster_terms.push_back(std::move(terms));
    }
    apply_stage("Sm", [&](const Document& doc) {
      const auto toks = tokenize(doc.text);
      for (const auto& terms : cluster_terms) {
        bool any = false;
        for (const auto& t : terms)
          if (detail::doc_contains_term(toks, t)) { any = true; break; }
        if (!any) return false;
      }
      return true;
    });
  }

  // Tm: correlation above threshold
  if (topic.has_value()) {
    const auto corr = all_correlations(*topic, *topic_model);
    const double thr = *setup.tm_threshold;
    apply_stage("Tm", [&](const Document& doc) {
      const auto& [r, ok] = corr[static_cast<std::size_t>(doc.doc_id)];
      return ok && r > thr;
    });
  }

  // Bm: naive Bayes accepts
  if (bayes != nullptr) {
    apply_stage("Bm", [&](const Document& doc) {
      return classify(doc, *bayes, *models.vocab).first;
    });
  }

  // Sf: paragraph score above threshold
  if (setup.sf) {
    const auto paragraphs = group_paragraphs(corpus.documents);
    std::vector<double> para_score(paragraphs.size(), -1.0);
    std::vector<std::size_t> doc_para(corpus.N, 0);
    for (std::size_t p = 0; p < paragraphs.size(); ++p)
      for (const auto& d : paragraphs[p]) doc_para[static_cast<std::size_t>(d.doc_id)] = p;
    apply_stage("Sf", [&](const Document& doc) {
      const std::size_t p = doc_para[static_cast<std::size_t>(doc.doc_id)];
      if (para_score[p] < 0.0)
        para_score[p] = predict_section(paragraphs[p], *models.section_filter,
                                        *models.embedding, *models.vocab);
      return para_score[p] > setup.sf_threshold;
    });
  }

  // LSm: literal patterns
  if (!patterns.empty()) {
    apply_stage("LSm", [&](const Document& doc) {
      for (const auto& p : patterns)
        if (!match_pattern(doc, p, *models.units)) return false;
      return true;
    });
  }

  // extraction per article over the surviving documents
  std::map<std::string, std::vector<Document>> per_article;
  for (auto d : alive) {
    const Document& doc = corpus.documents[static_cast<std::size_t>(d)];
    per_article[doc.article_id].push_back(doc);
  }

  for (auto& [article_id, docs] : per_article) {
    std::sort(docs.begin(), docs.end(),
              [](const Document& a, const Document& b) { return a.doc_id < b.doc_id; });
    bool extracted = false;

    if (!setup.categorical.empty()) {
      const TokenCluster& cluster = need_cluster(setup.categorical);
      for (const auto& doc : docs) {
        for (auto& term : extract_categorical(doc, cluster, models.aliases)) {
          report.categorical.push_back({article_id, cluster.subject, term, doc.doc_id});
          extracted = true;
        }
      }
    }

    if (!setup.numerical.empty()) {
      ParameterSpec param{setup.numerical, setup.numerical, setup.strict_single};
      IndexedValues iv = (setup.mode == ExtractMode::av)
                             ? extract_numeric_av(docs, param, *models.units)
                             : extract_numeric_gv(docs, param, *models.units);
      const bool has_values =
          (setup.mode == ExtractMode::av)
              ? iv.index_count > 0
              : (!iv.scans.empty() && iv.scans.front().group.has_value());
      if (has_values) {
        report.numeric.push_back(std::move(iv));
        extracted = true;
      }
    }

    if (extracted) report.articles_with_extraction.insert(article_id);
  }

  report.ne_R = report.articles_with_extraction.size();
  report.recall = corpus.R > 0 ? recall_R(report.ne_R, corpus.R) : 0.0;
  return report;
}

// ---------------------------------------------------------------------------
// audit worksheet (recall_R50 / accuracy_R50)

struct AuditRow {
  std::string article_id;
  bool extracted = false;
  std::optional<bool> correct;  // filled by a human or by the ledger
};

struct AuditWorksheet {
  std::vector<AuditRow> rows;

  std::size_t ne_R50() const {
    std::size_t n = 0;
    for (const auto& r : rows) n += r.extracted ? 1 : 0;
    return n;
  }
  std::size_t nc_R50() const {
    std::size_t n = 0;
    for (const auto& r : rows) n += (r.correct && *r.correct) ? 1 : 0;
    return n;
  }
  double recall_R50() const {
    return rows.empty() ? 0.0 : static_cast<double>(ne_R50()) / static_cast<double>(rows.size());
  }
  // fraction of extracting articles whose extraction is correct; this is the
  // ratio the reported setup tables use (accuracy exceeds recall there, which
  // rules out a shared denominator)
  double accuracy_R50() const {
    const std::size_t ne = ne_R50();
    return ne == 0 ? 0.0 : static_cast<double>(nc_R50()) / static_cast<double>(ne);
  }
};

// Seeded sample of `sample_size` articles drawn from those confirmed to
// contain the parameter; "extracted?" is filled from the report, "correct?"
// stays open for the auditor (or the ledger).
inline AuditWorksheet audit_sample(const ExtractionReport& report,
                                   std::vector<std::string> confirmable_articles,
                                   std::size_t sample_size, std::uint64_t seed) {
  if (confirmable_articles.size() < sample_size)
    throw InsufficientSampleError("need at least " + std::to_string(sample_size) +
                                  " confirmable articles, have " +
                                  std::to_string(confirmable_articles.size()));
  std::sort(confirmable_articles.begin(), confirmable_articles.end());
  std::mt19937_64 rng(seed);
  std::vector<std::string> sample;
  std::sample(confirmable_articles.begin(), confirmable_articles.end(),
              std::back_inserter(sample), sample_size, rng);
  AuditWorksheet ws;
  for (auto& id : sample)
    ws.rows.push_back({id, report.articles_with_extraction.count(id) > 0, std::nullopt});
  return ws;
}

// Fills the "correct?" column from a planting ledger: an article counts as
// correct when something was extracted and every extracted value/term matches
// a planted one.
inline void fill_audit_from_ledger(AuditWorksheet& ws, const ExtractionReport& report,
                                   const PlantLedger& ledger) {
  std::map<std::string, const ArticleLedger*> by_id;
  for (const auto& a : ledger.articles) by_id[a.article_id] = &a;

  auto lower = [](std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  };

  for (auto& row : ws.rows) {
    const auto it = by_id.find(row.article_id);
    if (it == by_id.end()) {
      row.correct = false;
      continue;
    }
    const ArticleLedger& al = *it->second;
    if (!row.extracted) {
      row.correct = false;
      continue;
    }
    bool ok = true;

    for (const auto& iv : report.numeric) {
      if (iv.article_id != row.article_id) continue;
      for (const auto& col : iv.scans) {
        if (iv.mode == ExtractMode::av) {
          for (const auto& cell : col.cells) {
            if (!cell) continue;
            bool match = false;
            for (const auto& m : al.mics)
              if (std::abs(m.canonical - *cell) <= 1e-9) match = true;
            ok = ok && match;
          }
        } else if (col.group) {
          for (double v : {col.group->lo, col.group->hi}) {
            bool match = false;
            for (const auto& m : al.mics)
              if (std::abs(m.canonical - v) <= 1e-9) match = true;
            ok = ok && match;
          }
        }
      }
    }

    std::set<std::string> planted_terms;
    for (const auto& s : al.species) planted_terms.insert(lower(s));
    for (const auto& m : al.mics) planted_terms.insert(lower(m.microorganism));
    for (const auto& rec : report.categorical) {
      if (rec.article_id != row.article_id) continue;
      ok = ok && planted_terms.count(lower(rec.value)) > 0;
    }

    row.correct = ok;
  }
}

inline void write_audit_csv(const AuditWorksheet& ws, std::ostream& out) {
  out << "article_id,extracted,correct\n";
  for (const auto& r : ws.rows) {
    out << r.article_id << ',' << (r.extracted ? "yes" : "no") << ',';
    if (r.correct) out << (*r.correct ? "yes" : "no");
    out << '\n';
  }
}

}  // namespace arix
