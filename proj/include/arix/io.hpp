// File formats: documents.jsonl, vocabulary TSV, sparse matrix triplets, and
// the JSON extraction report consumed by the audit command.
#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "arix/corpus.hpp"
#include "arix/errors.hpp"
#include "arix/matrix.hpp"
#include "arix/pipeline.hpp"

namespace arix {

// one JSON object per Document: doc_id, article_id, section, sent_idx, text
inline void save_corpus_jsonl(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  for (const auto& d : corpus.documents) {
    nlohmann::json j;
    j["doc_id"] = d.doc_id;
    j["article_id"] = d.article_id;
    j["section"] = to_string(d.section);
    j["sent_idx"] = d.sent_idx;
    j["text"] = d.text;
    out << j.dump() << '\n';
  }
}

inline Corpus load_corpus_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::vector<std::vector<Document>> articles;
  std::string line;
  std::string last_article;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    Document d;
    d.article_id = j.at("article_id").get<std::string>();
    d.section = section_from_string(j.at("section").get<std::string>());
    d.sent_idx = j.at("sent_idx").get<std::int64_t>();
    d.text = j.at("text").get<std::string>();
    if (articles.empty() || d.article_id != last_article) {
      articles.emplace_back();
      last_article = d.article_id;
    }
    articles.back().push_back(std::move(d));
  }
  return build_corpus(articles);
}

// vocabulary TSV: token, id, corpus frequency
inline void save_vocabulary_tsv(const Vocabulary& v, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  for (std::size_t i = 0; i < v.M; ++i)
    out << v.tokens[i] << '\t' << i << '\t' << v.freq[i] << '\n';
}

inline Vocabulary load_vocabulary_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  Vocabulary v;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos)
      throw IoError("malformed vocabulary line: " + line);
    v.index.emplace(line.substr(0, t1), v.tokens.size());
    v.tokens.push_back(line.substr(0, t1));
    v.freq.push_back(std::stoll(line.substr(t2 + 1)));
  }
  v.M = v.tokens.size();
  return v;
}

// sparse triplets: header comment, then doc_id <TAB> token_id <TAB> weight
inline void save_matrix_triplets(const DocTokenMatrix& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "# arix doc-token matrix weighting=" << to_string(m.weighting) << " N=" << m.N
      << " M=" << m.M << '\n';
  out.precision(17);
  for (std::size_t d = 0; d < m.N; ++d)
    for (const auto& [tid, w] : m.rows[d]) out << d << '\t' << tid << '\t' << w << '\n';
}

// ---------------------------------------------------------------------------
// extraction report JSON

inline nlohmann::json report_to_json(const ExtractionReport& r) {
  nlohmann::json j;
  j["format"] = "arix-report";
  j["version"] = 1;
  j["R"] = r.R;
  j["ne_R"] = r.ne_R;
  j["recall_R"] = r.recall;
  j["stages"] = nlohmann::json::array();
  for (const auto& s : r.stages)
    j["stages"].push_back({{"name", s.name},
                           {"survivors", s.survivors},
                           {"rejected", s.rejected},
                           {"docs", s.surviving_docs}});
  j["articles_with_extraction"] =
      std::vector<std::string>(r.articles_with_extraction.begin(),
                               r.articles_with_extraction.end());
  j["categorical"] = nlohmann::json::array();
  for (const auto& c : r.categorical)
    j["categorical"].push_back({{"article_id", c.article_id},
                                {"parameter", c.parameter},
                                {"value", c.value},
                                {"source_doc_id", c.source_doc_id}});
  j["numeric"] = nlohmann::json::array();
  for (const auto& iv : r.numeric) {
    nlohmann::json ij;
    ij["article_id"] = iv.article_id;
    ij["mode"] = to_string(iv.mode);
    ij["index_count"] = iv.index_count;
    ij["scans"] = nlohmann::json::array();
    for (const auto& col : iv.scans) {
      nlohmann::json cj;
      cj["parameter"] = col.parameter;
      cj["unit_class"] = col.unit_class;
      cj["canonical_unit"] = col.canonical_unit;
      cj["source_doc_ids"] = col.source_doc_ids;
      cj["cells"] = nlohmann::json::array();
      for (const auto& cell : col.cells)
        cj["cells"].push_back(cell ? nlohmann::json(*cell) : nlohmann::json(nullptr));
      if (col.group) {
        cj["group"] = {{"count", col.group->count},
                       {"lo", col.group->lo},
                       {"hi", col.group->hi},
                       {"avg", col.group->avg}};
        if (col.group->median) cj["group"]["median"] = *col.group->median;
        if (col.group->stddev) cj["group"]["stddev"] = *col.group->stddev;
      }
      ij["scans"].push_back(std::move(cj));
    }
    j["numeric"].push_back(std::move(ij));
  }
  return j;
}

inline ExtractionReport report_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "arix-report") throw IoError("not an arix report file");
  ExtractionReport r;
  r.R = j.at("R").get<std::size_t>();
  r.ne_R = j.at("ne_R").get<std::size_t>();
  r.recall = j.at("recall_R").get<double>();
  for (const auto& s : j.at("stages")) {
    StageRecord sr;
    sr.name = s.at("name").get<std::string>();
    sr.survivors = s.at("survivors").get<std::size_t>();
    sr.rejected = s.at("rejected").get<std::size_t>();
    sr.surviving_docs = s.at("docs").get<std::vector<std::int64_t>>();
    r.stages.push_back(std::move(sr));
  }
  for (const auto& id : j.at("articles_with_extraction"))
    r.articles_with_extraction.insert(id.get<std::string>());
  for (const auto& c : j.at("categorical"))
    r.categorical.push_back({c.at("article_id").get<std::string>(),
                             c.at("parameter").get<std::string>(),
                             c.at("value").get<std::string>(),
                             c.at("source_doc_id").get<std::int64_t>()});
  for (const auto& ij : j.at("numeric")) {
    IndexedValues iv;
    iv.article_id = ij.at("article_id").get<std::string>();
    iv.mode = ij.at("mode").get<std::string>() == "AV" ? ExtractMode::av : ExtractMode::gv;
    iv.index_count = ij.at("index_count").get<std::size_t>();
    for (const auto& cj : ij.at("scans")) {
      ScanColumn col;
      col.parameter = cj.at("parameter").get<std::string>();
      col.unit_class = cj.at("unit_class").get<std::string>();
      col.canonical_unit = cj.at("canonical_unit").get<std::string>();
      col.source_doc_ids = cj.at("source_doc_ids").get<std::vector<std::int64_t>>();
      for (const auto& cell : cj.at("cells"))
        col.cells.push_back(cell.is_null() ? std::optional<double>()
                                           : std::optional<double>(cell.get<double>()));
      if (cj.contains("group")) {
        GroupStats gs;
        gs.count = cj["group"].at("count").get<std::size_t>();
        gs.lo = cj["group"].at("lo").get<double>();
        gs.hi = cj["group"].at("hi").get<double>();
        gs.avg = cj["group"].at("avg").get<double>();
        if (cj["group"].contains("median")) gs.median = cj["group"]["median"].get<double>();
        if (cj["group"].contains("stddev")) gs.stddev = cj["group"]["stddev"].get<double>();
        col.group = gs;
      }
      iv.scans.push_back(std::move(col));
    }
    r.numeric.push_back(std::move(iv));
  }
  return r;
}

}  // namespace arix
