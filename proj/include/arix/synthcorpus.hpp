// Synthetic article generator with a planted-parameter ledger, used to run
// end-to-end recall/accuracy checks without a hand-audited corpus.
#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "arix/corpus.hpp"
#include "arix/errors.hpp"

namespace arix {

struct PlantedMic {
  std::string microorganism;  // 2-gram
  double value = 0.0;         // as written, in `unit`
  std::string unit = "mg L-1";
  std::string unit_class = "conc";
  double canonical = 0.0;  // g L-1
};

struct ArticleLedger {
  std::string article_id;
  std::vector<std::string> species;  // planted genus+epithet 2-grams (Methods)
  std::vector<PlantedMic> mics;      // planted MIC sentences (Results)
  std::vector<std::string> sections;
};

struct PlantLedger {
  std::uint64_t seed = 0;
  std::vector<ArticleLedger> articles;
};

struct SynthParams {
  std::size_t n_articles = 10;
  std::uint64_t seed = 42;
  double mic_probability = 1.0;  // chance an article gets a MIC sentence
  std::size_t species_per_article = 2;
};

namespace synth {

inline const std::vector<std::string>& plant_genus() {
  static const std::vector<std::string> v = {
      "Abies",  "Acacia", "Artemisia", "Prunus",  "Sophora", "Salvia",
      "Ficus",  "Inula",  "Laurus",    "Morinda", "Citrus",  "Berberis"};
  return v;
}
inline const std::vector<std::string>& plant_epithet() {
  static const std::vector<std::string> v = {
      "grandis",  "indica",   "japonica", "diffusa",  "robusta",
      "odorata",  "communis", "racemosa", "tomentosa", "angustifolia"};
  return v;
}
inline const std::vector<std::string>& micro_genus() {
  static const std::vector<std::string> v = {
      "Staphylococcus", "Candida",     "Fusarium",    "Klebsiella",  "Escherichia",
      "Pseudomonas",    "Aspergillus", "Streptococcus", "Bacillus",  "Salmonella"};
  return v;
}
inline const std::vector<std::string>& micro_epithet() {
  static const std::vector<std::string> v = {"aureus",     "albicans", "solani", "pneumoniae",
                                             "coli",       "niger",    "mutans", "subtilis"};
  return v;
}
inline const std::vector<std::string>& molecules() {
  static const std::vector<std::string> v = {
      "luteolin",   "quercetin", "artemisinin", "catechin", "rutin",      "apigenin",
      "berberine",  "naringin",  "kaempferol",  "genistein", "hesperidin", "curcumin"};
  return v;
}
inline const std::vector<std::string>& verbs() {
  static const std::vector<std::string> v = {"sonicated", "macerated",   "refluxed",
                                             "filtered",  "centrifuged", "lyophilized",
                                             "incubated", "stirred"};
  return v;
}
// distractor species for the introduction, disjoint from the planted pool
inline const std::vector<std::string>& distractor_species() {
  static const std::vector<std::string> v = {"Quercus ilex", "Pinus sylvestris",
                                             "Rosa canina", "Vitis vinifera"};
  return v;
}

}  // namespace synth

inline std::pair<std::vector<RawArticle>, PlantLedger> generate_synth_corpus(
    const SynthParams& params) {
  if (params.n_articles < 1) throw ConfigError("n_articles must be >= 1");
  std::mt19937_64 rng(params.seed);
  auto pick = [&rng](const std::vector<std::string>& pool) -> const std::string& {
    std::uniform_int_distribution<std::size_t> d(0, pool.size() - 1);
    return pool[d(rng)];
  };
  std::uniform_real_distribution<double> uni01(0.0, 1.0);

  std::vector<RawArticle> articles;
  PlantLedger ledger;
  ledger.seed = params.seed;

  for (std::size_t a = 0; a < params.n_articles; ++a) {
    char idbuf[16];
    std::snprintf(idbuf, sizeof idbuf, "synth%04zu", a);
    ArticleLedger al;
    al.article_id = idbuf;
    al.sections = {"Abstract", "Introduction", "Methodology", "Results", "Discussion",
                   "References"};

    std::vector<std::string> species;
    while (species.size() < params.species_per_article) {
      std::string sp = pick(synth::plant_genus()) + " " + pick(synth::plant_epithet());
      if (std::find(species.begin(), species.end(), sp) == species.end())
        species.push_back(std::move(sp));
    }
    al.species = species;

    std::ostringstream t;
    t << "Abstract\n";
    t << "Natural products from medicinal plants were screened for antimicrobial activity. ";
    t << "The study reports isolation yields and inhibitory concentrations.\n";

    t << "Introduction\n";
    t << "Secondary metabolites remain a rich source of bioactive molecules. ";
    t << "Similar to " << pick(synth::distractor_species())
      << ", many medicinal plants accumulate phenolic compounds. ";
    t << "Previous surveys reported heterogeneous assay protocols and outcomes.\n";

    t << "Methods\n";
    for (const auto& sp : species) {
      const std::string& mol = pick(synth::molecules());
      t << mol << " was isolated from the plant " << sp << " after the biomass was "
        << pick(synth::verbs()) << " and " << pick(synth::verbs()) << " in ethanol. ";
    }
    std::uniform_int_distribution<int> temp_d(6, 14);
    t << "The crude extract was dried at " << temp_d(rng) * 50
      << " °C and stored until analysis.\n";

    t << "Results\n";
    if (uni01(rng) < params.mic_probability) {
      const std::string micro =
          pick(synth::micro_genus()) + " " + pick(synth::micro_epithet());
      std::uniform_int_distribution<int> mic_d(1, 995);
      const int mic = mic_d(rng);
      PlantedMic pm;
      pm.microorganism = micro;
      pm.value = mic;
      pm.canonical = mic * 1e-3;
      al.mics.push_back(pm);
      t << "The MIC of the purified fraction against " << micro << " was " << mic
        << " mg L-1. ";
    }
    std::uniform_int_distribution<int> pct_d(40, 95), hours_d(2, 36);
    t << "The extraction yield reached " << pct_d(rng) << " % after " << hours_d(rng)
      << " h of processing. ";
    t << "Control assays without extract showed confluent growth.\n";

    t << "Discussion\n";
    t << "The observed activity is consistent with reports on related species. ";
    t << "Further fractionation may isolate the active principle.\n";

    t << "References\n";
    t << "[1] A. Author and B. Author, Journal of Natural Products, 2019.\n";
    t << "[2] C. Writer, Phytochemistry Letters, 2021.\n";

    articles.push_back(RawArticle{al.article_id, t.str()});
    ledger.articles.push_back(std::move(al));
  }
  return {std::move(articles), std::move(ledger)};
}

inline void write_synth_corpus(const std::vector<RawArticle>& articles,
                               const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& a : articles) {
    std::ofstream out(dir / (a.article_id + ".txt"), std::ios::binary);
    if (!out) throw IoError("cannot write article " + a.article_id);
    out << a.text;
  }
}

inline void save_ledger(const PlantLedger& ledger, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  for (const auto& a : ledger.articles) {
    nlohmann::json j;
    j["article_id"] = a.article_id;
    j["species"] = a.species;
    j["sections"] = a.sections;
    auto mics = nlohmann::json::array();
    for (const auto& m : a.mics)
      mics.push_back({{"microorganism", m.microorganism},
                      {"value", m.value},
                      {"unit", m.unit},
                      {"unit_class", m.unit_class},
                      {"canonical", m.canonical}});
    j["mics"] = std::move(mics);
    out << j.dump() << '\n';
  }
}

inline PlantLedger load_ledger(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  PlantLedger ledger;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    ArticleLedger a;
    a.article_id = j.at("article_id").get<std::string>();
    a.species = j.at("species").get<std::vector<std::string>>();
    a.sections = j.at("sections").get<std::vector<std::string>>();
    for (const auto& m : j.at("mics")) {
      PlantedMic pm;
      pm.microorganism = m.at("microorganism").get<std::string>();
      pm.value = m.at("value").get<double>();
      pm.unit = m.at("unit").get<std::string>();
      pm.unit_class = m.at("unit_class").get<std::string>();
      pm.canonical = m.at("canonical").get<double>();
      a.mics.push_back(std::move(pm));
    }
    ledger.articles.push_back(std::move(a));
  }
  return ledger;
}

}  // namespace arix
