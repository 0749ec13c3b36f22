// arix command-line front end: corpus ingestion, model training, the
// filter-chain runner, the audit sampler, and the synthetic-corpus generator.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "arix/arix.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitMissingModel = 3;

arix::Corpus ingest_directory(const std::string& dir) {
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".txt")
      paths.push_back(entry.path());
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) throw arix::IoError("no .txt articles in " + dir);
  std::vector<std::vector<arix::Document>> articles;
  for (const auto& p : paths)
    articles.push_back(arix::process_article(arix::ingest_article(p)));
  return arix::build_corpus(articles);
}

arix::UnitTable load_units_or_default(const std::string& path) {
  if (path.empty()) return arix::default_unit_table();
  return arix::load_unit_table(path);
}

// "label=path" pairs for --cluster / --bayes options
std::pair<std::string, std::string> split_label_path(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos)
    throw arix::ConfigError("expected label=path, got: " + s);
  return {s.substr(0, eq), s.substr(eq + 1)};
}

struct RunOptions {
  std::string docs_path, vocab_path, emb_path, lsa_path, sf_path, units_path, config_path;
  std::vector<std::string> cluster_specs, bayes_specs;
  std::string lsm, tm, tm_threshold, bm, sf, cat, num, mode = "AV", strict;
  std::string out_csv, out_report;
};

void add_run_options(CLI::App* cmd, RunOptions& opt) {
  cmd->add_option("--docs", opt.docs_path, "documents.jsonl")->required();
  cmd->add_option("--vocab", opt.vocab_path, "vocabulary TSV")->required();
  cmd->add_option("--emb", opt.emb_path, "embedding file");
  cmd->add_option("--lsa", opt.lsa_path, "LSA topic model file");
  cmd->add_option("--sf-model", opt.sf_path, "section filter model file");
  cmd->add_option("--units", opt.units_path, "unit table JSON (default: built-in)");
  cmd->add_option("--cluster", opt.cluster_specs, "cluster as label=path (repeatable)");
  cmd->add_option("--bayes", opt.bayes_specs, "bayes model as label=path (repeatable)");
  cmd->add_option("--config", opt.config_path, "setup config file (key = value lines)");
  cmd->add_option("--lsm", opt.lsm, "cluster labels and/or [patterns], joined with +");
  cmd->add_option("--tm", opt.tm, "topic cluster labels joined with +");
  cmd->add_option("--tm-threshold", opt.tm_threshold, "Tm correlation threshold");
  cmd->add_option("--bm", opt.bm, "bayes model label");
  cmd->add_option("--sf", opt.sf, "section filter on/off");
  cmd->add_option("--cat", opt.cat, "categorical cluster label");
  cmd->add_option("--num", opt.num, "numerical unit class");
  cmd->add_option("--mode", opt.mode, "AV or GV");
  cmd->add_option("--strict-single", opt.strict, "AV strict single-value mode on/off");
}

struct LoadedModels {
  arix::Corpus corpus;
  arix::Vocabulary vocab;
  arix::EmbeddingMatrix embedding;
  arix::TopicModel topic_model;
  arix::SectionFilterModel sf_model;
  arix::UnitTable units;
  arix::ModelSet models;
  arix::Setup setup;
};

LoadedModels prepare_run(const RunOptions& opt) {
  LoadedModels lm;
  lm.corpus = arix::load_corpus_jsonl(opt.docs_path);
  lm.vocab = arix::load_vocabulary_tsv(opt.vocab_path);
  lm.units = load_units_or_default(opt.units_path);
  lm.models.vocab = &lm.vocab;
  lm.models.units = &lm.units;

  if (!opt.emb_path.empty()) {
    lm.embedding = arix::load_embedding(opt.emb_path);
    lm.models.embedding = &lm.embedding;
  }
  if (!opt.lsa_path.empty()) {
    lm.topic_model = arix::load_topic_model(opt.lsa_path);
    lm.models.topic_model = &lm.topic_model;
  }
  if (!opt.sf_path.empty()) {
    lm.sf_model = arix::load_section_filter(opt.sf_path);
    lm.models.section_filter = &lm.sf_model;
  }
  for (const auto& spec : opt.cluster_specs) {
    auto [label, path] = split_label_path(spec);
    lm.models.clusters.emplace(label, arix::load_cluster(path));
  }
  for (const auto& spec : opt.bayes_specs) {
    auto [label, path] = split_label_path(spec);
    lm.models.bayes.emplace(label, arix::load_bayes_model(path));
  }

  if (!opt.config_path.empty()) {
    lm.setup = arix::load_setup(opt.config_path);
  } else {
    std::map<std::string, std::string> kv = {
        {"lsm", opt.lsm},       {"tm", opt.tm},   {"tm_threshold", opt.tm_threshold},
        {"bm", opt.bm},         {"sf", opt.sf},   {"categorical", opt.cat},
        {"numerical", opt.num}, {"mode", opt.mode}, {"strict_single", opt.strict}};
    lm.setup = arix::make_setup(kv);
  }
  return lm;
}

void print_stage_table(const arix::ExtractionReport& report) {
  std::printf("%-8s %10s %10s\n", "stage", "survivors", "rejected");
  for (const auto& s : report.stages)
    std::printf("%-8s %10zu %10zu\n", s.name.c_str(), s.survivors, s.rejected);
  std::printf("articles with extraction: %zu of %zu (recall_R = %.4f)\n", report.ne_R,
              report.R, report.recall);
}

int dispatch(int argc, char** argv) {
  CLI::App app{"arix: corpus-to-database extraction engine"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "read a directory of .txt articles");
  std::string in_dir, out_docs = "documents.jsonl";
  ingest->add_option("--in", in_dir, "directory of UTF-8 .txt articles")->required();
  ingest->add_option("--out", out_docs, "output documents.jsonl");

  // vocab
  auto* vocab_cmd = app.add_subcommand("vocab", "build the vocabulary");
  std::string vocab_docs, vocab_out = "vocab.tsv";
  std::int64_t min_count = 2;
  vocab_cmd->add_option("--docs", vocab_docs)->required();
  vocab_cmd->add_option("--out", vocab_out);
  vocab_cmd->add_option("--min-count", min_count);

  // matrices
  auto* mat_cmd = app.add_subcommand("matrices", "write doc-token matrix triplets");
  std::string mat_docs, mat_vocab, mat_out = "matrix.tsv", weighting = "tfidf";
  mat_cmd->add_option("--docs", mat_docs)->required();
  mat_cmd->add_option("--vocab", mat_vocab)->required();
  mat_cmd->add_option("--weighting", weighting, "one-hot | bow | tfidf");
  mat_cmd->add_option("--out", mat_out);

  // train-embeddings
  auto* emb_cmd = app.add_subcommand("train-embeddings", "train CBOW word vectors");
  std::string emb_docs, emb_vocab, emb_out = "embeddings.bin", emb_tsv;
  arix::CbowParams cbow;
  emb_cmd->add_option("--docs", emb_docs)->required();
  emb_cmd->add_option("--vocab", emb_vocab)->required();
  emb_cmd->add_option("--dim", cbow.D);
  emb_cmd->add_option("--epochs", cbow.epochs);
  emb_cmd->add_option("--lr", cbow.learning_rate);
  emb_cmd->add_option("--chunk-min", cbow.chunk_min);
  emb_cmd->add_option("--chunk-max", cbow.chunk_max);
  emb_cmd->add_option("--seed", cbow.seed);
  emb_cmd->add_option("--out", emb_out);
  emb_cmd->add_option("--tsv", emb_tsv, "also export a text TSV");

  // cluster
  auto* cluster_cmd = app.add_subcommand("cluster", "expand seeds into a subject cluster");
  std::string cl_docs, cl_vocab, cl_emb, cl_seeds, cl_subject = "subject",
              cl_out = "cluster.json";
  std::size_t cl_iter = 2, cl_k = 20;
  std::int64_t cl_overlap = 2;
  bool cl_bigrams = false;
  double cl_thr = 5.0, cl_score_min = 1e-5;
  cluster_cmd->add_option("--docs", cl_docs)->required();
  cluster_cmd->add_option("--vocab", cl_vocab)->required();
  cluster_cmd->add_option("--emb", cl_emb)->required();
  cluster_cmd->add_option("--seeds", cl_seeds, "comma-separated seed tokens")->required();
  cluster_cmd->add_option("--subject", cl_subject);
  cluster_cmd->add_option("--iterations", cl_iter);
  cluster_cmd->add_option("--k", cl_k);
  cluster_cmd->add_option("--min-overlap", cl_overlap);
  cluster_cmd->add_flag("--bigrams", cl_bigrams, "attach corpus 2-grams");
  cluster_cmd->add_option("--thr", cl_thr);
  cluster_cmd->add_option("--score-min", cl_score_min);
  cluster_cmd->add_option("--out", cl_out);

  // train-lsa
  auto* lsa_cmd = app.add_subcommand("train-lsa", "fit the LSA topic model");
  std::string lsa_docs, lsa_vocab, lsa_out = "lsa.bin";
  std::size_t lsa_e = 150;
  lsa_cmd->add_option("--docs", lsa_docs)->required();
  lsa_cmd->add_option("--vocab", lsa_vocab)->required();
  lsa_cmd->add_option("--e", lsa_e, "topic dimension E");
  lsa_cmd->add_option("--out", lsa_out);

  // train-bayes
  auto* bayes_cmd = app.add_subcommand("train-bayes", "fit subject/background PMFs");
  std::string by_docs, by_vocab, by_lsa, by_out = "bayes.json";
  std::vector<std::string> by_clusters;
  double by_high = 0.5, by_low = 0.1, by_alpha = 1.0, by_prior = 0.5;
  std::size_t by_sample = 200;
  std::uint64_t by_seed = 1;
  bayes_cmd->add_option("--docs", by_docs)->required();
  bayes_cmd->add_option("--vocab", by_vocab)->required();
  bayes_cmd->add_option("--lsa", by_lsa)->required();
  bayes_cmd->add_option("--cluster", by_clusters, "label=path (repeatable)")->required();
  bayes_cmd->add_option("--high", by_high, "Tm threshold for subject sentences");
  bayes_cmd->add_option("--low", by_low, "Tm threshold below which background samples");
  bayes_cmd->add_option("--sample", by_sample, "background sample size");
  bayes_cmd->add_option("--alpha", by_alpha);
  bayes_cmd->add_option("--prior", by_prior);
  bayes_cmd->add_option("--seed", by_seed);
  bayes_cmd->add_option("--out", by_out);

  // train-sf
  auto* sf_cmd = app.add_subcommand("train-sf", "train the section filter");
  std::string sf_docs, sf_vocab, sf_emb, sf_out = "sf.json";
  arix::SectionFilterHyperParams sf_hp;
  std::size_t sf_len = 200;
  sf_cmd->add_option("--docs", sf_docs)->required();
  sf_cmd->add_option("--vocab", sf_vocab)->required();
  sf_cmd->add_option("--emb", sf_emb)->required();
  sf_cmd->add_option("--length", sf_len, "paragraph tensor length L");
  sf_cmd->add_option("--epochs", sf_hp.epochs);
  sf_cmd->add_option("--lr", sf_hp.learning_rate);
  sf_cmd->add_option("--seed", sf_hp.seed);
  sf_cmd->add_option("--out", sf_out);

  // run
  auto* run_cmd = app.add_subcommand("run", "run a setup over the corpus");
  RunOptions run_opt;
  add_run_options(run_cmd, run_opt);
  run_cmd->add_option("--out", run_opt.out_csv, "extraction CSV path");
  run_cmd->add_option("--out-report", run_opt.out_report, "machine-readable report JSON");

  // audit
  auto* audit_cmd = app.add_subcommand("audit", "sample articles for manual checking");
  std::string au_report, au_ledger, au_confirm, au_out = "audit.csv";
  std::size_t au_sample = 50;
  std::uint64_t au_seed = 7;
  audit_cmd->add_option("--report", au_report, "report JSON from `run --out-report`")
      ->required();
  audit_cmd->add_option("--ledger", au_ledger, "planting ledger (auto-fills correct?)");
  audit_cmd->add_option("--confirmed", au_confirm,
                        "file listing confirmable article ids (one per line)");
  audit_cmd->add_option("--sample", au_sample);
  audit_cmd->add_option("--seed", au_seed);
  audit_cmd->add_option("--out", au_out);

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus + ledger");
  arix::SynthParams sp;
  std::string synth_dir = "synth-corpus", synth_ledger = "ledger.jsonl";
  synth_cmd->add_option("--n", sp.n_articles);
  synth_cmd->add_option("--seed", sp.seed);
  synth_cmd->add_option("--mic-prob", sp.mic_probability);
  synth_cmd->add_option("--out-dir", synth_dir);
  synth_cmd->add_option("--ledger", synth_ledger);

  CLI11_PARSE(app, argc, argv);

  if (*ingest) {
    arix::Corpus corpus = ingest_directory(in_dir);
    arix::save_corpus_jsonl(corpus, out_docs);
    std::printf("ingested %zu articles, %zu documents -> %s\n", corpus.R, corpus.N,
                out_docs.c_str());
  } else if (*vocab_cmd) {
    auto corpus = arix::load_corpus_jsonl(vocab_docs);
    auto vocab = arix::build_vocabulary(corpus, min_count);
    arix::save_vocabulary_tsv(vocab, vocab_out);
    std::printf("vocabulary: M=%zu -> %s\n", vocab.M, vocab_out.c_str());
  } else if (*mat_cmd) {
    auto corpus = arix::load_corpus_jsonl(mat_docs);
    auto vocab = arix::load_vocabulary_tsv(mat_vocab);
    arix::Weighting w;
    if (weighting == "one-hot") w = arix::Weighting::one_hot;
    else if (weighting == "bow") w = arix::Weighting::bow;
    else if (weighting == "tfidf") w = arix::Weighting::tfidf;
    else throw arix::ConfigError("unknown weighting: " + weighting);
    auto m = arix::build_matrix(corpus, vocab, w);
    arix::save_matrix_triplets(m, mat_out);
    std::printf("matrix %zux%zu (%s) -> %s\n", m.N, m.M, weighting.c_str(), mat_out.c_str());
  } else if (*emb_cmd) {
    auto corpus = arix::load_corpus_jsonl(emb_docs);
    auto vocab = arix::load_vocabulary_tsv(emb_vocab);
    auto emb = arix::train_cbow(corpus, vocab, cbow);
    arix::save_embedding(emb, emb_out);
    if (!emb_tsv.empty()) arix::export_embedding_tsv(emb, vocab, emb_tsv);
    std::printf("embeddings M=%zu D=%zu -> %s\n", emb.M, emb.D, emb_out.c_str());
  } else if (*cluster_cmd) {
    auto corpus = arix::load_corpus_jsonl(cl_docs);
    auto vocab = arix::load_vocabulary_tsv(cl_vocab);
    auto emb = arix::load_embedding(cl_emb);
    std::vector<std::string> seeds;
    std::stringstream ss(cl_seeds);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) seeds.push_back(item);
    }
    auto cluster =
        arix::expand_cluster(seeds, emb, vocab, cl_iter, cl_k, cl_overlap, cl_subject);
    if (cl_bigrams) cluster = arix::attach_bigrams(cluster, corpus, cl_thr, cl_score_min);
    arix::save_cluster(cluster, cl_out);
    std::printf("cluster \"%s\": %zu members -> %s\n", cl_subject.c_str(),
                cluster.members.size(), cl_out.c_str());
  } else if (*lsa_cmd) {
    auto corpus = arix::load_corpus_jsonl(lsa_docs);
    auto vocab = arix::load_vocabulary_tsv(lsa_vocab);
    auto tfidf = arix::build_matrix(corpus, vocab, arix::Weighting::tfidf);
    auto model = arix::fit_lsa(tfidf, std::min(lsa_e, std::min(tfidf.M, tfidf.N)),
                               arix::vocab_hash(vocab), arix::corpus_hash(corpus));
    arix::save_topic_model(model, lsa_out);
    std::printf("LSA model E=%zu -> %s\n", model.E, lsa_out.c_str());
  } else if (*bayes_cmd) {
    auto corpus = arix::load_corpus_jsonl(by_docs);
    auto vocab = arix::load_vocabulary_tsv(by_vocab);
    auto model = arix::load_topic_model(by_lsa);
    std::vector<arix::TokenCluster> clusters;
    for (const auto& spec : by_clusters) {
      auto [label, path] = split_label_path(spec);
      clusters.push_back(arix::load_cluster(path));
    }
    auto topic = arix::make_topic_vector(clusters, model, vocab);
    auto matches = arix::match_documents(topic, model, by_high);
    if (matches.empty())
      throw arix::InsufficientSampleError("no documents above the subject threshold");
    std::vector<arix::Document> subject_docs;
    for (auto& [d, r] : matches)
      subject_docs.push_back(corpus.documents[static_cast<std::size_t>(d)]);
    arix::BayesModel bm;
    bm.pmf_subject = arix::fit_pmf(subject_docs, vocab, by_alpha);
    bm.pmf_background =
        arix::fit_background(corpus, vocab, topic, model, by_low, by_sample, by_seed, by_alpha);
    bm.prior_subject = by_prior;
    bm.vocab_hash = arix::vocab_hash(vocab);
    arix::save_bayes_model(bm, by_out);
    std::printf("bayes model: %zu subject docs -> %s\n", subject_docs.size(), by_out.c_str());
  } else if (*sf_cmd) {
    auto corpus = arix::load_corpus_jsonl(sf_docs);
    auto vocab = arix::load_vocabulary_tsv(sf_vocab);
    auto emb = arix::load_embedding(sf_emb);
    auto paragraphs = arix::group_paragraphs(corpus.documents);
    std::vector<arix::ParagraphTensor> tensors;
    for (const auto& p : paragraphs)
      tensors.push_back(arix::assemble_tensor(p, emb, vocab, sf_len));
    auto model = arix::train_section_filter(tensors, sf_hp, sf_len, emb.D,
                                            arix::embedding_hash(emb));
    arix::save_section_filter(model, sf_out);
    std::printf("section filter trained (%zu paragraphs), final loss %.4f -> %s\n",
                tensors.size(), model.epoch_loss.back(), sf_out.c_str());
  } else if (*run_cmd) {
    auto lm = prepare_run(run_opt);
    auto report = arix::run_setup(lm.corpus, lm.models, lm.setup);
    print_stage_table(report);
    if (!run_opt.out_csv.empty()) {
      std::ofstream out(run_opt.out_csv, std::ios::binary);
      if (!out) throw arix::IoError("cannot write " + run_opt.out_csv);
      arix::write_extraction_csv(report.numeric, report.categorical, out);
      std::printf("extraction table -> %s\n", run_opt.out_csv.c_str());
    }
    if (!run_opt.out_report.empty()) {
      std::ofstream out(run_opt.out_report, std::ios::binary);
      if (!out) throw arix::IoError("cannot write " + run_opt.out_report);
      out << arix::report_to_json(report).dump() << '\n';
      std::printf("report -> %s\n", run_opt.out_report.c_str());
    }
  } else if (*audit_cmd) {
    std::ifstream in(au_report);
    if (!in) throw arix::MissingModelError("cannot read report " + au_report);
    nlohmann::json rj;
    in >> rj;
    auto report = arix::report_from_json(rj);

    std::vector<std::string> confirmable;
    arix::PlantLedger ledger;
    bool have_ledger = false;
    if (!au_ledger.empty()) {
      ledger = arix::load_ledger(au_ledger);
      have_ledger = true;
      for (const auto& a : ledger.articles)
        if (!a.mics.empty()) confirmable.push_back(a.article_id);
    }
    if (!au_confirm.empty()) {
      std::ifstream cin_(au_confirm);
      if (!cin_) throw arix::IoError("cannot read " + au_confirm);
      confirmable.clear();
      std::string line;
      while (std::getline(cin_, line))
        if (!line.empty()) confirmable.push_back(line);
    }
    if (confirmable.empty())
      throw arix::ConfigError("audit needs --ledger or --confirmed");

    auto ws = arix::audit_sample(report, confirmable, au_sample, au_seed);
    if (have_ledger) arix::fill_audit_from_ledger(ws, report, ledger);
    std::ofstream out(au_out, std::ios::binary);
    if (!out) throw arix::IoError("cannot write " + au_out);
    arix::write_audit_csv(ws, out);
    std::printf("audit sample of %zu articles -> %s\n", ws.rows.size(), au_out.c_str());
    std::printf("recall_R50 = %.4f", ws.recall_R50());
    if (have_ledger) std::printf(", accuracy_R50 = %.4f", ws.accuracy_R50());
    std::printf("\n");
  } else if (*synth_cmd) {
    auto [articles, ledger] = arix::generate_synth_corpus(sp);
    arix::write_synth_corpus(articles, synth_dir);
    arix::save_ledger(ledger, synth_ledger);
    std::printf("synthetic corpus: %zu articles -> %s (ledger %s)\n", articles.size(),
                synth_dir.c_str(), synth_ledger.c_str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const arix::MissingModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMissingModel;
  } catch (const arix::StaleModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMissingModel;
  } catch (const arix::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const arix::DslSyntaxError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
