#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "pivotrepr/config.hpp"
#include "pivotrepr/manifest.hpp"

namespace {

using namespace pivotrepr;

int resolve_threads() {
  const char* env = std::getenv("PIVOTREPR_THREADS");
  const int cores = std::max(1u, std::thread::hardware_concurrency());
  if (!env) return cores;
  try {
    return std::clamp(std::stoi(env), 1, cores);
  } catch (const std::exception&) {
    throw std::invalid_argument("PIVOTREPR_THREADS is not an integer");
  }
}

std::uint64_t resolved_seed(const Config& cfg, const std::optional<std::uint64_t>& flag) {
  return flag.value_or(cfg.get_uint64("experiment.seed", cfg.get_uint64("seed", 0)));
}

void cmd_gen_synth(const Config& cfg, const std::string& out_dir,
                   const std::optional<std::uint64_t>& seed_flag) {
  const std::uint64_t seed = resolved_seed(cfg, seed_flag);
  SyntheticCorpora synth = generate(generator_config_from(cfg, seed));
  std::filesystem::create_directories(out_dir);
  save_corpus(synth.source_labeled, out_dir + "/source_labeled.jsonl");
  save_corpus(synth.source_unlabeled, out_dir + "/source_unlabeled.jsonl");
  save_corpus(synth.target_unlabeled, out_dir + "/target_unlabeled.jsonl");
  save_corpus(synth.target_test, out_dir + "/target_test.jsonl");
  std::cout << "wrote 4 corpora to " << out_dir << "\n";
}

FeatureSpace build_space_from_config(const Config& cfg) {
  const Corpus labeled = load_corpus(cfg.get_string("data.labeled_train"), CorpusKind::Labeled,
                                     cfg.get_string("data.source_name", "source"));
  const Corpus src_unl = load_corpus(cfg.get_string("data.source_unlabeled"), CorpusKind::Unlabeled,
                                     cfg.get_string("data.source_name", "source"));
  const Corpus tgt_unl = load_corpus(cfg.get_string("data.target_unlabeled"), CorpusKind::Unlabeled,
                                     cfg.get_string("data.target_name", "target"));
  const CountTable counts = count_features(src_unl, tgt_unl);
  return select_pivots(counts, labeled.documents, static_cast<int>(cfg.get_int("pivots.num_pivots", 100)),
                       cfg.get_int("experiment.pivot_min_count", 10),
                       cfg.get_int("experiment.nonpivot_min_count", 10));
}

void cmd_pivots(const Config& cfg, const std::string& out_path) {
  const FeatureSpace space = build_space_from_config(cfg);
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << feature_space_to_json(space) << "\n";
  std::cout << "feature space: " << space.num_pivots << " pivots, " << space.num_nonpivots()
            << " non-pivots -> " << out_path << "\n";
}

void cmd_train_embed(const Config& cfg, const std::string& out_path,
                     const std::optional<std::uint64_t>& seed_flag) {
  const Corpus src_unl = load_corpus(cfg.get_string("data.source_unlabeled"), CorpusKind::Unlabeled, "source");
  const Corpus tgt_unl = load_corpus(cfg.get_string("data.target_unlabeled"), CorpusKind::Unlabeled, "target");
  const CountTable counts = count_features(src_unl, tgt_unl);
  const long min_count = cfg.get_int("experiment.pivot_min_count", 10);

  std::set<std::pair<std::string, std::string>> candidate_bigrams;
  for (const auto& [key, c] : counts) {
    const auto sp = key.find(' ');
    if (sp != std::string::npos && c.source >= min_count && c.target >= min_count)
      candidate_bigrams.emplace(key.substr(0, sp), key.substr(sp + 1));
  }
  std::vector<std::vector<std::string>> sentences;
  for (const auto* corpus : {&src_unl, &tgt_unl})
    for (const auto& doc : corpus->documents) sentences.push_back(rewrite_bigrams(doc.tokens, candidate_bigrams));

  SgnsConfig sgns;
  sgns.dimension = static_cast<int>(cfg.get_int("sgns.dimension", 50));
  sgns.window = static_cast<int>(cfg.get_int("sgns.window", 5));
  sgns.negatives = static_cast<int>(cfg.get_int("sgns.negatives", 5));
  sgns.epochs = static_cast<int>(cfg.get_int("sgns.epochs", 5));
  sgns.min_count = static_cast<int>(cfg.get_int("sgns.min_count", 5));
  sgns.learning_rate = cfg.get_double("sgns.learning_rate", 0.025);
  sgns.seed = derive_seed(resolved_seed(cfg, seed_flag), "setup-sgns");

  const EmbeddingTable table = train_sgns(sentences, sgns);
  save_embeddings(table, out_path);
  std::cout << "trained " << table.vectors.size() << " embeddings of dim " << table.dimension << " -> "
            << out_path << "\n";
}

FeatureSpace load_space(const Config& cfg, const std::string& key) {
  const std::string path = cfg.get_string(key);
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open feature space file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return feature_space_from_json(text);
}

void cmd_train_repr(const Config& cfg, const std::string& method_str, const std::string& embeddings_path,
                    const std::string& out_path, const std::optional<std::uint64_t>& seed_flag) {
  const Method method = method_from_name(method_str);
  if (method != Method::AeScl && method != Method::AeSclSr)
    throw std::invalid_argument("train-repr: --method must be ae_scl or ae_scl_sr");
  if (method == Method::AeSclSr && embeddings_path.empty())
    throw std::invalid_argument("train-repr: ae_scl_sr requires --embeddings");

  const FeatureSpace space = load_space(cfg, "repr.space");
  const Corpus src_unl = load_corpus(cfg.get_string("data.source_unlabeled"), CorpusKind::Unlabeled, "source");
  const Corpus tgt_unl = load_corpus(cfg.get_string("data.target_unlabeled"), CorpusKind::Unlabeled, "target");
  const std::uint64_t seed = resolved_seed(cfg, seed_flag);
  const UnlabeledSplit usplit = split_unlabeled_holdout(
      src_unl, tgt_unl, cfg.get_double("experiment.holdout_ratio", 0.2), derive_seed(seed, "usplit"));

  std::unordered_map<std::string, const Document*> index;
  for (const auto* corpus : {&src_unl, &tgt_unl})
    for (const auto& doc : corpus->documents) index.emplace(doc.id, &doc);
  auto vectorize_ids = [&](const std::vector<std::string>& ids) {
    std::vector<ReprExample> out;
    for (const auto& id : ids) {
      VectorizedDoc v = vectorize(*index.at(id), space);
      out.push_back({std::move(v.x_np), std::move(v.x_p)});
    }
    return out;
  };
  const auto train_set = vectorize_ids(usplit.train_ids);
  const auto validation_set = vectorize_ids(usplit.validation_ids);

  SgdConfig sgd;
  sgd.learning_rate = cfg.get_double("sgd.learning_rate", 0.1);
  sgd.momentum = cfg.get_double("sgd.momentum", 0.9);
  sgd.weight_decay = cfg.get_double("sgd.weight_decay", 1e-5);
  sgd.max_epochs = static_cast<int>(cfg.get_int("sgd.max_epochs", 30));
  sgd.init_scale = cfg.get_double("sgd.init_scale", 0.0);
  sgd.seed = derive_seed(seed, "repr-cli");

  ReprModel model;
  if (method == Method::AeScl) {
    model = init_model(static_cast<int>(cfg.get_int("repr.hidden_dim", 100)), space,
                       DecoderMode::Trainable, nullptr, sgd.seed, sgd.init_scale);
  } else {
    const EmbeddingTable table = load_embeddings(embeddings_path);
    const Eigen::MatrixXd decoder = build_decoder(table, space);
    model = init_model(table.dimension, space, DecoderMode::Frozen, &decoder, sgd.seed, sgd.init_scale);
  }
  auto [trained, report] = train(model, train_set, validation_set, sgd);

  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << repr_model_to_json(trained) << "\n";

  nlohmann::json rep;
  rep["epochs_run"] = report.epochs_run;
  rep["stopped_early"] = report.stopped_early;
  rep["train_loss_curve"] = report.train_loss_curve;
  rep["validation_loss_curve"] = report.validation_loss_curve;
  std::ofstream rout(out_path + ".report.json");
  if (!rout) throw std::runtime_error("cannot write " + out_path + ".report.json");
  rout << rep.dump(2) << "\n";
  std::cout << "trained " << method_str << " for " << report.epochs_run << " epochs"
            << (report.stopped_early ? " (early stop)" : "") << " -> " << out_path << "\n";
}

void cmd_train_clf(const Config& cfg, const std::string& out_path) {
  const FeatureSpace space = load_space(cfg, "clf.space");
  const Corpus train = load_corpus(cfg.get_string("clf.train"), CorpusKind::Labeled, "source");

  std::optional<ReprModel> repr;
  if (cfg.has("clf.repr_model")) {
    std::ifstream in(cfg.get_string("clf.repr_model"));
    if (!in) throw std::runtime_error("cannot open repr model: " + cfg.get_string("clf.repr_model"));
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    repr = repr_model_from_json(text);
  }

  std::vector<LabeledHybrid> data;
  for (const auto& doc : train.documents) {
    VectorizedDoc v = vectorize(doc, space);
    HybridVector h;
    h.dense_part = repr ? encode(*repr, v.x_np) : Eigen::VectorXd();
    h.sparse_part = std::move(v.x_full);
    data.emplace_back(std::move(h), doc.label.value());
  }
  const LogRegModel clf =
      train_logreg(data, cfg.get_double("classifier.l2", 1e-4),
                   static_cast<int>(cfg.get_int("classifier.max_iters", 500)),
                   cfg.get_double("classifier.tolerance", 1e-6));
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << logreg_to_json(clf) << "\n";
  std::cout << "trained classifier on " << data.size() << " examples, train accuracy "
            << accuracy(clf, data) << " -> " << out_path << "\n";
}

std::vector<int> load_label_array(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open label file: " + path);
  nlohmann::json arr;
  in >> arr;
  if (!arr.is_array()) throw std::runtime_error(path + ": expected a JSON array of 0/1");
  std::vector<int> out;
  for (const auto& v : arr) {
    const int label = v.get<int>();
    if (label != 0 && label != 1) throw std::runtime_error(path + ": labels must be 0 or 1");
    out.push_back(label);
  }
  return out;
}

void cmd_eval(const Config& cfg, bool exact_mcnemar) {
  const auto gold = load_label_array(cfg.get_string("eval.gold"));
  const auto preds_a = load_label_array(cfg.get_string("eval.a"));
  if (gold.size() != preds_a.size())
    throw std::invalid_argument("eval: gold and predictions lengths differ");
  long correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i)
    if (gold[i] == preds_a[i]) ++correct;
  std::cout << "accuracy_a\t" << static_cast<double>(correct) / gold.size() << "\n";

  if (cfg.has("eval.b")) {
    const auto preds_b = load_label_array(cfg.get_string("eval.b"));
    if (gold.size() != preds_b.size())
      throw std::invalid_argument("eval: gold and predictions lengths differ");
    correct = 0;
    for (std::size_t i = 0; i < gold.size(); ++i)
      if (gold[i] == preds_b[i]) ++correct;
    std::cout << "accuracy_b\t" << static_cast<double>(correct) / gold.size() << "\n";
    const ContingencyTable table = contingency(gold, preds_a, preds_b);
    const McNemarResult mc = mcnemar(table, exact_mcnemar);
    std::cout << "mcnemar_b\t" << table.b << "\nmcnemar_c\t" << table.c << "\nmcnemar_statistic\t"
              << mc.statistic << "\nmcnemar_p\t" << mc.p_value << "\n";
    const ClassDisagreements d = class_disagreements(gold, preds_a, preds_b);
    std::cout << "a_only_positive\t" << d.a_only_positive << "\na_only_negative\t" << d.a_only_negative
              << "\nb_only_positive\t" << d.b_only_positive << "\nb_only_negative\t" << d.b_only_negative
              << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pivot-based representation learning for cross-domain sentiment classification"};
  app.require_subcommand(1);

  std::string config_path, out_path, method_str = "ae_scl", embeddings_path;
  std::optional<std::uint64_t> seed_flag;
  bool exact_mcnemar = false;

  auto add_common = [&](CLI::App* sub, bool needs_out) {
    sub->add_option("--config", config_path, "key = value config file")->required();
    sub->add_option("--seed", seed_flag, "global seed (overrides the config)");
    if (needs_out) sub->add_option("--out", out_path, "output path")->required();
    return sub;
  };

  auto* gen_synth = add_common(app.add_subcommand("gen-synth", "generate synthetic two-domain corpora"), true);
  auto* pivots = add_common(app.add_subcommand("pivots", "build and serialize a feature space"), true);
  auto* train_embed = add_common(app.add_subcommand("train-embed", "train pivot embeddings (SGNS)"), true);
  auto* train_repr = add_common(app.add_subcommand("train-repr", "train the representation network"), true);
  train_repr->add_option("--method", method_str, "ae_scl or ae_scl_sr");
  train_repr->add_option("--embeddings", embeddings_path, "embedding text file (ae_scl_sr)");
  auto* train_clf = add_common(app.add_subcommand("train-clf", "train the sentiment classifier"), true);
  auto* eval_cmd = add_common(app.add_subcommand("eval", "accuracy and significance on saved predictions"), false);
  eval_cmd->add_flag("--allow-exact-mcnemar", exact_mcnemar, "exact binomial McNemar");
  auto* experiment = add_common(app.add_subcommand("experiment", "full source->target experiment"), true);
  experiment->add_flag("--allow-exact-mcnemar", exact_mcnemar, "exact binomial McNemar");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 1;
  }

  try {
    resolve_threads();  // validates PIVOTREPR_THREADS; pipeline is sequential
    const Config cfg = Config::parse_file(config_path);
    if (gen_synth->parsed()) cmd_gen_synth(cfg, out_path, seed_flag);
    if (pivots->parsed()) cmd_pivots(cfg, out_path);
    if (train_embed->parsed()) cmd_train_embed(cfg, out_path, seed_flag);
    if (train_repr->parsed()) cmd_train_repr(cfg, method_str, embeddings_path, out_path, seed_flag);
    if (train_clf->parsed()) cmd_train_clf(cfg, out_path);
    if (eval_cmd->parsed()) cmd_eval(cfg, exact_mcnemar);
    if (experiment->parsed()) run_experiment_manifest(cfg, out_path, seed_flag, exact_mcnemar);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
