#include "pivotrepr/manifest.hpp"

#include <filesystem>

namespace pivotrepr {

namespace {

std::vector<int> to_int_vector(const std::vector<long>& v) {
  return std::vector<int>(v.begin(), v.end());
}

}  // namespace

ExperimentConfig experiment_config_from(const Config& cfg, Method method, std::uint64_t seed) {
  ExperimentConfig ec;
  ec.method = method;
  ec.seed = seed;
  ec.pivot_grid = to_int_vector(cfg.get_int_list("experiment.pivot_grid", {100, 200, 300, 400, 500}));
  ec.hidden_grid = to_int_vector(cfg.get_int_list("experiment.hidden_grid", {100, 300, 500}));
  ec.svd_grid = to_int_vector(cfg.get_int_list("experiment.svd_grid", {50, 100, 150}));
  ec.sclmi_pivots = static_cast<int>(cfg.get_int("experiment.sclmi_pivots", 1000));
  ec.sclmi_epochs = static_cast<int>(cfg.get_int("experiment.sclmi_epochs", 3));
  ec.sclmi_l2 = cfg.get_double("experiment.sclmi_l2", 1e-4);
  ec.pivot_min_count = cfg.get_int("experiment.pivot_min_count", 10);
  ec.nonpivot_min_count = cfg.get_int("experiment.nonpivot_min_count", 10);
  ec.unlabeled_holdout_ratio = cfg.get_double("experiment.holdout_ratio", 0.2);

  ec.folds.k = static_cast<int>(cfg.get_int("folds.k", 5));
  ec.folds.train_size = static_cast<int>(cfg.get_int("folds.train_size", 1600));
  ec.folds.dev_size = static_cast<int>(cfg.get_int("folds.dev_size", 400));

  ec.sgd.learning_rate = cfg.get_double("sgd.learning_rate", 0.1);
  ec.sgd.momentum = cfg.get_double("sgd.momentum", 0.9);
  ec.sgd.weight_decay = cfg.get_double("sgd.weight_decay", 1e-5);
  ec.sgd.max_epochs = static_cast<int>(cfg.get_int("sgd.max_epochs", 30));
  ec.sgd.init_scale = cfg.get_double("sgd.init_scale", 0.0);

  ec.sgns.dimension = static_cast<int>(cfg.get_int("sgns.dimension", 50));
  ec.sgns.window = static_cast<int>(cfg.get_int("sgns.window", 5));
  ec.sgns.negatives = static_cast<int>(cfg.get_int("sgns.negatives", 5));
  ec.sgns.epochs = static_cast<int>(cfg.get_int("sgns.epochs", 5));
  ec.sgns.min_count = static_cast<int>(cfg.get_int("sgns.min_count", 5));
  ec.sgns.learning_rate = cfg.get_double("sgns.learning_rate", 0.025);

  ec.classifier_l2 = cfg.get_double("classifier.l2", 1e-4);
  ec.classifier_max_iters = static_cast<int>(cfg.get_int("classifier.max_iters", 500));
  ec.classifier_tolerance = cfg.get_double("classifier.tolerance", 1e-6);
  return ec;
}

GeneratorConfig generator_config_from(const Config& cfg, std::uint64_t seed) {
  GeneratorConfig gc = default_generator_config();
  auto rebuild = [&](std::vector<std::string>& v, const std::string& stem, long n) {
    v.clear();
    for (long i = 0; i < n; ++i) v.push_back(stem + std::to_string(i));
  };
  const long shared = cfg.get_int("synth.shared_words", 8);
  const long domain = cfg.get_int("synth.domain_words", 8);
  const long fillers = cfg.get_int("synth.filler_words", 100);
  rebuild(gc.shared_sentiment_vocab[1], "sharedpos", shared);
  rebuild(gc.shared_sentiment_vocab[0], "sharedneg", shared);
  rebuild(gc.source_sentiment_vocab[1], "srcpos", domain);
  rebuild(gc.source_sentiment_vocab[0], "srcneg", domain);
  rebuild(gc.target_sentiment_vocab[1], "tgtpos", domain);
  rebuild(gc.target_sentiment_vocab[0], "tgtneg", domain);
  rebuild(gc.filler_vocab, "filler", fillers);

  gc.filler_len_min = static_cast<int>(cfg.get_int("synth.filler_len_min", 20));
  gc.filler_len_max = static_cast<int>(cfg.get_int("synth.filler_len_max", 40));
  gc.pivot_emission_prob = cfg.get_double("synth.pivot_emission_prob", 0.12);
  gc.domain_word_emission_prob = cfg.get_double("synth.domain_word_emission_prob", 0.5);
  gc.source_labeled_size = static_cast<int>(cfg.get_int("synth.source_labeled_size", 2000));
  gc.source_unlabeled_size = static_cast<int>(cfg.get_int("synth.source_unlabeled_size", 2000));
  gc.target_unlabeled_size = static_cast<int>(cfg.get_int("synth.target_unlabeled_size", 2000));
  gc.target_test_size = static_cast<int>(cfg.get_int("synth.target_test_size", 1000));
  gc.seed = seed;
  return gc;
}

void run_experiment_manifest(const Config& cfg, const std::string& out_dir,
                             std::optional<std::uint64_t> seed_override, bool exact_mcnemar) {
  const std::uint64_t seed = seed_override.value_or(cfg.get_uint64("experiment.seed", 0));

  Corpus source_labeled, source_unlabeled, target_unlabeled, target_test;
  if (cfg.get_bool("data.synthetic", false)) {
    SyntheticCorpora synth = generate(generator_config_from(cfg, derive_seed(seed, "synth")));
    source_labeled = std::move(synth.source_labeled);
    source_unlabeled = std::move(synth.source_unlabeled);
    target_unlabeled = std::move(synth.target_unlabeled);
    target_test = std::move(synth.target_test);
  } else {
    const std::string source_name = cfg.get_string("data.source_name", "source");
    const std::string target_name = cfg.get_string("data.target_name", "target");
    source_labeled = load_corpus(cfg.get_string("data.source_labeled"), CorpusKind::Labeled, source_name);
    source_unlabeled =
        load_corpus(cfg.get_string("data.source_unlabeled"), CorpusKind::Unlabeled, source_name);
    target_unlabeled =
        load_corpus(cfg.get_string("data.target_unlabeled"), CorpusKind::Unlabeled, target_name);
    target_test = load_corpus(cfg.get_string("data.target_test"), CorpusKind::Labeled, target_name);
  }

  std::vector<Method> methods;
  if (cfg.has("experiment.methods"))
    for (const auto& name : cfg.get_string_list("experiment.methods")) methods.push_back(method_from_name(name));
  else
    methods = {Method::NoDa, Method::AeScl, Method::AeSclSr, Method::SclMi};

  std::vector<SetupResult> results;
  for (Method method : methods) {
    // One shared seed: identical folds and splits across methods.
    results.push_back(run_setup(source_labeled, source_unlabeled, target_unlabeled, target_test,
                                experiment_config_from(cfg, method, seed)));
  }

  std::filesystem::create_directories(out_dir);
  const double alpha = cfg.get_double("experiment.alpha", 0.05);
  write_results_tsv(results, out_dir + "/results.tsv");
  write_summary_json(results, alpha, exact_mcnemar, out_dir + "/summary.json");
}

}  // namespace pivotrepr
