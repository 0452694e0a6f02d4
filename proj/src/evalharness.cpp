#include "pivotrepr/evalharness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <unordered_map>

#include <json.hpp>

#include "pivotrepr/features.hpp"

namespace pivotrepr {

std::string method_name(Method m) {
  switch (m) {
    case Method::AeScl: return "ae_scl";
    case Method::AeSclSr: return "ae_scl_sr";
    case Method::SclMi: return "scl_mi";
    case Method::NoDa: return "no_da";
  }
  throw std::logic_error("method_name: bad enum");
}

Method method_from_name(const std::string& name) {
  if (name == "ae_scl") return Method::AeScl;
  if (name == "ae_scl_sr") return Method::AeSclSr;
  if (name == "scl_mi") return Method::SclMi;
  if (name == "no_da") return Method::NoDa;
  throw std::invalid_argument("unknown method: " + name);
}

std::size_t tune_hyperparams(const std::vector<GridPoint>& grid) {
  if (grid.empty()) throw std::invalid_argument("tune_hyperparams: empty grid");
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const auto& a = grid[i];
    const auto& b = grid[best];
    if (a.dev_accuracy > b.dev_accuracy ||
        (a.dev_accuracy == b.dev_accuracy &&
         (a.pivots < b.pivots || (a.pivots == b.pivots && a.hidden_or_k < b.hidden_or_k))))
      best = i;
  }
  return best;
}

McNemarResult mcnemar(const ContingencyTable& table, bool exact) {
  if (table.b < 0 || table.c < 0) throw std::invalid_argument("mcnemar: negative count");
  McNemarResult result;
  const long n = table.b + table.c;
  if (n == 0) return result;  // statistic 0, p 1 by convention

  const double diff = std::abs(static_cast<double>(table.b - table.c)) - 1.0;
  result.statistic = diff * diff / static_cast<double>(n);

  if (exact) {
    // two-sided binomial(n, 1/2) tail
    const long k = std::min(table.b, table.c);
    double tail = 0.0;
    for (long i = 0; i <= k; ++i) {
      const double log_p = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) -
                           n * std::log(2.0);
      tail += std::exp(log_p);
    }
    result.p_value = std::min(1.0, 2.0 * tail);
  } else {
    result.p_value = std::erfc(std::sqrt(result.statistic / 2.0));
    result.p_value = std::clamp(result.p_value, 0.0, 1.0);
  }
  return result;
}

bool setup_significance(const std::vector<ContingencyTable>& per_fold_tables, double alpha,
                        bool exact) {
  if (per_fold_tables.empty()) throw std::invalid_argument("setup_significance: no folds");
  for (const auto& table : per_fold_tables)
    if (!(mcnemar(table, exact).p_value < alpha)) return false;
  return true;
}

ContingencyTable contingency(const std::vector<int>& gold, const std::vector<int>& preds_a,
                             const std::vector<int>& preds_b) {
  if (gold.size() != preds_a.size() || gold.size() != preds_b.size())
    throw std::invalid_argument("contingency: length mismatch");
  ContingencyTable table;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool a_ok = preds_a[i] == gold[i];
    const bool b_ok = preds_b[i] == gold[i];
    if (a_ok && !b_ok) table.b++;
    if (!a_ok && b_ok) table.c++;
  }
  return table;
}

ClassDisagreements class_disagreements(const std::vector<int>& gold, const std::vector<int>& preds_a,
                                       const std::vector<int>& preds_b) {
  if (gold.size() != preds_a.size() || gold.size() != preds_b.size())
    throw std::invalid_argument("class_disagreements: length mismatch");
  ClassDisagreements d;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool a_ok = preds_a[i] == gold[i];
    const bool b_ok = preds_b[i] == gold[i];
    if (a_ok == b_ok) continue;
    if (a_ok)
      (gold[i] == 1 ? d.a_only_positive : d.a_only_negative)++;
    else
      (gold[i] == 1 ? d.b_only_positive : d.b_only_negative)++;
  }
  return d;
}

namespace {

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

long cosine_rank(const std::vector<Eigen::VectorXd>& reprs, int i, int j) {
  const double ref = cosine(reprs[i], reprs[j]);
  long better = 0;
  const int n = static_cast<int>(reprs.size());
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q)
      if (cosine(reprs[p], reprs[q]) > ref) ++better;
  return better + 1;  // ties share the lower rank
}

}  // namespace

long similarity_rank_diff(const std::vector<Eigen::VectorXd>& reprs_a,
                          const std::vector<Eigen::VectorXd>& reprs_b, int doc_i, int doc_j) {
  const int n = static_cast<int>(reprs_a.size());
  if (n < 2 || reprs_b.size() != reprs_a.size())
    throw std::invalid_argument("similarity_rank_diff: need >= 2 documents in both models");
  if (doc_i < 0 || doc_j < 0 || doc_i >= n || doc_j >= n || doc_i == doc_j)
    throw std::invalid_argument("similarity_rank_diff: bad document pair");
  for (const auto* reprs : {&reprs_a, &reprs_b})
    if ((*reprs)[doc_i].norm() == 0.0 || (*reprs)[doc_j].norm() == 0.0)
      throw std::invalid_argument("similarity_rank_diff: zero vector in queried pair");
  return cosine_rank(reprs_a, doc_i, doc_j) - cosine_rank(reprs_b, doc_i, doc_j);
}

namespace {

// Per-fold caches keyed by pivot count (the only axis the feature space
// depends on within a fold).
struct FoldCache {
  std::map<int, FeatureSpace> spaces;
  std::map<int, std::vector<ReprExample>> unlabeled_train;
  std::map<int, std::vector<ReprExample>> unlabeled_validation;
  std::map<int, PivotPredictorMatrix> predictors;
};

std::vector<const Document*> docs_by_id(const Corpus& corpus, const std::vector<std::string>& ids) {
  std::unordered_map<std::string, const Document*> index;
  for (const auto& doc : corpus.documents) index.emplace(doc.id, &doc);
  std::vector<const Document*> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    auto it = index.find(id);
    if (it == index.end()) throw std::logic_error("run_setup: unknown document id " + id);
    out.push_back(it->second);
  }
  return out;
}

std::vector<ReprExample> vectorize_unlabeled(const std::vector<const Document*>& docs,
                                             const FeatureSpace& space) {
  std::vector<ReprExample> out;
  out.reserve(docs.size());
  for (const auto* doc : docs) {
    VectorizedDoc v = vectorize(*doc, space);
    out.push_back({std::move(v.x_np), std::move(v.x_p)});
  }
  return out;
}

}  // namespace

SetupResult run_setup(const Corpus& source_labeled, const Corpus& source_unlabeled,
                      const Corpus& target_unlabeled, const Corpus& target_test,
                      const ExperimentConfig& cfg) {
  if (source_labeled.kind != CorpusKind::Labeled || target_test.kind != CorpusKind::Labeled)
    throw std::invalid_argument("run_setup: source_labeled and target_test must be labeled");

  SetupResult result;
  result.source = source_labeled.domain_name;
  result.target = target_test.domain_name;
  result.method = cfg.method;
  for (const auto& doc : target_test.documents) result.gold.push_back(doc.label.value());

  const auto folds = make_folds(source_labeled, cfg.folds.k, cfg.folds.train_size, cfg.folds.dev_size,
                                derive_seed(cfg.seed, "folds"));
  const auto usplit = split_unlabeled_holdout(source_unlabeled, target_unlabeled,
                                              cfg.unlabeled_holdout_ratio, derive_seed(cfg.seed, "usplit"));
  const CountTable counts = count_features(source_unlabeled, target_unlabeled);

  // Pooled unlabeled documents, source first. Ids must be unique per corpus.
  std::unordered_map<std::string, const Document*> unlabeled_index;
  for (const auto* corpus : {&source_unlabeled, &target_unlabeled})
    for (const auto& doc : corpus->documents) unlabeled_index.emplace(doc.id, &doc);
  auto pooled = [&](const std::vector<std::string>& ids) {
    std::vector<const Document*> out;
    for (const auto& id : ids) out.push_back(unlabeled_index.at(id));
    return out;
  };
  const auto unlabeled_train_docs = pooled(usplit.train_ids);
  const auto unlabeled_validation_docs = pooled(usplit.validation_ids);

  // AE-SCL-SR: one embedding table per setup, trained on the bigram-rewritten
  // pooled unlabeled data. Fused tokens cover every pivot-candidate bigram, a
  // superset of any fold's pivot set.
  EmbeddingTable embedding_table;
  if (cfg.method == Method::AeSclSr) {
    std::set<std::pair<std::string, std::string>> candidate_bigrams;
    for (const auto& [key, c] : counts) {
      const auto sp = key.find(' ');
      if (sp == std::string::npos) continue;
      if (c.source >= cfg.pivot_min_count && c.target >= cfg.pivot_min_count)
        candidate_bigrams.emplace(key.substr(0, sp), key.substr(sp + 1));
    }
    std::vector<std::vector<std::string>> sentences;
    for (const auto* corpus : {&source_unlabeled, &target_unlabeled})
      for (const auto& doc : corpus->documents)
        sentences.push_back(rewrite_bigrams(doc.tokens, candidate_bigrams));
    SgnsConfig sgns_cfg = cfg.sgns;
    sgns_cfg.seed = derive_seed(cfg.seed, "setup-sgns");
    embedding_table = train_sgns(sentences, sgns_cfg);
  }

  for (std::size_t f = 0; f < folds.size(); ++f) {
    const auto train_docs = docs_by_id(source_labeled, folds[f].train_ids);
    const auto dev_docs = docs_by_id(source_labeled, folds[f].dev_ids);
    std::vector<Document> train_docs_copy;
    for (const auto* d : train_docs) train_docs_copy.push_back(*d);

    std::vector<GridPoint> grid;
    switch (cfg.method) {
      case Method::NoDa:
        grid.push_back({cfg.pivot_grid.front(), 0, 0.0});
        break;
      case Method::AeScl:
        for (int p : cfg.pivot_grid)
          for (int h : cfg.hidden_grid) grid.push_back({p, h, 0.0});
        break;
      case Method::AeSclSr:
        for (int p : cfg.pivot_grid) grid.push_back({p, cfg.sgns.dimension, 0.0});
        break;
      case Method::SclMi:
        for (int k : cfg.svd_grid) grid.push_back({cfg.sclmi_pivots, k, 0.0});
        break;
    }

    FoldCache cache;
    auto space_for = [&](int pivots) -> const FeatureSpace& {
      auto it = cache.spaces.find(pivots);
      if (it == cache.spaces.end()) {
        it = cache.spaces
                 .emplace(pivots, select_pivots(counts, train_docs_copy, pivots, cfg.pivot_min_count,
                                                cfg.nonpivot_min_count))
                 .first;
      }
      return it->second;
    };
    auto unlabeled_for = [&](int pivots) -> const std::vector<ReprExample>& {
      auto it = cache.unlabeled_train.find(pivots);
      if (it == cache.unlabeled_train.end()) {
        it = cache.unlabeled_train.emplace(pivots, vectorize_unlabeled(unlabeled_train_docs, space_for(pivots)))
                 .first;
        cache.unlabeled_validation.emplace(
            pivots, vectorize_unlabeled(unlabeled_validation_docs, space_for(pivots)));
      }
      return it->second;
    };

    // Evaluates one grid point; fills test predictions when requested.
    auto evaluate_point = [&](std::size_t grid_idx, bool want_test, FoldResult* out) -> double {
      const GridPoint& point = grid[grid_idx];
      const FeatureSpace& space = space_for(point.pivots);
      const std::uint64_t point_seed =
          derive_seed(cfg.seed, "fold-grid", f * 1000003ULL + grid_idx);

      std::function<Eigen::VectorXd(const SparseBinaryVector&)> dense_of;
      switch (cfg.method) {
        case Method::NoDa:
          dense_of = [](const SparseBinaryVector&) { return Eigen::VectorXd(); };
          break;
        case Method::AeScl:
        case Method::AeSclSr: {
          const auto& utrain = unlabeled_for(point.pivots);
          const auto& uval = cache.unlabeled_validation.at(point.pivots);
          SgdConfig sgd = cfg.sgd;
          sgd.seed = point_seed;
          ReprModel model;
          if (cfg.method == Method::AeScl) {
            model = init_model(point.hidden_or_k, space, DecoderMode::Trainable, nullptr, point_seed,
                               cfg.sgd.init_scale);
          } else {
            const Eigen::MatrixXd decoder = build_decoder(embedding_table, space);
            model = init_model(embedding_table.dimension, space, DecoderMode::Frozen, &decoder,
                               point_seed, cfg.sgd.init_scale);
          }
          auto [trained, report] = train(model, utrain, uval, sgd);
          dense_of = [m = std::move(trained)](const SparseBinaryVector& x_np) {
            return encode(m, x_np);
          };
          break;
        }
        case Method::SclMi: {
          auto it = cache.predictors.find(point.pivots);
          if (it == cache.predictors.end()) {
            it = cache.predictors
                     .emplace(point.pivots,
                              train_pivot_predictors(unlabeled_for(point.pivots), space, cfg.sclmi_l2,
                                                     cfg.sclmi_epochs,
                                                     derive_seed(cfg.seed, "sclmi-fold", f)))
                     .first;
          }
          Projection proj =
              make_projection(it->second, point.hidden_or_k, derive_seed(cfg.seed, "svd", f));
          dense_of = [p = std::move(proj)](const SparseBinaryVector& x_np) { return project(p, x_np); };
          break;
        }
      }

      auto hybridize = [&](const Document& doc) {
        VectorizedDoc v = vectorize(doc, space);
        HybridVector h;
        h.dense_part = dense_of(v.x_np);
        h.sparse_part = std::move(v.x_full);
        return h;
      };

      std::vector<LabeledHybrid> train_data;
      for (const auto* doc : train_docs) train_data.emplace_back(hybridize(*doc), doc->label.value());
      const LogRegModel clf = train_logreg(train_data, cfg.classifier_l2, cfg.classifier_max_iters,
                                           cfg.classifier_tolerance);

      std::vector<LabeledHybrid> dev_data;
      for (const auto* doc : dev_docs) dev_data.emplace_back(hybridize(*doc), doc->label.value());
      const double dev_acc = accuracy(clf, dev_data);

      if (want_test && out) {
        long correct = 0;
        for (const auto& doc : target_test.documents) {
          const int pred = predict(clf, hybridize(doc)).second;
          out->predictions.push_back(pred);
          if (pred == doc.label.value()) ++correct;
        }
        out->test_accuracy =
            static_cast<double>(correct) / static_cast<double>(target_test.documents.size());
      }
      return dev_acc;
    };

    for (std::size_t g = 0; g < grid.size(); ++g) grid[g].dev_accuracy = evaluate_point(g, false, nullptr);
    const std::size_t chosen = tune_hyperparams(grid);

    FoldResult fold_result;
    fold_result.fold_index = static_cast<int>(f);
    fold_result.chosen_pivots = grid[chosen].pivots;
    fold_result.chosen_hidden_or_k = grid[chosen].hidden_or_k;
    fold_result.dev_accuracy = evaluate_point(chosen, true, &fold_result);
    result.per_fold.push_back(std::move(fold_result));
  }

  double sum = 0.0;
  for (const auto& fr : result.per_fold) sum += fr.test_accuracy;
  result.mean_test_accuracy = sum / static_cast<double>(result.per_fold.size());
  return result;
}

void write_results_tsv(const std::vector<SetupResult>& results, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write results file: " + path);
  out << "source\ttarget\tmethod\tfold\tpivots\thidden_or_k\tdev_acc\ttest_acc\n";
  char buf[64];
  for (const auto& setup : results) {
    for (const auto& fr : setup.per_fold) {
      std::snprintf(buf, sizeof(buf), "%.6f\t%.6f", fr.dev_accuracy, fr.test_accuracy);
      out << setup.source << '\t' << setup.target << '\t' << method_name(setup.method) << '\t'
          << fr.fold_index << '\t' << fr.chosen_pivots << '\t' << fr.chosen_hidden_or_k << '\t' << buf
          << '\n';
    }
  }
}

void write_summary_json(const std::vector<SetupResult>& results, double alpha, bool exact_mcnemar,
                        const std::string& path) {
  nlohmann::json summary;
  summary["format_version"] = 1;
  summary["alpha"] = alpha;
  summary["mcnemar_variant"] = exact_mcnemar ? "exact_binomial" : "chi_square_corrected";

  nlohmann::json setups = nlohmann::json::array();
  for (const auto& setup : results) {
    nlohmann::json entry;
    entry["source"] = setup.source;
    entry["target"] = setup.target;
    entry["method"] = method_name(setup.method);
    entry["mean_test_accuracy"] = setup.mean_test_accuracy;
    nlohmann::json folds = nlohmann::json::array();
    for (const auto& fr : setup.per_fold) {
      folds.push_back({{"fold", fr.fold_index},
                       {"pivots", fr.chosen_pivots},
                       {"hidden_or_k", fr.chosen_hidden_or_k},
                       {"dev_accuracy", fr.dev_accuracy},
                       {"test_accuracy", fr.test_accuracy}});
    }
    entry["per_fold"] = folds;
    setups.push_back(std::move(entry));
  }
  summary["setups"] = std::move(setups);

  // Pairwise significance within each source->target group, per-fold McNemar.
  nlohmann::json significance = nlohmann::json::array();
  for (std::size_t a = 0; a < results.size(); ++a) {
    for (std::size_t b = a + 1; b < results.size(); ++b) {
      const auto& ra = results[a];
      const auto& rb = results[b];
      if (ra.source != rb.source || ra.target != rb.target || ra.gold != rb.gold) continue;
      if (ra.per_fold.size() != rb.per_fold.size()) continue;
      std::vector<ContingencyTable> tables;
      nlohmann::json p_values = nlohmann::json::array();
      for (std::size_t f = 0; f < ra.per_fold.size(); ++f) {
        tables.push_back(contingency(ra.gold, ra.per_fold[f].predictions, rb.per_fold[f].predictions));
        p_values.push_back(mcnemar(tables.back(), exact_mcnemar).p_value);
      }
      significance.push_back({{"source", ra.source},
                              {"target", ra.target},
                              {"method_a", method_name(ra.method)},
                              {"method_b", method_name(rb.method)},
                              {"per_fold_p", std::move(p_values)},
                              {"significant", setup_significance(tables, alpha, exact_mcnemar)}});
    }
  }
  summary["significance"] = std::move(significance);

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write summary file: " + path);
  out << summary.dump(2) << '\n';
}

}  // namespace pivotrepr
