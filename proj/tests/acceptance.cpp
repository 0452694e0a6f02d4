// End-to-end acceptance checks. Each criterion prints exactly one line:
//   [PASS] criterion N: <summary>
//   [FAIL] criterion N: <summary>
// The process exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "pivotrepr/config.hpp"
#include "pivotrepr/manifest.hpp"

using namespace pivotrepr;
namespace fs = std::filesystem;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

SparseBinaryVector random_sparse(int dim, Rng& rng, double density = 0.4) {
  SparseBinaryVector v;
  v.dimension = dim;
  for (int i = 0; i < dim; ++i)
    if (rng.uniform() < density) v.active.push_back(i);
  return v;
}

FeatureSpace space_stub(int n_pivots, int n_nonpivots) {
  FeatureSpace space;
  space.num_pivots = n_pivots;
  for (int i = 0; i < n_pivots + n_nonpivots; ++i) {
    space.feature_keys.push_back("f" + std::to_string(i));
    space.index_of.emplace(space.feature_keys.back(), i);
    space.counts.emplace(space.feature_keys.back(), DomainCounts{10, 10});
  }
  return space;
}

// --- criterion 1: analytic gradients vs central finite differences ----------

bool check_gradients(std::string& summary) {
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Rng rng(derive_seed(2024, "accept-grad", trial));
    const int n_p = 1 + static_cast<int>(rng.uniform_int(20));
    const int n_np = 1 + static_cast<int>(rng.uniform_int(20));
    const int hidden = 1 + static_cast<int>(rng.uniform_int(8));
    ReprModel model =
        init_model(hidden, space_stub(n_p, n_np), DecoderMode::Trainable, nullptr, rng.next(), 0.8);
    const SparseBinaryVector x_np = random_sparse(n_np, rng);
    const SparseBinaryVector x_p = random_sparse(n_p, rng);
    const ReprGradients g = gradients(model, x_np, x_p);
    const double step = 1e-5;
    auto loss_at = [&]() { return repr_loss(forward(model, x_np).second, x_p); };
    auto probe = [&](Eigen::MatrixXd& W, const Eigen::MatrixXd& G) {
      for (int r = 0; r < W.rows(); ++r)
        for (int c = 0; c < W.cols(); ++c) {
          const double saved = W(r, c);
          W(r, c) = saved + step;
          const double up = loss_at();
          W(r, c) = saved - step;
          const double down = loss_at();
          W(r, c) = saved;
          const double numeric = (up - down) / (2 * step);
          const double denom = std::max({std::abs(numeric), std::abs(G(r, c)), 1e-8});
          worst = std::max(worst, std::abs(numeric - G(r, c)) / denom);
        }
    };
    probe(model.w_h, g.grad_w_h);
    probe(model.w_r, *g.grad_w_r);
  }
  const double elapsed = seconds_since(start);
  std::ostringstream os;
  os << "gradient check over 100 random models, max relative error " << worst << " ("
     << elapsed << " s)";
  summary = os.str();
  return worst < 1e-4 && elapsed < 5.0;
}

// --- criterion 2: MI against a joint-table oracle ----------------------------

double mi_oracle(const std::vector<int>& f, const std::vector<int>& y) {
  const double n = static_cast<double>(f.size());
  double joint[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t i = 0; i < f.size(); ++i) joint[f[i]][y[i]] += 1.0 / n;
  const double pf[2] = {joint[0][0] + joint[0][1], joint[1][0] + joint[1][1]};
  const double py[2] = {joint[0][0] + joint[1][0], joint[0][1] + joint[1][1]};
  double mi = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      if (joint[a][b] > 0.0) mi += joint[a][b] * std::log2(joint[a][b] / (pf[a] * py[b]));
  return mi;
}

bool check_mi(std::string& summary) {
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  Rng rng(derive_seed(2024, "accept-mi"));
  for (int trial = 0; trial < 1000; ++trial) {
    const int len = 1 + static_cast<int>(rng.uniform_int(30));
    std::vector<int> f(len), y(len);
    for (int i = 0; i < len; ++i) {
      f[i] = static_cast<int>(rng.uniform_int(2));
      y[i] = static_cast<int>(rng.uniform_int(2));
    }
    worst = std::max(worst, std::abs(mutual_information(f, y) - mi_oracle(f, y)));
  }
  const double worked = mutual_information({1, 1, 1, 0}, {1, 1, 0, 0});
  const double elapsed = seconds_since(start);
  std::ostringstream os;
  os << "1000 random pairs, max abs error " << worst << "; worked value " << worked << " bits ("
     << elapsed << " s)";
  summary = os.str();
  return worst < 1e-12 && std::abs(worked - 0.3113) < 5e-5 && elapsed < 1.0;
}

// --- criterion 3: truncated SVD vs a dense hand-rolled Jacobi oracle --------

Eigen::VectorXd jacobi_singular_values(const Eigen::MatrixXd& M) {
  Eigen::MatrixXd A = M * M.transpose();
  const int n = static_cast<int>(A.rows());
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(A(p, q)) < 1e-300) continue;
        const double theta = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
        const double t =
            (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        Eigen::MatrixXd J = Eigen::MatrixXd::Identity(n, n);
        J(p, p) = c;
        J(q, q) = c;
        J(p, q) = s;
        J(q, p) = -s;
        A = J.transpose() * A * J;
      }
  }
  Eigen::VectorXd sv(n);
  for (int i = 0; i < n; ++i) sv[i] = std::sqrt(std::max(0.0, A(i, i)));
  std::sort(sv.data(), sv.data() + n, std::greater<double>());
  return sv;
}

bool check_svd(std::string& summary) {
  const auto start = std::chrono::steady_clock::now();
  double worst_sv = 0.0, worst_ortho = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    Rng rng(derive_seed(2024, "accept-svd", trial));
    const int rows = 2 + static_cast<int>(rng.uniform_int(15));
    const int cols = 2 + static_cast<int>(rng.uniform_int(15));
    Eigen::MatrixXd M(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) M(r, c) = rng.normal();
    const int k = 1 + static_cast<int>(rng.uniform_int(std::min(rows, cols)));
    auto [U, S] = truncated_svd(M, k, trial);
    const Eigen::VectorXd oracle = jacobi_singular_values(M);
    for (int i = 0; i < k; ++i) worst_sv = std::max(worst_sv, std::abs(S[i] - oracle[i]));
    const Eigen::MatrixXd gram = U.transpose() * U;
    worst_ortho = std::max(
        worst_ortho, (gram - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff());
  }
  const double elapsed = seconds_since(start);
  std::ostringstream os;
  os << "1000 random matrices up to 16x16, max singular-value error " << worst_sv
     << ", max orthonormality defect " << worst_ortho << " (" << elapsed << " s)";
  summary = os.str();
  return worst_sv < 1e-8 && worst_ortho < 1e-8 && elapsed < 30.0;
}

// --- criterion 4: McNemar worked values -------------------------------------

bool check_mcnemar(std::string& summary) {
  const McNemarResult a = mcnemar({15, 5});
  const McNemarResult b = mcnemar({5, 5});
  std::ostringstream os;
  os << "(b=15,c=5) -> statistic " << a.statistic << ", p " << a.p_value << "; (b=5,c=5) -> statistic "
     << b.statistic << ", p " << b.p_value;
  summary = os.str();
  return a.statistic == 4.05 && std::abs(a.p_value - 0.0441) < 1e-3 && b.statistic == 0.1 &&
         std::abs(b.p_value - 0.7518) < 1e-3;
}

// --- criterion 5: frozen decoder stays bit-identical -------------------------

bool check_frozen_decoder(std::string& summary) {
  Rng rng(derive_seed(2024, "accept-frozen"));
  const FeatureSpace space = space_stub(6, 30);
  Eigen::MatrixXd decoder(6, 5);
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 5; ++c) decoder(r, c) = rng.normal();
  const ReprModel model = init_model(5, space, DecoderMode::Frozen, &decoder, 31);
  std::vector<ReprExample> docs, val;
  for (int i = 0; i < 150; ++i) docs.push_back({random_sparse(30, rng), random_sparse(6, rng)});
  for (int i = 0; i < 40; ++i) val.push_back({random_sparse(30, rng), random_sparse(6, rng)});
  SgdConfig cfg;
  cfg.max_epochs = 12;
  cfg.seed = 77;
  auto [trained, report] = train(model, docs, val, cfg);
  const bool identical = trained.w_r == decoder;
  const bool moved = trained.w_h != model.w_h;
  std::ostringstream os;
  os << "after " << report.epochs_run << " training epochs, decoder "
     << (identical ? "bit-identical" : "CHANGED") << ", encoder "
     << (moved ? "updated" : "UNCHANGED");
  summary = os.str();
  return identical && moved;
}

// --- criterion 6: end-to-end adaptation gap on synthetic corpora -------------

bool check_end_to_end(std::string& summary) {
  const auto start = std::chrono::steady_clock::now();
  GeneratorConfig gc = default_generator_config();
  gc.seed = derive_seed(2024, "accept-synth");
  const SyntheticCorpora data = generate(gc);

  ExperimentConfig ec;
  ec.seed = 42;
  ec.pivot_grid = {16};
  ec.hidden_grid = {8};
  ec.svd_grid = {8};
  ec.sclmi_pivots = 48;
  ec.sclmi_epochs = 3;
  ec.sgd.max_epochs = 10;
  ec.sgns.dimension = 8;
  ec.sgns.epochs = 3;
  ec.sgns.min_count = 5;

  double acc[4] = {0, 0, 0, 0};
  for (Method m : {Method::NoDa, Method::AeScl, Method::AeSclSr, Method::SclMi}) {
    ec.method = m;
    acc[static_cast<int>(m)] =
        run_setup(data.source_labeled, data.source_unlabeled, data.target_unlabeled,
                  data.target_test, ec)
            .mean_test_accuracy;
  }
  const double no_da = acc[static_cast<int>(Method::NoDa)];
  const double ae_scl = acc[static_cast<int>(Method::AeScl)];
  const double ae_scl_sr = acc[static_cast<int>(Method::AeSclSr)];
  const double scl_mi = acc[static_cast<int>(Method::SclMi)];
  const double elapsed = seconds_since(start);
  std::ostringstream os;
  os << "mean target accuracy: no_da " << no_da << ", ae_scl " << ae_scl << ", ae_scl_sr "
     << ae_scl_sr << ", scl_mi " << scl_mi << " (" << elapsed << " s)";
  summary = os.str();
  return ae_scl >= no_da + 0.05 && ae_scl_sr >= no_da + 0.05 && scl_mi >= no_da &&
         elapsed < 300.0;
}

// --- criterion 7: early stopping on an injected increasing validation loss ---

bool check_early_stopping(std::string& summary) {
  Rng rng(derive_seed(2024, "accept-early"));
  const ReprModel model =
      init_model(3, space_stub(2, 8), DecoderMode::Trainable, nullptr, 4, 0.5);
  std::vector<ReprExample> docs;
  for (int i = 0; i < 25; ++i) docs.push_back({random_sparse(8, rng), random_sparse(2, rng)});
  SgdConfig cfg;
  cfg.max_epochs = 50;
  ReprModel epoch1;
  auto stub = [&](const ReprModel& m, int epoch) {
    if (epoch == 1) epoch1 = m;
    return static_cast<double>(epoch);
  };
  auto [out, report] = train(model, docs, docs, cfg, stub);
  std::ostringstream os;
  os << "stopped after epoch " << report.epochs_run << ", returned weights "
     << ((out.w_h == epoch1.w_h && out.w_r == epoch1.w_r) ? "exactly epoch-1" : "NOT epoch-1");
  summary = os.str();
  return report.epochs_run == 2 && report.stopped_early && out.w_h == epoch1.w_h &&
         out.w_r == epoch1.w_r;
}

// --- criterion 8: byte-identical experiment outputs --------------------------

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool check_determinism(std::string& summary) {
  const Config cfg = Config::parse_string(
      "[data]\n"
      "synthetic = true\n"
      "[synth]\n"
      "source_labeled_size = 300\n"
      "source_unlabeled_size = 300\n"
      "target_unlabeled_size = 300\n"
      "target_test_size = 150\n"
      "filler_words = 40\n"
      "[experiment]\n"
      "methods = no_da, ae_scl_sr\n"
      "pivot_grid = 12\n"
      "sclmi_pivots = 24\n"
      "[folds]\n"
      "k = 2\n"
      "train_size = 240\n"
      "dev_size = 60\n"
      "[sgd]\n"
      "max_epochs = 3\n"
      "[sgns]\n"
      "dimension = 6\n"
      "epochs = 2\n"
      "min_count = 3\n");
  const fs::path base = fs::temp_directory_path() / "pivotrepr_accept_determinism";
  fs::remove_all(base);
  run_experiment_manifest(cfg, (base / "run1").string(), 9);
  run_experiment_manifest(cfg, (base / "run2").string(), 9);
  const bool tsv = read_file(base / "run1/results.tsv") == read_file(base / "run2/results.tsv");
  const bool json = read_file(base / "run1/summary.json") == read_file(base / "run2/summary.json");
  const bool nonempty = !read_file(base / "run1/results.tsv").empty();
  fs::remove_all(base);
  std::ostringstream os;
  os << "repeated experiment runs: results.tsv " << (tsv ? "identical" : "DIFFER")
     << ", summary.json " << (json ? "identical" : "DIFFER");
  summary = os.str();
  return tsv && json && nonempty;
}

// --- criterion 9: user-supplied corpora run through the documented pipeline --

bool check_external_data_path(std::string& summary) {
  // Full-scale reference numbers need the original review corpora, which are
  // not bundled; here we verify the documented JSONL interface drives the
  // complete experiment pipeline when a user supplies their own files.
  const fs::path base = fs::temp_directory_path() / "pivotrepr_accept_external";
  fs::remove_all(base);
  fs::create_directories(base);

  GeneratorConfig gc = default_generator_config();
  gc.source_labeled_size = 300;
  gc.source_unlabeled_size = 300;
  gc.target_unlabeled_size = 300;
  gc.target_test_size = 150;
  gc.filler_vocab.resize(40);
  gc.seed = derive_seed(2024, "accept-external");
  const SyntheticCorpora data = generate(gc);
  save_corpus(data.source_labeled, (base / "source_labeled.jsonl").string());
  save_corpus(data.source_unlabeled, (base / "source_unlabeled.jsonl").string());
  save_corpus(data.target_unlabeled, (base / "target_unlabeled.jsonl").string());
  save_corpus(data.target_test, (base / "target_test.jsonl").string());

  const Config cfg = Config::parse_string(
      "[data]\n"
      "source_labeled = " + (base / "source_labeled.jsonl").string() + "\n" +
      "source_unlabeled = " + (base / "source_unlabeled.jsonl").string() + "\n" +
      "target_unlabeled = " + (base / "target_unlabeled.jsonl").string() + "\n" +
      "target_test = " + (base / "target_test.jsonl").string() + "\n" +
      "source_name = books\n"
      "target_name = dvd\n"
      "[experiment]\n"
      "methods = no_da\n"
      "pivot_grid = 12\n"
      "[folds]\n"
      "k = 2\n"
      "train_size = 240\n"
      "dev_size = 60\n");
  run_experiment_manifest(cfg, (base / "out").string(), 3);
  const std::string tsv = read_file(base / "out/results.tsv");
  fs::remove_all(base);
  const bool ok = tsv.find("books\tdvd\tno_da") != std::string::npos;
  summary = ok ? "documented JSONL corpora drive the full experiment pipeline; "
                 "full-scale reference accuracies are documentation-only targets"
               : "pipeline failed on user-supplied JSONL corpora";
  return ok;
}

// --- criterion 10: SGNS sanity ----------------------------------------------

bool check_sgns(std::string& summary) {
  const auto start = std::chrono::steady_clock::now();
  int wins = 0;
  bool losses_fell = true;
  for (int run = 0; run < 20; ++run) {
    Rng rng(derive_seed(2024, "accept-sgns", run));
    std::vector<std::vector<std::string>> corpus;
    for (int i = 0; i < 150; ++i) {
      // "sun"/"moon" always co-occur; "rock" and "fish" never share a sentence
      corpus.push_back({"sun", "moon", "sun", "moon"});
      corpus.push_back(rng.uniform() < 0.5 ? std::vector<std::string>{"rock", "dust", "rock", "dust"}
                                           : std::vector<std::string>{"fish", "weed", "fish", "weed"});
    }
    SgnsConfig cfg;
    cfg.dimension = 10;
    cfg.epochs = 5;
    cfg.min_count = 1;
    cfg.seed = derive_seed(2024, "accept-sgns-train", run);
    SgnsReport report;
    const EmbeddingTable table = train_sgns(corpus, cfg, &report);
    auto cosine = [&](const std::string& a, const std::string& b) {
      const Eigen::VectorXd& va = table.vectors.at(a);
      const Eigen::VectorXd& vb = table.vectors.at(b);
      return va.dot(vb) / (va.norm() * vb.norm());
    };
    if (cosine("sun", "moon") > cosine("rock", "fish")) ++wins;
    if (report.epoch_losses.back() >= report.epoch_losses.front()) losses_fell = false;
  }
  const double elapsed = seconds_since(start);
  std::ostringstream os;
  os << "co-occurring pair beat independent pair in " << wins << "/20 runs, per-epoch loss "
     << (losses_fell ? "decreased" : "DID NOT decrease") << " (" << elapsed << " s)";
  summary = os.str();
  return wins >= 19 && losses_fell && elapsed < 30.0;
}

}  // namespace

int main() {
  using Check = std::function<bool(std::string&)>;
  const std::vector<std::pair<std::string, Check>> criteria = {
      {"gradient correctness", check_gradients},
      {"mutual information oracle", check_mi},
      {"truncated SVD oracle", check_svd},
      {"McNemar worked values", check_mcnemar},
      {"frozen decoder contract", check_frozen_decoder},
      {"end-to-end domain adaptation", check_end_to_end},
      {"early stopping", check_early_stopping},
      {"experiment determinism", check_determinism},
      {"user-supplied corpora pipeline", check_external_data_path},
      {"SGNS sanity", check_sgns},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    std::string summary;
    bool ok = false;
    try {
      ok = criteria[i].second(summary);
    } catch (const std::exception& e) {
      summary = std::string("exception: ") + e.what();
    }
    std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << (i + 1) << " ("
              << criteria[i].first << "): " << summary << std::endl;
    if (!ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
