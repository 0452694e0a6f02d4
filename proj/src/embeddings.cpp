#include "pivotrepr/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace pivotrepr {

std::vector<std::string> rewrite_bigrams(
    const std::vector<std::string>& tokens,
    const std::set<std::pair<std::string, std::string>>& bigram_pivots) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    out.push_back(tokens[i]);
    if (i + 1 < tokens.size() && bigram_pivots.count({tokens[i], tokens[i + 1]}))
      out.push_back(tokens[i] + "-" + tokens[i + 1]);
  }
  return out;
}

EmbeddingTable train_sgns(const std::vector<std::vector<std::string>>& corpus,
                          const SgnsConfig& config, SgnsReport* report) {
  if (corpus.empty()) throw std::invalid_argument("train_sgns: empty corpus");

  std::unordered_map<std::string, long> raw_counts;
  for (const auto& sentence : corpus)
    for (const auto& tok : sentence) raw_counts[tok]++;

  struct VocabEntry {
    std::string token;
    long count;
  };
  std::vector<VocabEntry> vocab;
  for (const auto& [tok, c] : raw_counts)
    if (c >= config.min_count) vocab.push_back({tok, c});
  if (vocab.empty()) throw std::invalid_argument("train_sgns: no token passes min_count");
  std::sort(vocab.begin(), vocab.end(), [](const VocabEntry& a, const VocabEntry& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.token < b.token;
  });
  std::unordered_map<std::string, int> word_id;
  for (int i = 0; i < static_cast<int>(vocab.size()); ++i) word_id.emplace(vocab[i].token, i);
  const int v = static_cast<int>(vocab.size());
  const int dim = config.dimension;

  // Noise distribution: unigram counts raised to 0.75.
  std::vector<double> noise_cdf(v);
  double cum = 0.0;
  for (int i = 0; i < v; ++i) {
    cum += std::pow(static_cast<double>(vocab[i].count), 0.75);
    noise_cdf[i] = cum;
  }

  Rng rng(derive_seed(config.seed, "sgns"));
  auto sample_noise = [&]() -> int {
    const double r = rng.uniform() * cum;
    return static_cast<int>(std::upper_bound(noise_cdf.begin(), noise_cdf.end(), r) - noise_cdf.begin());
  };

  Eigen::MatrixXd input = Eigen::MatrixXd::Zero(dim, v);
  Eigen::MatrixXd output = Eigen::MatrixXd::Zero(dim, v);
  for (int i = 0; i < v; ++i)
    for (int d = 0; d < dim; ++d) input(d, i) = rng.uniform(-0.5 / dim, 0.5 / dim);

  // Pre-map sentences to kept word ids.
  std::vector<std::vector<int>> sentences;
  long total_positions = 0;
  for (const auto& sentence : corpus) {
    std::vector<int> ids;
    for (const auto& tok : sentence)
      if (auto it = word_id.find(tok); it != word_id.end()) ids.push_back(it->second);
    total_positions += static_cast<long>(ids.size());
    sentences.push_back(std::move(ids));
  }

  const double total_work = static_cast<double>(total_positions) * config.epochs;
  long processed = 0;
  Eigen::VectorXd accum(dim);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    double loss_sum = 0.0;
    long pair_count = 0;
    for (const auto& ids : sentences) {
      for (std::size_t t = 0; t < ids.size(); ++t) {
        ++processed;
        const double lr = std::max(config.learning_rate * (1.0 - processed / total_work),
                                   config.learning_rate * 1e-4);
        const int b = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(config.window)));
        const int center = ids[t];
        const std::size_t lo = t >= static_cast<std::size_t>(b) ? t - b : 0;
        const std::size_t hi = std::min(ids.size() - 1, t + static_cast<std::size_t>(b));
        for (std::size_t c = lo; c <= hi; ++c) {
          if (c == t) continue;
          accum.setZero();
          // positive pair plus `negatives` noise words
          for (int s = 0; s <= config.negatives; ++s) {
            const int target = s == 0 ? ids[c] : sample_noise();
            const double label = s == 0 ? 1.0 : 0.0;
            if (s > 0 && target == ids[c]) continue;
            const double z = sigmoid(input.col(center).dot(output.col(target)));
            loss_sum -= std::log(std::max(label > 0.5 ? z : 1.0 - z, 1e-10));
            const double g = (z - label) * lr;
            accum += g * output.col(target);
            output.col(target) -= g * input.col(center);
          }
          input.col(center) -= accum;
          ++pair_count;
        }
      }
    }
    if (report) report->epoch_losses.push_back(pair_count > 0 ? loss_sum / pair_count : 0.0);
  }

  EmbeddingTable table;
  table.dimension = dim;
  for (int i = 0; i < v; ++i) table.vectors.emplace(vocab[i].token, input.col(i));
  return table;
}

EmbeddingTable load_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embedding file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty embedding file");

  EmbeddingTable table;
  long vocab_size = 0;
  {
    std::istringstream header(line);
    if (!(header >> vocab_size >> table.dimension) || vocab_size < 0 || table.dimension < 1)
      throw std::runtime_error(path + ":1: malformed header");
  }
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string token;
    if (!(row >> token)) throw std::runtime_error(path + ":" + std::to_string(line_no) + ": missing token");
    Eigen::VectorXd vec(table.dimension);
    for (int d = 0; d < table.dimension; ++d) {
      if (!(row >> vec[d]))
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected " +
                                 std::to_string(table.dimension) + " values");
    }
    double extra;
    if (row >> extra)
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": too many values");
    if (!table.vectors.emplace(token, std::move(vec)).second)
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": duplicate token " + token);
  }
  if (static_cast<long>(table.vectors.size()) != vocab_size)
    throw std::runtime_error(path + ": header declares " + std::to_string(vocab_size) + " tokens, found " +
                             std::to_string(table.vectors.size()));
  return table;
}

void save_embeddings(const EmbeddingTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write embedding file: " + path);
  out.precision(17);
  out << table.vectors.size() << ' ' << table.dimension << '\n';
  for (const auto& [token, vec] : table.vectors) {
    out << token;
    for (int d = 0; d < table.dimension; ++d) out << ' ' << vec[d];
    out << '\n';
  }
}

Eigen::MatrixXd build_decoder(const EmbeddingTable& table, const FeatureSpace& space) {
  Eigen::MatrixXd decoder(space.num_pivots, table.dimension);
  std::vector<std::string> missing;
  for (int k = 0; k < space.num_pivots; ++k) {
    std::string lookup = space.pivot_key(k);
    if (auto sp = lookup.find(' '); sp != std::string::npos) lookup[sp] = '-';  // fused bigram token
    auto it = table.vectors.find(lookup);
    if (it == table.vectors.end()) {
      missing.push_back(lookup);
      continue;
    }
    decoder.row(k) = it->second.transpose();
  }
  if (!missing.empty()) {
    std::string msg = "build_decoder: pivots missing from embedding table:";
    for (const auto& m : missing) msg += " " + m;
    throw std::invalid_argument(msg);
  }
  return decoder;
}

}  // namespace pivotrepr
