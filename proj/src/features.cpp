#include "pivotrepr/features.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

namespace pivotrepr {

CountTable count_features(const Corpus& source_unlabeled, const Corpus& target_unlabeled) {
  if (source_unlabeled.kind != CorpusKind::Unlabeled || target_unlabeled.kind != CorpusKind::Unlabeled)
    throw std::invalid_argument("count_features: corpora must be unlabeled");
  if (source_unlabeled.documents.empty() || target_unlabeled.documents.empty())
    throw std::invalid_argument("count_features: empty corpus");

  CountTable counts;
  for (const auto& doc : source_unlabeled.documents)
    for (const auto& key : extract_ngrams(doc.tokens)) counts[key].source++;
  for (const auto& doc : target_unlabeled.documents)
    for (const auto& key : extract_ngrams(doc.tokens)) counts[key].target++;
  return counts;
}

double mutual_information_from_table(long n11, long n10, long n01, long n00) {
  const double n = static_cast<double>(n11 + n10 + n01 + n00);
  if (n <= 0.0) throw std::invalid_argument("mutual_information: empty table");
  const long cell[2][2] = {{n00, n01}, {n10, n11}};
  const long row[2] = {n00 + n01, n10 + n11};   // feature marginals
  const long col[2] = {n00 + n10, n01 + n11};   // label marginals

  double mi = 0.0;
  for (int a = 0; a < 2; ++a) {
    for (int y = 0; y < 2; ++y) {
      if (cell[a][y] == 0) continue;  // 0*log0 = 0
      const double p_joint = cell[a][y] / n;
      const double p_a = row[a] / n;
      const double p_y = col[y] / n;
      mi += p_joint * std::log2(p_joint / (p_a * p_y));
    }
  }
  return mi < 0.0 ? 0.0 : mi;  // clamp -0.0 and rounding dust
}

double mutual_information(const std::vector<int>& feature_presence, const std::vector<int>& labels) {
  if (feature_presence.size() != labels.size())
    throw std::invalid_argument("mutual_information: length mismatch");
  if (feature_presence.empty()) throw std::invalid_argument("mutual_information: empty input");
  long n[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t i = 0; i < labels.size(); ++i) n[feature_presence[i] ? 1 : 0][labels[i] ? 1 : 0]++;
  return mutual_information_from_table(n[1][1], n[1][0], n[0][1], n[0][0]);
}

FeatureSpace select_pivots(const CountTable& counts, const std::vector<Document>& labeled_train,
                           int num_pivots, long pivot_min_count, long nonpivot_min_count) {
  if (num_pivots < 1) throw std::invalid_argument("select_pivots: num_pivots must be >= 1");
  if (labeled_train.empty()) throw std::invalid_argument("select_pivots: empty labeled training set");

  // Per-document presence tallies for MI, split by label.
  long total_pos = 0, total_neg = 0;
  std::unordered_map<std::string, std::pair<long, long>> present;  // key -> (in pos docs, in neg docs)
  for (const auto& doc : labeled_train) {
    if (!doc.label) throw std::invalid_argument("select_pivots: unlabeled document in labeled_train");
    (*doc.label == 1 ? total_pos : total_neg)++;
    std::set<std::string> keys;
    for (const auto& k : extract_ngrams(doc.tokens)) keys.insert(k);
    for (const auto& k : keys) {
      auto& p = present[k];
      (*doc.label == 1 ? p.first : p.second)++;
    }
  }

  struct Candidate {
    const std::string* key;
    double mi;
    long total;
  };
  std::vector<Candidate> candidates;
  for (const auto& [key, c] : counts) {
    if (c.source < pivot_min_count || c.target < pivot_min_count) continue;
    long in_pos = 0, in_neg = 0;
    if (auto it = present.find(key); it != present.end()) {
      in_pos = it->second.first;
      in_neg = it->second.second;
    }
    const double mi = mutual_information_from_table(in_pos, in_neg, total_pos - in_pos, total_neg - in_neg);
    candidates.push_back({&key, mi, c.source + c.target});
  }
  if (static_cast<int>(candidates.size()) < num_pivots) {
    std::ostringstream msg;
    msg << "select_pivots: requested " << num_pivots << " pivots but only " << candidates.size()
        << " candidates pass the frequency threshold";
    throw std::invalid_argument(msg.str());
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.mi != b.mi) return a.mi > b.mi;
    if (a.total != b.total) return a.total > b.total;
    return *a.key < *b.key;
  });
  candidates.resize(num_pivots);

  FeatureSpace space;
  space.num_pivots = num_pivots;
  std::set<std::string> pivot_set;
  for (const auto& c : candidates) {
    space.feature_keys.push_back(*c.key);
    space.pivot_mi.push_back(c.mi);
    pivot_set.insert(*c.key);
  }
  // CountTable is ordered, so non-pivots come out lexicographically.
  for (const auto& [key, c] : counts) {
    if (pivot_set.count(key)) continue;
    if (c.source >= nonpivot_min_count || c.target >= nonpivot_min_count)
      space.feature_keys.push_back(key);
  }
  for (int i = 0; i < static_cast<int>(space.feature_keys.size()); ++i)
    space.index_of.emplace(space.feature_keys[i], i);
  for (const auto& key : space.feature_keys) space.counts.emplace(key, counts.at(key));
  return space;
}

VectorizedDoc vectorize(const Document& document, const FeatureSpace& space) {
  std::set<int> full;
  for (const auto& key : extract_ngrams(document.tokens)) {
    if (auto it = space.index_of.find(key); it != space.index_of.end()) full.insert(it->second);
  }
  VectorizedDoc v;
  v.x_p.dimension = space.num_pivots;
  v.x_np.dimension = space.num_nonpivots();
  v.x_full.dimension = space.dimension();
  for (int idx : full) {
    v.x_full.active.push_back(idx);
    if (idx < space.num_pivots)
      v.x_p.active.push_back(idx);
    else
      v.x_np.active.push_back(idx - space.num_pivots);
  }
  return v;
}

std::string feature_space_to_json(const FeatureSpace& space) {
  nlohmann::json obj;
  obj["format_version"] = 1;
  obj["num_pivots"] = space.num_pivots;
  obj["features"] = space.feature_keys;
  obj["pivot_mi"] = space.pivot_mi;
  nlohmann::json counts = nlohmann::json::array();
  for (const auto& key : space.feature_keys) {
    const auto& c = space.counts.at(key);
    counts.push_back({c.source, c.target});
  }
  obj["counts"] = counts;
  return obj.dump(2);
}

FeatureSpace feature_space_from_json(const std::string& json_text) {
  const auto obj = nlohmann::json::parse(json_text);
  if (obj.at("format_version").get<int>() != 1)
    throw std::runtime_error("feature_space_from_json: unsupported format_version");
  FeatureSpace space;
  space.num_pivots = obj.at("num_pivots").get<int>();
  space.feature_keys = obj.at("features").get<std::vector<std::string>>();
  space.pivot_mi = obj.at("pivot_mi").get<std::vector<double>>();
  const auto& counts = obj.at("counts");
  if (counts.size() != space.feature_keys.size())
    throw std::runtime_error("feature_space_from_json: counts/features length mismatch");
  for (std::size_t i = 0; i < space.feature_keys.size(); ++i) {
    space.counts.emplace(space.feature_keys[i],
                         DomainCounts{counts[i][0].get<long>(), counts[i][1].get<long>()});
    space.index_of.emplace(space.feature_keys[i], static_cast<int>(i));
  }
  return space;
}

}  // namespace pivotrepr
