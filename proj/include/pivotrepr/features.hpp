#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "pivotrepr/common.hpp"
#include "pivotrepr/corpus.hpp"

namespace pivotrepr {

// A feature key is the display form of an n-gram: "w" or "w1 w2".
struct DomainCounts {
  long source = 0;
  long target = 0;
};

using CountTable = std::map<std::string, DomainCounts>;

// Retained vocabulary with its pivot / non-pivot partition. Features are laid
// out pivots first (descending MI), then non-pivots in lexicographic order, so
// the pivot axis and non-pivot axis are contiguous slices of the full axis.
struct FeatureSpace {
  std::vector<std::string> feature_keys;  // full-axis index -> key
  std::unordered_map<std::string, int> index_of;
  int num_pivots = 0;
  std::vector<double> pivot_mi;  // parallel to pivots, descending
  CountTable counts;             // retained features only

  int dimension() const { return static_cast<int>(feature_keys.size()); }
  int num_nonpivots() const { return dimension() - num_pivots; }
  const std::string& pivot_key(int pivot_pos) const { return feature_keys[pivot_pos]; }
};

struct VectorizedDoc {
  SparseBinaryVector x_p;     // over the pivot axis
  SparseBinaryVector x_np;    // over the non-pivot axis
  SparseBinaryVector x_full;  // over the full retained axis
};

// Occurrence-weighted n-gram counts per domain over unlabeled data.
CountTable count_features(const Corpus& source_unlabeled, const Corpus& target_unlabeled);

// Empirical MI(F;Y) in bits between two binary sequences, 0*log0 = 0.
double mutual_information(const std::vector<int>& feature_presence, const std::vector<int>& labels);

// MI of a 2x2 joint table given as counts.
double mutual_information_from_table(long n11, long n10, long n01, long n00);

// Pivots: frequent in both domains, top-`num_pivots` by MI with the labels on
// labeled_train (ties: higher total count, then lexicographic key).
// Non-pivots: frequent in at least one domain, minus the pivots.
FeatureSpace select_pivots(const CountTable& counts, const std::vector<Document>& labeled_train,
                           int num_pivots, long pivot_min_count = 10, long nonpivot_min_count = 10);

VectorizedDoc vectorize(const Document& document, const FeatureSpace& space);

std::string feature_space_to_json(const FeatureSpace& space);
FeatureSpace feature_space_from_json(const std::string& json_text);

}  // namespace pivotrepr
