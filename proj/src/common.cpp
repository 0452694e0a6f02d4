#include "pivotrepr/common.hpp"

#include <cmath>

namespace pivotrepr {

void SparseBinaryVector::validate() const {
  int prev = -1;
  for (int idx : active) {
    if (idx <= prev) throw std::invalid_argument("SparseBinaryVector: indices not strictly increasing");
    if (idx < 0 || idx >= dimension) throw std::invalid_argument("SparseBinaryVector: index out of range");
    prev = idx;
  }
}

bool SparseBinaryVector::contains(int idx) const {
  auto it = std::lower_bound(active.begin(), active.end(), idx);
  return it != active.end() && *it == idx;
}

namespace {

// FNV-1a over the tag, then splitmix64 finalization.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return mix(seed ^ mix(h));
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag, std::uint64_t index) {
  return mix(derive_seed(seed, tag) ^ mix(index + 1));
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1, u2;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace pivotrepr
