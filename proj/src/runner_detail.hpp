#pragma once

// Pieces of the runner that need exact arithmetic.  Kept in their own
// translation unit, away from Eigen expressions.

#include <string>
#include <vector>

#include "curvlab/runner.hpp"

namespace curvlab::detail {

struct GammaValue {
  double g1 = 0, g2 = 0, g3 = 0;
  std::string label;  // name or "g1:g2:g3"
};

/// Throws UsageError on malformed input.
double parse_real(const std::string& text);
GammaValue parse_gamma(const std::string& text);

/// Combination coefficients for n in 3..10 with `per_n` random rational a,
/// the C(n,a) polynomial identity, and interval algebra for n in 3..12.
std::vector<Record> exact_algebra_records(std::uint64_t seed, int per_n);

/// Exact endpoints, restricted sets and C values for each n, and the gamma
/// map for each triple.
std::vector<Record> interval_records(const std::vector<int>& ns, const std::vector<std::string>& gammas);

}  // namespace curvlab::detail
