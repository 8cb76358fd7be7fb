#pragma once

// Gonality certificates on canonical models: exhaustive lower-bound searches
// over F_p with shape pruning, pool searches for upper witnesses over F_p
// and Q, and a slow unpruned oracle for cross-checking.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "modgon/curve.hpp"
#include "modgon/model.hpp"

namespace modgon {

/// Closed-point degrees of a divisor, ascending, e.g. {1, 1, 3}.
using Shape = std::vector<int>;

std::string shape_string(const Shape& s);  // "1+1+3"
Shape parse_shape(const std::string& s);

/// Partitions of d with parts <= max_part and at least min_ones parts equal
/// to 1. Ordered by number of parts descending, then lexicographically.
std::vector<Shape> shapes(int d, int min_ones, int max_part);

/// Largest k >= 0 with n > k(q+1); -1 when n = 0.
int pigeonhole_k(std::uint64_t n, std::uint32_t q);

/// Shapes a polar divisor of a degree <= d function can be assumed to have.
/// With n rational points: degree exactly d, at least k+1 rational parts
/// (k from pigeonhole_k, or k = 0 when pigeonhole is off). With n = 0
/// nothing can be assumed and every shape of degree 1..d is returned.
std::vector<Shape> admissible_shapes(int d, std::uint64_t n, std::uint32_t p, bool pigeonhole = true);

struct SearchConfig {
  std::uint64_t budget = 100'000'000;  // estimated field operations
  unsigned workers = 1;
  bool pigeonhole = true;
  std::filesystem::path checkpoint;  // empty: no checkpointing
  EnumerationLimits limits;
};

struct SearchResult {
  int degree = 0;
  std::vector<Shape> searched;
  std::vector<Shape> skipped;  // over budget, not searched
  std::optional<EffectiveDivisor> witness;
  int witness_ell = 0;
  std::uint64_t divisors = 0;  // divisors verified to have ell = 1
  std::uint64_t estimate = 0;  // estimated cost of the searched shapes
  std::vector<std::uint64_t> pool;  // closed points per degree 1, 2, ...

  bool complete() const { return skipped.empty(); }
  /// No divisor of an admissible shape moves: gon over F_p exceeds degree.
  bool certified() const { return complete() && !witness; }
};

/// Searches every divisor of an admissible shape; any divisor with ell >= 2
/// is a witness and ends the search. Deterministic for any worker count.
SearchResult gonality_lower_bound(const ReducedModel& c, int d, const SearchConfig& cfg = {});

/// Searches divisors of degree exactly d made of closed points of degree
/// <= pool_degree, for one with ell >= 2.
SearchResult gonality_upper_search(const ReducedModel& c, int d, int pool_degree,
                                   const SearchConfig& cfg = {});

/// Oracle: every effective divisor of degree 1..d, each evaluated from
/// scratch with riemann_roch. Returns the first divisor with ell >= 2.
SearchResult unpruned_search(const ReducedModel& c, int d, const EnumerationLimits& lim = {});

/// Primitive integer points of max-norm <= height on the model, first
/// nonzero coordinate positive, sorted by (max-norm, coordinates).
using IntPoint = std::vector<std::int64_t>;
std::vector<IntPoint> rational_points(const QuadricModel& m, int height);

struct RationalSearchResult {
  int degree = 0;
  std::size_t pool = 0;
  bool complete = true;
  std::optional<std::vector<IntPoint>> witness;
  int witness_ell = 0;
  std::uint64_t divisors = 0;
};

/// Sums of d pool points with ell >= 2 (exact rank over Q). Points are
/// distinct unless `multiplicities`, in which case a repeated point uses its
/// rational local expansion.
RationalSearchResult rational_upper_search(const QuadricModel& m, int d, const std::vector<IntPoint>& pool,
                                           std::uint64_t budget = 100'000'000, bool multiplicities = false);

/// ell of a sum of distinct rational points, from the exact rank over Q.
int rational_ell(const std::vector<IntPoint>& points);
/// Repeated points count with multiplicity.
int rational_ell(const QuadricModel& m, std::vector<IntPoint> points);

}  // namespace modgon
