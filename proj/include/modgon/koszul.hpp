#pragma once

// beta_{2,2} of the canonical ring: homology of
//   L^3 V (x) R_1 -> L^2 V (x) R_2 -> V (x) R_3
// with R = S / I for S the polynomial ring on V and I generated by the model's
// quadrics.

#include <cstddef>
#include <cstdint>
#include <string>

#include "modgon/model.hpp"

namespace modgon {

struct GradedPieces {
  int genus = 0;
  std::string field;
  std::size_t dim_i2 = 0, dim_i3 = 0;
  std::size_t dim_r1 = 0, dim_r2 = 0, dim_r3 = 0;
};

struct KoszulResult {
  std::string field;
  GradedPieces pieces;
  std::size_t dim_source = 0, dim_middle = 0, dim_target = 0;
  std::size_t rank_d1 = 0, rank_d2 = 0;
  std::size_t beta22 = 0;
  bool composes_to_zero = false;  // d2 o d1 = 0, checked on every basis vector
};

/// Limit on the number of entries of the Koszul matrices.
inline constexpr std::size_t kKoszulMaxEntries = 60'000'000;

/// Over F_{p^k} for a good prime p. Throws InputError if g < 5 or the graded
/// dimensions differ from 3(g-1), 5(g-1); BadPrimeError for a bad prime.
GradedPieces graded_pieces(const QuadricModel& m, std::uint32_t p, std::uint32_t k = 1);
KoszulResult betti_22(const QuadricModel& m, std::uint32_t p, std::uint32_t k = 1);

/// The same computation in exact rational arithmetic.
GradedPieces graded_pieces_rational(const QuadricModel& m);
KoszulResult betti_22_rational(const QuadricModel& m);

}  // namespace modgon
