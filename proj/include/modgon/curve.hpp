#pragma once

// A canonical model reduced modulo a good prime: points over F_{p^k}, closed
// points, local expansions and Riemann-Roch dimensions from span ranks.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "modgon/field.hpp"
#include "modgon/model.hpp"

namespace modgon {

struct ReducedTerm {
  int i = 0;
  int j = 0;
  std::uint32_t coeff = 0;  // residue mod p, nonzero
};

using Coords = std::vector<GaloisField::Elem>;

/// Limits on enumeration work, counted in coordinate prefixes visited
/// over F_q.
struct EnumerationLimits {
  std::uint64_t max_prefixes = 2'000'000'000ULL;
};

class ReducedModel {
 public:
  /// Reduces mod p. Throws BadPrimeError if p is not a good prime of the
  /// model, SingularError if some F_p-point is singular, and InputError if
  /// the quadrics become dependent mod p.
  ReducedModel(const QuadricModel& model, std::uint32_t p);

  const QuadricModel& source() const { return *source_; }
  std::uint32_t prime() const { return p_; }
  int genus() const { return genus_; }
  const std::vector<std::vector<ReducedTerm>>& quadrics() const { return quads_; }

  /// Value of quadric k at x over field f.
  GaloisField::Elem evaluate(const GaloisField& f, std::size_t k, const Coords& x) const;
  bool on_curve(const GaloisField& f, const Coords& x) const;
  /// Jacobian rows dQ_k/dx_i at x.
  std::vector<Coords> jacobian(const GaloisField& f, const Coords& x) const;
  bool is_smooth_at(const GaloisField& f, const Coords& x) const;

  /// Per leading coordinate L: combinations of the quadrics (restricted to
  /// x_i = 0 for i < L) with no quadratic term in the last `solved`
  /// coordinates, which then solve linearly. solved = 0 means no plan.
  struct LeadPlan {
    int solved = 0;
    std::vector<std::vector<ReducedTerm>> combos;
  };
  const std::vector<LeadPlan>& lead_plans() const { return plans_; }

 private:
  std::shared_ptr<const QuadricModel> source_;
  std::uint32_t p_;
  int genus_;
  std::vector<std::vector<ReducedTerm>> quads_;
  std::vector<LeadPlan> plans_;
};

/// All points of the curve over F_{p^k}, normalised so that the first
/// nonzero coordinate is one, in increasing order of coordinate logs.
std::vector<Coords> enumerate_points(const ReducedModel& c, std::uint32_t k,
                                     const EnumerationLimits& lim = {});
std::uint64_t count_points(const ReducedModel& c, std::uint32_t k,
                           const EnumerationLimits& lim = {});

/// A Frobenius orbit of geometric points, stored as its smallest member
/// (lexicographic on coordinate logs) over F_{p^degree}.
struct ClosedPoint {
  std::uint32_t degree = 1;
  Coords coords;

  friend bool operator==(const ClosedPoint&, const ClosedPoint&) = default;
  friend auto operator<=>(const ClosedPoint&, const ClosedPoint&) = default;
};

/// The e conjugates of a closed point, each over F_{p^e}.
std::vector<Coords> conjugates(const ReducedModel& c, const ClosedPoint& pt);

/// Closed points of degree exactly e for e = 1..max_degree, sorted by
/// (degree, coords).
std::vector<ClosedPoint> closed_points(const ReducedModel& c, std::uint32_t max_degree,
                                       const EnumerationLimits& lim = {});

/// Power-series coordinates x(t) = v_0 + v_1 t + ... + v_{m-1} t^{m-1} of the
/// curve near a smooth point, with x_chart = 1 and x_param = P_param + t.
struct LocalExpansion {
  int chart = 0;
  int param = 0;
  std::vector<Coords> coeffs;
};

/// Throws SingularError at a singular point and InputError if the point is
/// not on the curve.
LocalExpansion local_expansion(const ReducedModel& c, const GaloisField& f, const Coords& point,
                               int order);

struct EffectiveDivisor {
  std::vector<std::pair<ClosedPoint, int>> parts;  // (point, multiplicity >= 1)

  int degree() const;
  std::string to_string(const ReducedModel& c) const;
};

struct RRResult {
  int degree = 0;
  int ell = 0;        // dim L(D)
  int span_dim = -1;  // projective dimension of the span of D
  int rank() const { return ell - 1; }
};

/// Geometric Riemann-Roch on a canonical curve: ell(D) = deg D - span_dim.
/// The span is computed over F_{p^(L*extra)} with L the lcm of the point
/// degrees; extra > 1 recomputes the same rank over a larger field.
RRResult riemann_roch(const ReducedModel& c, const EffectiveDivisor& d, std::uint32_t extra = 1);

/// The span rows of a divisor over a given field containing all its points.
std::vector<Coords> divisor_rows(const ReducedModel& c, const EffectiveDivisor& d,
                                 const GaloisField& target);

std::uint32_t lcm_u32(std::uint32_t a, std::uint32_t b);

}  // namespace modgon
