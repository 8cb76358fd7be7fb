#pragma once

// Finite fields F_{p^k} in Zech-logarithm form and the rationals via GMP.

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace modgon {

/// F_q with q = p^k <= 2^22. Nonzero elements are stored as discrete logs
/// to a fixed primitive element a; zero is the sentinel q-1. Multiplication
/// adds logs, addition goes through the Zech table log(1 + a^n).
class GaloisField {
 public:
  using Elem = std::uint32_t;

  GaloisField(std::uint32_t p, std::uint32_t k);

  std::uint32_t characteristic() const { return p_; }
  std::uint32_t degree() const { return k_; }
  std::uint32_t order() const { return q_; }

  Elem zero() const { return m_; }
  Elem one() const { return 0; }
  bool is_zero(Elem a) const { return a == m_; }

  Elem mul(Elem a, Elem b) const {
    if (a == m_ || b == m_) return m_;
    std::uint32_t s = a + b;
    return s >= m_ ? s - m_ : s;
  }
  Elem add(Elem a, Elem b) const {
    if (a == m_) return b;
    if (b == m_) return a;
    std::uint32_t d = b >= a ? b - a : b + m_ - a;
    Elem z = zech_[d];
    if (z == m_) return m_;
    std::uint32_t s = a + z;
    return s >= m_ ? s - m_ : s;
  }
  Elem neg(Elem a) const {
    if (a == m_) return m_;
    std::uint32_t s = a + half_;
    return s >= m_ ? s - m_ : s;
  }
  Elem sub(Elem a, Elem b) const { return add(a, neg(b)); }
  Elem inv(Elem a) const { return a == 0 ? 0 : m_ - a; }
  Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }
  Elem pow(Elem a, std::uint64_t e) const;
  Elem from_int(std::int64_t n) const;
  // Raise to the p^j-th power.
  Elem frobenius(Elem a, std::uint32_t j = 1) const;

  /// Coefficients of the element as a polynomial in a, low degree first.
  std::vector<std::uint32_t> coefficients(Elem a) const;
  Elem from_coefficients(const std::vector<std::uint32_t>& c) const;
  /// Defining polynomial of a, low degree first, monic.
  const std::vector<std::uint32_t>& modulus() const { return modulus_; }

  /// "F_3" or "F_9=F_3[a]/(a^2+2a+2)".
  std::string name() const;
  /// "0", "1", "a^5"; prime fields print residues.
  std::string format(Elem a) const;

 private:
  std::uint32_t p_, k_, q_, m_, half_;
  std::vector<std::uint32_t> modulus_;
  std::vector<Elem> zech_;
  std::vector<std::uint32_t> exp_;   // log -> packed coefficients
  std::vector<Elem> log_;            // packed coefficients -> log
};

/// Shared, lazily built field for (p, k).
std::shared_ptr<const GaloisField> galois_field(std::uint32_t p, std::uint32_t k);

/// Log multiplier t with (a_small)^n -> (a_big)^(n t) a field embedding of
/// F_{p^e} into F_{p^L}; requires e | L.
std::uint32_t embedding_multiplier(const GaloisField& small, const GaloisField& big);

inline GaloisField::Elem embed(const GaloisField& small, const GaloisField& big,
                               std::uint32_t multiplier, GaloisField::Elem a) {
  if (small.is_zero(a)) return big.zero();
  return static_cast<GaloisField::Elem>(static_cast<std::uint64_t>(a) * multiplier %
                                        (big.order() - 1));
}

/// Field of rational numbers with the same interface as GaloisField.
class RationalField {
 public:
  using Elem = mpq_class;

  Elem zero() const { return 0; }
  Elem one() const { return 1; }
  bool is_zero(const Elem& a) const { return sgn(a) == 0; }
  Elem add(const Elem& a, const Elem& b) const { return a + b; }
  Elem sub(const Elem& a, const Elem& b) const { return a - b; }
  Elem mul(const Elem& a, const Elem& b) const { return a * b; }
  Elem neg(const Elem& a) const { return -a; }
  Elem inv(const Elem& a) const { return 1 / a; }
  Elem div(const Elem& a, const Elem& b) const { return a / b; }
  Elem from_int(std::int64_t n) const { return Elem(static_cast<long>(n)); }
  std::string name() const { return "Q"; }
  std::string format(const Elem& a) const { return a.get_str(); }
};

}  // namespace modgon
