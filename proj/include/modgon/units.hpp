#pragma once

// Arithmetic in (Z/NZ)^x and the lattice of subgroups containing -1.

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace modgon {

std::int64_t gcd(std::int64_t a, std::int64_t b);
std::int64_t euler_phi(std::int64_t n);
std::int64_t pow_mod(std::int64_t base, std::int64_t exp, std::int64_t mod);
std::vector<std::int64_t> prime_divisors(std::int64_t n);
bool is_prime(std::int64_t n);

struct CyclicFactor {
  int order = 1;
  int generator = 1;
};

/// The unit group (Z/NZ)^x with an invariant-factor decomposition.
///
/// Factors are chosen greedily: each generator has maximal order in the
/// quotient by the previously chosen ones and meets their span trivially.
/// Among candidates of equal order, -1 is preferred, then the smallest
/// residue. Factors are stored in ascending order (C2 x C2 x C4).
class UnitGroup {
 public:
  explicit UnitGroup(int level);

  int level() const { return level_; }
  const std::vector<int>& elements() const { return elements_; }
  const std::vector<CyclicFactor>& factors() const { return factors_; }
  std::vector<int> generators() const;
  std::string structure_string() const;
  std::string generators_string() const;
  int order_of(int x) const;

 private:
  int level_;
  std::vector<int> elements_;
  std::vector<CyclicFactor> factors_;
};

/// A subgroup {+-1} <= Delta <= (Z/NZ)^x, identified by its sorted
/// residue list. Generators are kept for display only.
class DirichletSubgroup {
 public:
  DirichletSubgroup(int level, std::vector<int> sorted_elements);

  int level() const { return level_; }
  const std::vector<int>& elements() const { return elements_; }
  std::size_t order() const { return elements_.size(); }
  bool contains(int x) const;
  bool is_subgroup_of(const DirichletSubgroup& other) const;
  bool is_full() const;
  bool is_trivial() const { return elements_.size() <= 2; }

  // Greedy minimal generating list, starting from -1.
  std::vector<int> display_generators() const;
  // "{±1,±11}" for groups with at most 10 elements, "<-1,4>" above.
  std::string display() const;
  // Plain-ASCII key "N:1,11,19,29" used in file formats and maps.
  std::string key() const;

  friend bool operator==(const DirichletSubgroup&, const DirichletSubgroup&) = default;
  friend std::strong_ordering operator<=>(const DirichletSubgroup& a, const DirichletSubgroup& b);

 private:
  int level_;
  std::vector<int> elements_;
};

/// Closure of gens and -1 under multiplication mod N. Throws InputError when
/// a generator is not coprime to N.
DirichletSubgroup subgroup_from_generators(int level, std::span<const std::int64_t> gens);

/// Parse a subgroup description at the given level. Accepted forms:
///   {±1,±11}  {+-1,+-11}  <-1,2^13>  -1,4,6  full  trivial
/// Brace form must list a set that is already closed; angle and bare forms
/// are generator lists whose tokens may be written base^exponent.
/// Malformed tokens such as "^-1" or "-1.4" are rejected, not repaired.
DirichletSubgroup parse_delta(int level, std::string_view text);

/// All Delta with {+-1} <= Delta <= (Z/NZ)^x, sorted by (order, elements).
/// With proper_only both extremes are dropped.
std::vector<DirichletSubgroup> enumerate_deltas(int level, bool proper_only);

/// Hasse-diagram edges (index of smaller, index of larger) of the
/// containment order. Throws InputError on mixed levels.
std::vector<std::pair<std::size_t, std::size_t>> lattice_edges(
    std::span<const DirichletSubgroup> deltas);

/// Parse "1-16,18,20" style level lists.
std::vector<int> parse_level_list(std::string_view text);

}  // namespace modgon
