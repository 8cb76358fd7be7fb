#include <doctest.h>

#include <algorithm>
#include <bit>
#include <numeric>
#include <cstdint>
#include <set>
#include <vector>

#include "modgon/errors.hpp"
#include "modgon/units.hpp"

using namespace modgon;

namespace {

std::vector<int> unit_list(int n) {
  std::vector<int> u;
  for (int x = 1; x < n; ++x)
    if (std::gcd(x, n) == 1) u.push_back(x);
  return u;
}

// Subgroups as bitmasks over the unit list; closure by repeated squaring of the set.
std::uint64_t close_mask(const std::vector<int>& u, int n, std::uint64_t mask) {
  for (;;) {
    std::uint64_t next = mask;
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (!(mask >> i & 1)) continue;
      for (std::size_t j = 0; j < u.size(); ++j) {
        if (!(mask >> j & 1)) continue;
        int p = u[i] * u[j] % n;
        next |= std::uint64_t{1} << (std::lower_bound(u.begin(), u.end(), p) - u.begin());
      }
    }
    if (next == mask) return mask;
    mask = next;
  }
}

std::set<std::uint64_t> oracle_subgroups(int n) {
  auto u = unit_list(n);
  std::uint64_t minus = std::uint64_t{1} << (u.size() - 1);
  std::uint64_t one = 1;
  std::set<std::uint64_t> out;
  if (u.size() <= 12) {
    // Every subset, kept if closed and containing +-1.
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << u.size()); ++m) {
      if (!(m & one) || !(m & minus)) continue;
      if (close_mask(u, n, m) == m) out.insert(m);
    }
    return out;
  }
  // Otherwise every subgroup is generated by at most r elements, with r the
  // number of square roots of unity expressed as a power of two.
  int roots = 0;
  for (int x : u)
    if (x * x % n == 1) ++roots;
  int r = std::countr_zero(static_cast<unsigned>(roots));
  std::vector<std::uint64_t> layer{close_mask(u, n, one | minus)};
  out.insert(layer.front());
  for (int k = 0; k < r; ++k) {
    std::set<std::uint64_t> next;
    for (auto base : layer)
      for (std::size_t i = 0; i < u.size(); ++i)
        next.insert(close_mask(u, n, base | (std::uint64_t{1} << i)));
    out.insert(next.begin(), next.end());
    layer.assign(next.begin(), next.end());
  }
  return out;
}

}  // namespace

TEST_CASE("unit group structure") {
  UnitGroup g41(41);
  CHECK(g41.elements().size() == 40);
  CHECK(g41.structure_string() == "C40");

  UnitGroup g40(40);
  CHECK(g40.structure_string() == "C2xC2xC4");
  CHECK(g40.generators_string() == "-1,3,11");

  CHECK(UnitGroup(24).structure_string() == "C2xC2xC2");
  CHECK(UnitGroup(1).structure_string() == "C1");
  CHECK(UnitGroup(2).structure_string() == "C1");
  CHECK(UnitGroup(21).generators_string() == "-1,2");
  CHECK(UnitGroup(21).structure_string() == "C2xC6");
}

TEST_CASE("unit group generators regenerate the group") {
  for (int n = 1; n <= 200; ++n) {
    UnitGroup g(n);
    CHECK(static_cast<std::int64_t>(g.elements().size()) == (n == 1 ? 1 : euler_phi(n)));
    std::int64_t prod = 1;
    for (const auto& f : g.factors()) {
      CHECK(g.order_of(f.generator) == f.order);
      prod *= f.order;
    }
    CHECK(prod == static_cast<std::int64_t>(g.elements().size()));
    for (std::size_t i = 1; i < g.factors().size(); ++i)
      CHECK(g.factors()[i].order % g.factors()[i - 1].order == 0);
    if (n > 2) {
      auto gl = g.generators();
      std::vector<std::int64_t> gens(gl.begin(), gl.end());
      CHECK(subgroup_from_generators(n, gens).is_full());
    }
  }
}

TEST_CASE("subgroup closure") {
  std::vector<std::int64_t> g53{-1, pow_mod(2, 13, 53)};
  CHECK(subgroup_from_generators(53, g53).order() == 4);
  CHECK(parse_delta(53, "<-1,2^13>").order() == 4);
  CHECK(parse_delta(35, "<-1,4,6>").order() == 12);
  auto m = parse_delta(17, "-1");
  CHECK(m.elements() == std::vector<int>{1, 16});
  std::vector<std::int64_t> bad{5};
  CHECK_THROWS_AS(subgroup_from_generators(40, bad), InputError);
}

TEST_CASE("subgroup parsing forms and typo tokens") {
  CHECK(parse_delta(30, "{±1,±11}").elements() == std::vector<int>{1, 11, 19, 29});
  CHECK(parse_delta(30, "{+-1,+-11}") == parse_delta(30, "{±1,±11}"));
  CHECK(parse_delta(30, "-1,11") == parse_delta(30, "{±1,±11}"));
  CHECK(parse_delta(30, "full").is_full());
  CHECK(parse_delta(30, "trivial").order() == 2);
  CHECK_THROWS_AS(parse_delta(72, "<^-1,13,25>"), InputError);
  CHECK_THROWS_AS(parse_delta(69, "<-1.4>"), InputError);
  // {±1,±2} mod 31 is not closed: 2*2 = 4 is missing.
  CHECK_THROWS_AS(parse_delta(31, "{±1,±2}"), InputError);
  CHECK(parse_delta(31, "<-1,2>").order() == 10);
  CHECK_THROWS_AS(parse_delta(30, "{±1,±11"), InputError);
  CHECK_THROWS_AS(parse_delta(30, "<-1,x>"), InputError);
}

TEST_CASE("display") {
  CHECK(parse_delta(30, "-1,11").display() == "{±1,±11}");
  CHECK(parse_delta(31, "-1,5").display() == "{±1,±5,±6}");
  CHECK(parse_delta(35, "<-1,4,6>").display() == "<-1,4>");
  auto d = parse_delta(40, "-1,9");
  CHECK(d.key() == "40:1,9,31,39");
}

TEST_CASE("enumerate deltas") {
  CHECK(enumerate_deltas(23, true).empty());
  auto d41 = enumerate_deltas(41, true);
  REQUIRE(d41.size() == 4);
  std::vector<std::size_t> orders;
  for (auto& d : d41) orders.push_back(d.order());
  CHECK(orders == std::vector<std::size_t>{4, 8, 10, 20});
  CHECK(enumerate_deltas(4, true).empty());
  CHECK(enumerate_deltas(4, false).size() == 1);
  for (int n : {22, 46, 47, 59, 83, 94, 107, 167}) CHECK(enumerate_deltas(n, true).empty());
}

TEST_CASE("enumerated subgroups agree with brute force") {
  for (int n = 3; n <= 130; ++n) {
    if (euler_phi(n) > 64) continue;
    auto mine = enumerate_deltas(n, false);
    auto oracle = oracle_subgroups(n);
    CHECK_MESSAGE(mine.size() == oracle.size(), "N=" << n);
    auto u = unit_list(n);
    for (const auto& d : mine) {
      CHECK(euler_phi(n) % static_cast<std::int64_t>(d.order()) == 0);
      std::uint64_t mask = 0;
      for (int x : d.elements())
        mask |= std::uint64_t{1} << (std::lower_bound(u.begin(), u.end(), x) - u.begin());
      CHECK(oracle.count(mask) == 1);
      // Idempotence.
      std::vector<std::int64_t> gens(d.elements().begin(), d.elements().end());
      CHECK(subgroup_from_generators(n, gens) == d);
      auto shown = d.display_generators();
      std::vector<std::int64_t> g2(shown.begin(), shown.end());
      CHECK(subgroup_from_generators(n, g2) == d);
    }
  }
}

TEST_CASE("lattice edges") {
  auto d41 = enumerate_deltas(41, false);
  auto edges = lattice_edges(d41);
  // {±1} lies below everything; the full group is the top.
  for (std::size_t i = 1; i < d41.size(); ++i) CHECK(d41.front().is_subgroup_of(d41[i]));
  for (auto [a, b] : edges) {
    CHECK(d41[a].is_subgroup_of(d41[b]));
    CHECK(d41[b].order() % d41[a].order() == 0);
  }
  auto proper = enumerate_deltas(41, true);
  auto pe = lattice_edges(proper);
  bool top_reached = false;
  for (auto [a, b] : pe)
    if (proper[b].order() == 20) top_reached = true;
  CHECK(top_reached);
  std::vector<DirichletSubgroup> one{d41.front()};
  CHECK(lattice_edges(one).empty());
  std::vector<DirichletSubgroup> mixed{d41.front(), parse_delta(40, "-1")};
  CHECK_THROWS_AS(lattice_edges(mixed), InputError);
}

TEST_CASE("level lists") {
  CHECK(parse_level_list("1-3,18,20") == std::vector<int>{1, 2, 3, 18, 20});
  CHECK_THROWS_AS(parse_level_list("5-3"), InputError);
}
