#include <doctest.h>

#include <numeric>

#include "modgon/congruence.hpp"
#include "modgon/errors.hpp"

using namespace modgon;

TEST_CASE("coset action basics") {
  auto one = coset_action(parse_delta(1, "trivial"));
  CHECK(one.size() == 1);
  CHECK(coset_action(parse_delta(53, "<-1,2^13>")).size() == 702);
  CHECK(coset_action(parse_delta(101, "<-1,2^5>")).size() == 510);
}

TEST_CASE("genus examples") {
  CHECK(invariants(parse_delta(30, "{±1,±11}")).genus == 5);
  CHECK(invariants(parse_delta(29, "{±1,±12}")).genus == 8);
  CHECK(invariants(parse_delta(25, "{±1,±7}")).genus == 4);
  CHECK(invariants(parse_delta(35, "{±1,±6}")).genus == 13);
}

TEST_CASE("projection degree and Kim-Sarnak threshold") {
  CHECK(projection_degree(parse_delta(35, "{±1,±6}"), parse_delta(35, "{±1,±6,±8,±13}")) == 2);
  auto d = parse_delta(37, "{±1,±6}");
  CHECK(projection_degree(d, d) == 1);
  auto big = parse_delta(37, "<-1,6,8,10,11,14>");
  CHECK(big.order() == 12);
  CHECK(projection_degree(d, big) == 3);
  CHECK_THROWS_AS(projection_degree(big, d), InputError);
  CHECK(kim_sarnak_floor(5) == 504);
  CHECK(kim_sarnak_floor(1) == 100);
  CHECK(kim_sarnak_floor(0) == 0);
}

TEST_CASE("classical X0(N) genera") {
  // Genus of X0(N) via the textbook formula with Legendre-symbol counts.
  auto legendre_count = [](int n, int disc_root) {
    // number of x mod n with x^2 + x + 1 = 0 (disc_root 3) or x^2 + 1 = 0 (disc_root 4)
    int c = 0;
    for (int x = 0; x < n; ++x) {
      int v = disc_root == 4 ? (x * x + 1) % n : (x * x + x + 1) % n;
      if (v == 0) ++c;
    }
    return c;
  };
  for (int n = 1; n <= 120; ++n) {
    auto full = parse_delta(n, "full");
    auto inv = invariants(full);
    std::int64_t mu = gamma0_index(n);
    int nu2 = legendre_count(n, 4);
    int nu3 = legendre_count(n, 3);
    int cusps = 0;
    for (int d = 1; d <= n; ++d)
      if (n % d == 0) cusps += static_cast<int>(n == 1 ? 1 : euler_phi(std::gcd(d, n / d)));
    if (n == 1) { nu2 = 1; nu3 = 1; cusps = 1; }
    CHECK_MESSAGE(inv.mu == mu, "N=" << n);
    CHECK_MESSAGE(inv.nu2 == nu2, "N=" << n);
    CHECK_MESSAGE(inv.nu3 == nu3, "N=" << n);
    CHECK_MESSAGE(inv.cusps == cusps, "N=" << n);
    if (n <= 10) CHECK(inv.genus == 0);
  }
  CHECK(invariants(parse_delta(11, "full")).genus == 1);
  CHECK(invariants(parse_delta(37, "full")).genus == 2);
}

TEST_CASE("index formula, genus relation and monotonicity over the lattice") {
  for (int n = 2; n <= 60; ++n) {
    auto ds = enumerate_deltas(n, false);
    std::vector<CongruenceInvariants> inv;
    for (const auto& d : ds) {
      inv.push_back(invariants(d));
      CHECK(inv.back().mu == index_closed_form(d));
      CHECK(12 * (inv.back().genus - 1) + 3 * inv.back().nu2 + 4 * inv.back().nu3 +
                6 * inv.back().cusps ==
            inv.back().mu);
    }
    for (auto [a, b] : lattice_edges(ds)) {
      CHECK(inv[a].genus >= inv[b].genus);
      CHECK(inv[a].mu == inv[b].mu * projection_degree(ds[a], ds[b]));
    }
  }
}
