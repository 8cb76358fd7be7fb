#include <doctest.h>

#include <random>

#include "modgon/field.hpp"
#include "modgon/linalg.hpp"

using namespace modgon;

TEST_CASE("prime fields agree with residue arithmetic") {
  for (std::uint32_t p : {2u, 3u, 5u, 7u, 13u}) {
    const auto& f = *galois_field(p, 1);
    for (std::uint32_t a = 0; a < p; ++a) {
      for (std::uint32_t b = 0; b < p; ++b) {
        auto ea = f.from_int(a), eb = f.from_int(b);
        CHECK(f.add(ea, eb) == f.from_int((a + b) % p));
        CHECK(f.mul(ea, eb) == f.from_int(a * b % p));
        CHECK(f.sub(ea, eb) == f.from_int((a + p - b) % p));
      }
      if (a) CHECK(f.mul(f.from_int(a), f.inv(f.from_int(a))) == f.one());
      CHECK(f.format(f.from_int(a)) == std::to_string(a));
    }
  }
}

TEST_CASE("extension fields satisfy the field axioms") {
  std::mt19937 rng(7);
  for (auto [p, k] : {std::pair{2u, 3u}, {2u, 4u}, {3u, 2u}, {3u, 4u}, {5u, 2u}, {7u, 3u}}) {
    const auto& f = *galois_field(p, k);
    const std::uint32_t q = f.order();
    std::uniform_int_distribution<std::uint32_t> pick(0, q - 1);
    for (int t = 0; t < 2000; ++t) {
      auto a = pick(rng), b = pick(rng), c = pick(rng);
      CHECK(f.add(a, b) == f.add(b, a));
      CHECK(f.add(f.add(a, b), c) == f.add(a, f.add(b, c)));
      CHECK(f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c)));
      CHECK(f.add(a, f.neg(a)) == f.zero());
      CHECK(f.frobenius(f.add(a, b)) == f.add(f.frobenius(a), f.frobenius(b)));
      CHECK(f.frobenius(a, k) == a);
      // Coefficient round trip.
      CHECK(f.from_coefficients(f.coefficients(a)) == a);
    }
    // p copies of one sum to zero.
    auto s = f.zero();
    for (std::uint32_t i = 0; i < p; ++i) s = f.add(s, f.one());
    CHECK(s == f.zero());
  }
}

TEST_CASE("subfield embeddings are ring homomorphisms") {
  for (auto [p, e, L] : {std::tuple{3u, 1u, 2u}, {3u, 2u, 4u}, {2u, 2u, 6u}, {2u, 3u, 6u}, {5u, 1u, 3u}}) {
    const auto& s = *galois_field(p, e);
    const auto& b = *galois_field(p, L);
    auto t = embedding_multiplier(s, b);
    for (std::uint32_t x = 0; x < s.order(); ++x) {
      for (std::uint32_t y = 0; y < s.order(); ++y) {
        CHECK(embed(s, b, t, s.add(x, y)) == b.add(embed(s, b, t, x), embed(s, b, t, y)));
        CHECK(embed(s, b, t, s.mul(x, y)) == b.mul(embed(s, b, t, x), embed(s, b, t, y)));
      }
    }
  }
  CHECK(galois_field(3, 2)->name() == "F_9=F_3[a]/(a^2+a+2)");
}

TEST_CASE("linear algebra over F_p and Q") {
  const auto& f = *galois_field(5, 1);
  Matrix<GaloisField> m = {{f.from_int(1), f.from_int(2), f.from_int(3)},
                           {f.from_int(2), f.from_int(1), f.from_int(4)},
                           {f.from_int(3), f.from_int(3), f.from_int(2)}};
  // Third row = first + second mod 5.
  CHECK(rank(f, m) == 2);
  auto ker = kernel(f, m, 3);
  REQUIRE(ker.size() == 1);
  for (const auto& row : m) {
    auto acc = f.zero();
    for (int j = 0; j < 3; ++j) acc = f.add(acc, f.mul(row[j], ker[0][j]));
    CHECK(f.is_zero(acc));
  }
  Echelon<GaloisField> e(f, 3);
  CHECK(e.push(m[0]));
  CHECK(e.push(m[1]));
  CHECK_FALSE(e.push(m[2]));
  e.truncate(1);
  CHECK(e.push(m[2]));

  RationalField q;
  Matrix<RationalField> mq = {{1, 2, 3}, {2, 4, 1}, {3, 6, 4}};
  CHECK(rank(q, mq) == 2);
  auto sol = solve(q, Matrix<RationalField>{{1, 1}, {1, -1}}, Row<RationalField>{3, 1});
  REQUIRE(sol);
  CHECK((*sol)[0] == 2);
  CHECK((*sol)[1] == 1);
  CHECK_FALSE(solve(q, Matrix<RationalField>{{1, 1}, {2, 2}}, Row<RationalField>{1, 3}));
}
