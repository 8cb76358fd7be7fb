#include <doctest.h>

#include "fixtures.hpp"
#include "modgon/errors.hpp"
#include "modgon/koszul.hpp"

using namespace modgon;

namespace {

// Shipped models of curves whose beta_{2,2} is listed as zero.
const char* kVanishing[] = {"x29_12", "x34_13", "x35_11_16", "x39_16_17",
                            "x40_19", "x42_5_17", "x44_5_7_9_19", "x45_14_16"};

}  // namespace

TEST_CASE("graded piece dimensions on every model") {
  for (const auto& path : fixtures::model_paths()) {
    auto m = load_model(path);
    const auto g = static_cast<std::size_t>(m.genus);
    auto gp = graded_pieces(m, m.good_primes.front());
    INFO(m.label);
    CHECK(gp.dim_r1 == g);
    CHECK(gp.dim_r2 == 3 * (g - 1));
    CHECK(gp.dim_r3 == 5 * (g - 1));
    CHECK(gp.dim_i2 == (g - 2) * (g - 3) / 2);
    CHECK(gp.dim_i2 + gp.dim_r2 == g * (g + 1) / 2);
    CHECK(gp.dim_i3 + gp.dim_r3 == g * (g + 1) * (g + 2) / 6);
  }
  auto g5 = graded_pieces(fixtures::model("x32_15"), 3);
  CHECK(g5.dim_i2 == 3);
  CHECK(g5.dim_r2 == 12);
  CHECK(g5.dim_r3 == 20);
  auto g8 = graded_pieces(fixtures::model("x29_12"), 3);
  CHECK(g8.dim_i2 == 15);
  CHECK(g8.dim_r2 == 21);
}

TEST_CASE("degenerate inputs are rejected") {
  auto m = fixtures::model("x29_12");
  m.quadrics.pop_back();
  CHECK_THROWS_AS(graded_pieces(m, 3), InputError);
  auto dup = fixtures::model("x29_12");
  dup.quadrics.back() = dup.quadrics.front();
  CHECK_THROWS_AS(betti_22(dup, 3), InputError);
  // Genus 4: two Koszul terms vanish identically, refused.
  QuadricModel g4;
  g4.label = "g4";
  g4.level = 1;
  g4.genus = 4;
  g4.good_primes = {3};
  Quadric q;
  q.terms = {{0, 1, 1}, {2, 3, -1}};
  g4.quadrics = {q};
  CHECK_THROWS_AS(betti_22(g4, 3), InputError);
  CHECK_THROWS_AS(betti_22(fixtures::model("x29_12"), 29), BadPrimeError);
}

TEST_CASE("beta22 vanishes on the listed curves") {
  for (const char* stem : kVanishing) {
    auto m = fixtures::model(stem);
    auto r = betti_22(m, m.good_primes.front());
    INFO(stem << " over " << r.field);
    CHECK(r.beta22 == 0);
    CHECK(r.composes_to_zero);
    CHECK(r.dim_middle - r.rank_d2 == r.rank_d1 + r.beta22);
  }
}

TEST_CASE("beta22 is nonzero on tetragonal curves") {
  // Genus 5 canonical curves are tetragonal; x39_5_8_14 has a degree 4 map
  // to a genus 0 curve.
  for (const char* stem : {"x32_15", "x40_9_11_19", "x39_5_8_14"}) {
    auto m = fixtures::model(stem);
    auto r = betti_22(m, m.good_primes.front());
    INFO(stem);
    CHECK(r.beta22 > 0);
    CHECK(r.composes_to_zero);
  }
  // In genus 5 the space dualizes to the quadrics: beta22 = 3.
  CHECK(betti_22(fixtures::model("x32_15"), 3).beta22 == 3);
}

TEST_CASE("beta22 is stable under field extension and agrees over Q") {
  for (const char* stem : {"x32_15", "x31_5_6", "x29_12"}) {
    auto m = fixtures::model(stem);
    const auto p = m.good_primes.front();
    auto base = betti_22(m, p);
    auto ext = betti_22(m, p, 2);
    INFO(stem);
    CHECK(base.beta22 == ext.beta22);
    CHECK(base.rank_d1 == ext.rank_d1);
    CHECK(base.rank_d2 == ext.rank_d2);
  }
  for (const char* stem : {"x32_15", "x31_2_4_8_15"}) {
    auto m = fixtures::model(stem);
    auto q = betti_22_rational(m);
    auto fp = betti_22(m, m.good_primes.front());
    INFO(stem);
    CHECK(q.field == "Q");
    // Semicontinuity: the rational value never exceeds the mod p value.
    CHECK(q.beta22 <= fp.beta22);
    CHECK(q.composes_to_zero);
    CHECK(graded_pieces_rational(m).dim_r3 == 5 * static_cast<std::size_t>(m.genus - 1));
  }
}
