#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numeric>

#include "fixtures.hpp"
#include "modgon/errors.hpp"
#include "modgon/gonality.hpp"
#include "modgon/linalg.hpp"

using namespace modgon;

namespace {

std::vector<std::string> names(const std::vector<Shape>& v) {
  std::vector<std::string> out;
  for (const auto& s : v) out.push_back(shape_string(s));
  return out;
}

// A genus-5 witness D of degree 4 with ell(D) = 2 spans a plane lying on a
// singular quadric of the net: find the quadric vanishing on span(D) and
// check its Gram matrix is singular (odd characteristic only).
bool plane_lies_on_singular_quadric(const ReducedModel& c, const EffectiveDivisor& d) {
  std::uint32_t l = 1;
  for (const auto& [pt, m] : d.parts) l = lcm_u32(l, pt.degree);
  const auto& f = *galois_field(c.prime(), l);
  auto rows = divisor_rows(c, d, f);
  auto basis = rref(f, Matrix<GaloisField>(rows.begin(), rows.end())).rows;
  if (basis.size() != 3) return false;
  // Restriction of each quadric to the plane: coefficients of u_a u_b.
  const int g = c.genus();
  Matrix<GaloisField> restr(6, Row<GaloisField>(c.quadrics().size(), f.zero()));
  const int pairs[6][2] = {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}};
  for (std::size_t k = 0; k < c.quadrics().size(); ++k) {
    for (const auto& t : c.quadrics()[k]) {
      const auto coeff = f.from_int(t.coeff);
      for (int pi = 0; pi < 6; ++pi) {
        const int a = pairs[pi][0], b = pairs[pi][1];
        auto v = f.mul(basis[a][t.i], basis[b][t.j]);
        if (a != b) v = f.add(v, f.mul(basis[b][t.i], basis[a][t.j]));
        restr[pi][k] = f.add(restr[pi][k], f.mul(coeff, v));
      }
    }
  }
  auto ker = kernel(f, restr, c.quadrics().size());
  for (const auto& lambda : ker) {
    Matrix<GaloisField> gram(g, Row<GaloisField>(g, f.zero()));
    for (std::size_t k = 0; k < c.quadrics().size(); ++k) {
      for (const auto& t : c.quadrics()[k]) {
        const auto v = f.mul(lambda[k], f.from_int(t.coeff));
        if (t.i == t.j) {
          gram[t.i][t.i] = f.add(gram[t.i][t.i], f.add(v, v));
        } else {
          gram[t.i][t.j] = f.add(gram[t.i][t.j], v);
          gram[t.j][t.i] = f.add(gram[t.j][t.i], v);
        }
      }
    }
    if (rank(f, gram) <= 4) return true;
  }
  return false;
}

struct Case {
  const char* stem;
  std::uint32_t p;
  int max_d;
};

const Case kSoundness[] = {
    {"x32_15", 3, 4},       {"x40_9_11_19", 3, 4},  {"x34_9_13_15", 3, 4}, {"x33_2_4_8_16", 5, 4},
    {"x30_11", 7, 3},       {"x31_5_6", 2, 4},      {"x31_2_4_8_15", 2, 4}, {"x35_6_8_13", 2, 4},
    {"x40_3_9_13", 3, 4},   {"x29_12", 3, 4},       {"x36_17", 5, 3},       {"x44_5_7_9_19", 3, 4},
    {"x35_4_6_9_11_16", 2, 4},
};

}  // namespace

TEST_CASE("divisor shapes") {
  CHECK(names(shapes(5, 3, 5)) == std::vector<std::string>{"1+1+1+1+1", "1+1+1+2"});
  CHECK(names(shapes(5, 2, 5)) == std::vector<std::string>{"1+1+1+1+1", "1+1+1+2", "1+1+3"});
  CHECK(names(shapes(4, 0, 4)) == std::vector<std::string>{"1+1+1+1", "1+1+2", "1+3", "2+2", "4"});
  CHECK(names(shapes(4, 0, 2)) == std::vector<std::string>{"1+1+1+1", "1+1+2", "2+2"});
  CHECK(shapes(3, 4, 3).empty());
  CHECK(parse_shape("2+1+1") == Shape{1, 1, 2});
  CHECK_THROWS_AS(parse_shape("1++2"), InputError);

  CHECK(pigeonhole_k(0, 3) == -1);
  CHECK(pigeonhole_k(4, 3) == 0);
  CHECK(pigeonhole_k(5, 3) == 1);
  CHECK(pigeonhole_k(8, 3) == 1);
  CHECK(pigeonhole_k(9, 3) == 2);
  // Exactly d(q+1) points leaves k = d-1.
  CHECK(pigeonhole_k(5 * 26, 25) == 4);

  // Two rational parts forced once n > q+1.
  CHECK(names(admissible_shapes(5, 9, 7)) == std::vector<std::string>{"1+1+1+1+1", "1+1+1+2", "1+1+3"});
  CHECK(names(admissible_shapes(5, 9, 7, false)).size() == 5);
  // Without rational points every shape of every degree up to d counts.
  CHECK(admissible_shapes(3, 0, 2).size() == 1 + 2 + 3);
}

TEST_CASE("pruned and unpruned searches agree") {
  for (const auto& cs : kSoundness) {
    auto m = fixtures::model(cs.stem);
    ReducedModel r(m, cs.p);
    bool previous_certified = true;
    for (int d = 1; d <= cs.max_d; ++d) {
      auto oracle = unpruned_search(r, d);
      auto pruned = gonality_lower_bound(r, d);
      SearchConfig plain;
      plain.pigeonhole = false;
      auto translate_only = gonality_lower_bound(r, d, plain);
      INFO(cs.stem << " p=" << cs.p << " d=" << d);
      REQUIRE(pruned.complete());
      CHECK(pruned.certified() == !oracle.witness.has_value());
      CHECK(translate_only.certified() == pruned.certified());
      if (pruned.witness) {
        CHECK(pruned.witness->degree() == d);
        CHECK(pruned.witness_ell >= 2);
      }
      if (oracle.witness) CHECK(riemann_roch(r, *oracle.witness).ell >= 2);
      // A certificate at d implies one at every smaller degree.
      if (pruned.certified()) CHECK(previous_certified);
      previous_certified = pruned.certified();
    }
  }
}

TEST_CASE("genus 5 over F_3: degree 4 lower search and upper witness") {
  for (const char* stem : {"x32_15", "x40_9_11_19", "x34_9_13_15"}) {
    auto m = fixtures::model(stem);
    REQUIRE(m.genus == 5);
    ReducedModel r(m, 3);
    auto pruned = gonality_lower_bound(r, 4);
    auto oracle = unpruned_search(r, 4);
    INFO(stem);
    CHECK(pruned.certified() == !oracle.witness.has_value());
    auto upper = gonality_upper_search(r, 4, 2);
    CHECK(upper.witness.has_value() == oracle.witness.has_value());
    if (upper.witness) {
      CHECK(upper.witness->degree() == 4);
      CHECK(riemann_roch(r, *upper.witness).ell >= 2);
      // A reduced witness spans a plane inside a rank <= 4 quadric.
      bool reduced = true;
      for (const auto& [pt, mult] : upper.witness->parts) reduced = reduced && mult == 1;
      if (reduced && riemann_roch(r, *upper.witness).ell == 2)
        CHECK(plane_lies_on_singular_quadric(r, *upper.witness));
    }
  }
}

TEST_CASE("reduced degree 4 witnesses lie on singular quadrics") {
  // Every reduced 4-point divisor with ell = 2 on a genus-5 curve.
  auto m = fixtures::model("x32_15");
  ReducedModel r(m, 3);
  auto pts = closed_points(r, 2);
  int checked = 0;
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b)
      for (std::size_t c = b + 1; c < pts.size(); ++c)
        for (std::size_t e = c + 1; e < pts.size(); ++e) {
          EffectiveDivisor d;
          for (auto i : {a, b, c, e}) d.parts.emplace_back(pts[i], 1);
          if (d.degree() != 4) continue;
          if (riemann_roch(r, d).ell != 2) continue;
          CHECK(plane_lies_on_singular_quadric(r, d));
          ++checked;
        }
  CHECK(checked > 0);
}

TEST_CASE("searches are independent of the worker count") {
  for (const Case& cs : {Case{"x29_12", 3, 5}, Case{"x33_2_4_8_16", 5, 4}, Case{"x31_2_4_8_15", 2, 4}}) {
    auto m = fixtures::model(cs.stem);
    ReducedModel r(m, cs.p);
    SearchConfig one, many;
    many.workers = 4;
    auto a = gonality_lower_bound(r, cs.max_d, one);
    auto b = gonality_lower_bound(r, cs.max_d, many);
    CHECK(a.divisors == b.divisors);
    CHECK(a.certified() == b.certified());
    CHECK(a.witness.has_value() == b.witness.has_value());
    if (a.witness && b.witness) CHECK(a.witness->to_string(r) == b.witness->to_string(r));
  }
}

TEST_CASE("checkpoints resume to the same result") {
  auto m = fixtures::model("x29_12");
  ReducedModel r(m, 3);
  auto dir = std::filesystem::temp_directory_path() / "modgon_ck_test";
  std::filesystem::create_directories(dir);
  auto path = dir / "search.ck";
  std::filesystem::remove(path);
  SearchConfig cfg;
  cfg.checkpoint = path;
  auto first = gonality_lower_bound(r, 5, cfg);
  REQUIRE(first.certified());
  // Keep the header and half the records, as after an interruption.
  std::vector<std::string> lines;
  {
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
  }
  REQUIRE(lines.size() > 2);
  {
    std::ofstream out(path);
    for (std::size_t i = 0; i < 1 + (lines.size() - 1) / 2; ++i) out << lines[i] << "\n";
  }
  auto resumed = gonality_lower_bound(r, 5, cfg);
  CHECK(resumed.certified());
  CHECK(resumed.divisors == first.divisors);
  // A checkpoint from another search is refused.
  CHECK_THROWS_AS(gonality_lower_bound(r, 4, cfg), InputError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("budget exhaustion never certifies") {
  auto m = fixtures::model("x29_12");
  ReducedModel r(m, 3);
  SearchConfig tiny;
  tiny.budget = 1000;
  auto res = gonality_lower_bound(r, 5, tiny);
  CHECK_FALSE(res.complete());
  CHECK_FALSE(res.certified());
  CHECK_FALSE(res.skipped.empty());
}

TEST_CASE("rational points agree with a plain box search") {
  for (const char* stem : {"x32_15", "x40_9_11_19", "x30_11"}) {
    auto m = fixtures::model(stem);
    const int h = 3;
    auto pts = rational_points(m, h);
    // Box oracle: all primitive vectors with first nonzero entry positive.
    std::vector<IntPoint> brute;
    const int g = m.genus;
    IntPoint x(g, -h);
    for (;;) {
      int first = 0;
      while (first < g && x[first] == 0) ++first;
      std::int64_t gg = 0;
      for (auto v : x) gg = std::gcd(gg, v < 0 ? -v : v);
      if (first < g && x[first] > 0 && gg == 1) {
        bool ok = true;
        for (const auto& q : m.quadrics) {
          std::int64_t v = 0;
          for (const auto& t : q.terms) v += t.coeff * x[t.i] * x[t.j];
          ok = ok && v == 0;
        }
        if (ok) brute.push_back(x);
      }
      int i = g - 1;
      while (i >= 0 && x[i] == h) x[i--] = -h;
      if (i < 0) break;
      ++x[i];
    }
    std::sort(brute.begin(), brute.end());
    auto sorted = pts;
    std::sort(sorted.begin(), sorted.end());
    INFO(stem);
    CHECK(sorted == brute);
  }
}

TEST_CASE("rational upper witnesses") {
  auto m = fixtures::model("x32_15");
  auto pool = rational_points(m, 30);
  REQUIRE(pool.size() >= 4);
  auto res = rational_upper_search(m, 4, pool);
  REQUIRE(res.witness.has_value());
  CHECK(res.witness->size() == 4);
  CHECK(rational_ell(*res.witness) >= 2);
  // A hyperplane section of rational points would have ell = g; single
  // points never move.
  CHECK(rational_ell({pool[0]}) == 1);
  // Too small a pool is reported, not certified.
  std::vector<IntPoint> small(pool.begin(), pool.begin() + 2);
  auto none = rational_upper_search(m, 4, small);
  CHECK_FALSE(none.witness.has_value());
  CHECK(none.pool == 2);
}
