#include "modgon/koszul.hpp"

#include <algorithm>
#include <array>
#include <map>

#include "modgon/errors.hpp"
#include "modgon/field.hpp"
#include "modgon/linalg.hpp"

namespace modgon {

namespace {

// Monomials of a fixed degree as sorted index tuples, with a lookup table.
struct MonomialBasis {
  std::vector<std::vector<int>> monos;
  std::map<std::vector<int>, std::size_t> index;

  MonomialBasis(int g, int degree) {
    std::vector<int> cur;
    build(g, degree, 0, cur);
    for (std::size_t i = 0; i < monos.size(); ++i) index[monos[i]] = i;
  }

  std::size_t at(std::vector<int> m) const {
    std::sort(m.begin(), m.end());
    return index.at(m);
  }

 private:
  void build(int g, int left, int from, std::vector<int>& cur) {
    if (left == 0) {
      monos.push_back(cur);
      return;
    }
    for (int i = from; i < g; ++i) {
      cur.push_back(i);
      build(g, left - 1, i, cur);
      cur.pop_back();
    }
  }
};

// S_q / I_q: normal form of every monomial as a vector on the standard
// (non-pivot) monomials.
template <class F>
struct Quotient {
  std::size_t dim_ideal = 0;
  std::vector<std::size_t> standard;  // monomial indices forming the basis
  std::vector<std::vector<std::pair<std::size_t, typename F::Elem>>> normal_form;  // per monomial
};

template <class F>
Quotient<F> quotient(const F& f, Matrix<F> ideal, std::size_t n_monos) {
  Quotient<F> out;
  auto e = rref(f, std::move(ideal));
  out.dim_ideal = e.rows.size();
  std::vector<long> pivot_row(n_monos, -1);
  for (std::size_t r = 0; r < e.pivots.size(); ++r) pivot_row[e.pivots[r]] = static_cast<long>(r);
  std::vector<long> std_index(n_monos, -1);
  for (std::size_t c = 0; c < n_monos; ++c)
    if (pivot_row[c] < 0) {
      std_index[c] = static_cast<long>(out.standard.size());
      out.standard.push_back(c);
    }
  out.normal_form.resize(n_monos);
  for (std::size_t c = 0; c < n_monos; ++c) {
    if (pivot_row[c] < 0) {
      out.normal_form[c].emplace_back(static_cast<std::size_t>(std_index[c]), f.one());
      continue;
    }
    const auto& row = e.rows[static_cast<std::size_t>(pivot_row[c])];
    for (std::size_t j = 0; j < n_monos; ++j)
      if (pivot_row[j] < 0 && !f.is_zero(row[j]))
        out.normal_form[c].emplace_back(static_cast<std::size_t>(std_index[j]), f.neg(row[j]));
  }
  return out;
}

template <class F>
using Quadrics = std::vector<std::vector<std::tuple<int, int, typename F::Elem>>>;

template <class F>
struct Pieces {
  int g;
  MonomialBasis m2, m3;
  Quotient<F> r2, r3;
};

template <class F>
Pieces<F> build_pieces(const F& f, const Quadrics<F>& quads, int g) {
  if (g < 5) throw InputError("graded pieces need genus at least 5, got " + std::to_string(g));
  Pieces<F> pc{g, MonomialBasis(g, 2), MonomialBasis(g, 3), {}, {}};
  Matrix<F> i2;
  for (const auto& q : quads) {
    Row<F> row(pc.m2.monos.size(), f.zero());
    for (const auto& [i, j, c] : q) row[pc.m2.at({i, j})] = f.add(row[pc.m2.at({i, j})], c);
    i2.push_back(std::move(row));
  }
  Matrix<F> i3;
  for (int v = 0; v < g; ++v)
    for (const auto& q : quads) {
      Row<F> row(pc.m3.monos.size(), f.zero());
      for (const auto& [i, j, c] : q) {
        auto k = pc.m3.at({i, j, v});
        row[k] = f.add(row[k], c);
      }
      i3.push_back(std::move(row));
    }
  pc.r2 = quotient(f, std::move(i2), pc.m2.monos.size());
  pc.r3 = quotient(f, std::move(i3), pc.m3.monos.size());
  const auto want_i2 = static_cast<std::size_t>((g - 2) * (g - 3) / 2);
  if (pc.r2.dim_ideal != want_i2)
    throw InputError("quadrics span " + std::to_string(pc.r2.dim_ideal) + " dimensions, expected " +
                     std::to_string(want_i2));
  if (pc.r2.standard.size() != static_cast<std::size_t>(3 * (g - 1)) ||
      pc.r3.standard.size() != static_cast<std::size_t>(5 * (g - 1)))
    throw InputError("graded pieces have dimensions " + std::to_string(pc.r2.standard.size()) + ", " +
                     std::to_string(pc.r3.standard.size()) + "; expected " + std::to_string(3 * (g - 1)) + ", " +
                     std::to_string(5 * (g - 1)) + " for a canonical curve cut out by quadrics");
  return pc;
}

template <class F>
GradedPieces summarize(const Pieces<F>& pc, const std::string& field) {
  GradedPieces out;
  out.genus = pc.g;
  out.field = field;
  out.dim_i2 = pc.r2.dim_ideal;
  out.dim_i3 = pc.r3.dim_ideal;
  out.dim_r1 = static_cast<std::size_t>(pc.g);
  out.dim_r2 = pc.r2.standard.size();
  out.dim_r3 = pc.r3.standard.size();
  return out;
}

template <class F>
KoszulResult koszul(const F& f, const Quadrics<F>& quads, int g, const std::string& field) {
  auto pc = build_pieces(f, quads, g);
  KoszulResult res;
  res.field = field;
  res.pieces = summarize(pc, field);
  const std::size_t n2 = pc.r2.standard.size(), n3 = pc.r3.standard.size();
  const auto gs = static_cast<std::size_t>(g);

  std::map<std::pair<int, int>, std::size_t> wedge2;
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < g; ++a)
    for (int b = a + 1; b < g; ++b) {
      wedge2[{a, b}] = pairs.size();
      pairs.emplace_back(a, b);
    }
  std::vector<std::array<int, 3>> triples;
  for (int a = 0; a < g; ++a)
    for (int b = a + 1; b < g; ++b)
      for (int c = b + 1; c < g; ++c) triples.push_back({a, b, c});

  res.dim_source = triples.size() * gs;
  res.dim_middle = pairs.size() * n2;
  res.dim_target = gs * n3;
  if (res.dim_source * res.dim_middle > kKoszulMaxEntries || res.dim_middle * res.dim_target > kKoszulMaxEntries)
    throw BudgetExceeded("Koszul matrices for genus " + std::to_string(g) + " exceed the entry limit");

  using Sparse = std::vector<std::pair<std::size_t, typename F::Elem>>;
  using Acc = std::map<std::size_t, typename F::Elem>;
  // Map default values are not field zeros (log representation), so insert explicitly.
  auto accumulate = [&](Acc& acc, std::size_t key, const typename F::Elem& v) {
    auto it = acc.find(key);
    if (it == acc.end()) acc.emplace(key, v);
    else it->second = f.add(it->second, v);
  };
  auto add_scaled = [&](Acc& acc, std::size_t base, const Sparse& nf, bool negate) {
    for (const auto& [k, c] : nf) accumulate(acc, base + k, negate ? f.neg(c) : c);
  };

  // d2(e_a ^ e_b (x) m) = e_b (x) x_a m - e_a (x) x_b m, m a standard monomial of R_2.
  auto d2_sparse = [&](std::size_t pair_index, std::size_t r2_index, Acc& acc, const typename F::Elem& scale) {
    const auto [a, b] = pairs[pair_index];
    auto m = pc.m2.monos[pc.r2.standard[r2_index]];
    auto ma = m, mb = m;
    ma.push_back(a);
    mb.push_back(b);
    for (const auto& [k, c] : pc.r3.normal_form[pc.m3.at(ma)])
      accumulate(acc, static_cast<std::size_t>(b) * n3 + k, f.mul(scale, c));
    for (const auto& [k, c] : pc.r3.normal_form[pc.m3.at(mb)])
      accumulate(acc, static_cast<std::size_t>(a) * n3 + k, f.neg(f.mul(scale, c)));
  };

  Matrix<F> d2_rows;
  d2_rows.reserve(res.dim_middle);
  for (std::size_t pi = 0; pi < pairs.size(); ++pi)
    for (std::size_t ri = 0; ri < n2; ++ri) {
      Acc acc;
      d2_sparse(pi, ri, acc, f.one());
      Row<F> row(res.dim_target, f.zero());
      for (const auto& [k, v] : acc) row[k] = v;
      d2_rows.push_back(std::move(row));
    }

  // d1(e_a ^ e_b ^ e_c (x) x_i) = e_b^e_c (x) x_a x_i - e_a^e_c (x) x_b x_i + e_a^e_b (x) x_c x_i.
  Matrix<F> d1_rows;
  d1_rows.reserve(res.dim_source);
  res.composes_to_zero = true;
  for (const auto& t : triples) {
    for (int i = 0; i < g; ++i) {
      Acc acc;
      const int a = t[0], b = t[1], c = t[2];
      add_scaled(acc, wedge2.at({b, c}) * n2, pc.r2.normal_form[pc.m2.at({a, i})], false);
      add_scaled(acc, wedge2.at({a, c}) * n2, pc.r2.normal_form[pc.m2.at({b, i})], true);
      add_scaled(acc, wedge2.at({a, b}) * n2, pc.r2.normal_form[pc.m2.at({c, i})], false);
      Row<F> row(res.dim_middle, f.zero());
      Acc image;
      for (const auto& [k, v] : acc) {
        if (f.is_zero(v)) continue;
        row[k] = v;
        d2_sparse(k / n2, k % n2, image, v);
      }
      for (const auto& [k, v] : image)
        if (!f.is_zero(v)) res.composes_to_zero = false;
      d1_rows.push_back(std::move(row));
    }
  }
  res.rank_d1 = rank(f, std::move(d1_rows));
  res.rank_d2 = rank(f, std::move(d2_rows));
  res.beta22 = res.dim_middle - res.rank_d2 - res.rank_d1;
  return res;
}

Quadrics<GaloisField> reduce(const QuadricModel& m, const GaloisField& f) {
  const auto p = f.characteristic();
  if (std::find(m.good_primes.begin(), m.good_primes.end(), p) == m.good_primes.end() ||
      m.level % static_cast<int>(p) == 0)
    throw BadPrimeError("prime " + std::to_string(p) + " is not a good prime for " + m.label);
  Quadrics<GaloisField> out;
  for (const auto& q : m.quadrics) {
    auto& row = out.emplace_back();
    for (const auto& t : q.terms) {
      auto r = t.coeff % static_cast<std::int64_t>(p);
      if (r < 0) r += p;
      row.emplace_back(t.i, t.j, f.from_int(r));
    }
  }
  return out;
}

Quadrics<RationalField> rational(const QuadricModel& m, const RationalField& q) {
  Quadrics<RationalField> out;
  for (const auto& quad : m.quadrics) {
    auto& row = out.emplace_back();
    for (const auto& t : quad.terms) row.emplace_back(t.i, t.j, q.from_int(t.coeff));
  }
  return out;
}

}  // namespace

GradedPieces graded_pieces(const QuadricModel& m, std::uint32_t p, std::uint32_t k) {
  const auto& f = *galois_field(p, k);
  return summarize(build_pieces(f, reduce(m, f), m.genus), f.name());
}

KoszulResult betti_22(const QuadricModel& m, std::uint32_t p, std::uint32_t k) {
  const auto& f = *galois_field(p, k);
  return koszul(f, reduce(m, f), m.genus, f.name());
}

GradedPieces graded_pieces_rational(const QuadricModel& m) {
  RationalField q;
  return summarize(build_pieces(q, rational(m, q), m.genus), "Q");
}

KoszulResult betti_22_rational(const QuadricModel& m) {
  RationalField q;
  return koszul(q, rational(m, q), m.genus, "Q");
}

}  // namespace modgon
