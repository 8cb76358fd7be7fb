#include "modgon/curve.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "modgon/errors.hpp"
#include "modgon/linalg.hpp"
#include "block_plan.hpp"

namespace modgon {

std::uint32_t lcm_u32(std::uint32_t a, std::uint32_t b) { return a / std::gcd(a, b) * b; }

namespace {

std::string format_coords(const GaloisField& f, const Coords& x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) s += ":";
    s += f.format(x[i]);
  }
  return s + ")";
}

// Roots of a x^2 + b x + c over F_q.
class QuadraticSolver {
 public:
  explicit QuadraticSolver(const GaloisField& f) : f_(f) {
    if (f.characteristic() == 2) {
      as_.assign(f.order(), kNone);
      for (GaloisField::Elem y = 0; y < f.order(); ++y) {
        auto z = f.add(f.mul(y, y), y);
        if (as_[z] == kNone) as_[z] = y;
      }
    }
  }

  // Appends roots to out (at most two, no duplicates). Assumes (a,b) != 0.
  void roots(GaloisField::Elem a, GaloisField::Elem b, GaloisField::Elem c,
             std::vector<GaloisField::Elem>& out) const {
    const auto& f = f_;
    out.clear();
    if (f.is_zero(a)) {
      out.push_back(f.neg(f.div(c, b)));
      return;
    }
    const std::uint32_t m = f.order() - 1;
    if (f.characteristic() != 2) {
      auto disc = f.sub(f.mul(b, b), f.mul(f.from_int(4), f.mul(a, c)));
      auto two_a = f.mul(f.from_int(2), a);
      if (f.is_zero(disc)) {
        out.push_back(f.div(f.neg(b), two_a));
        return;
      }
      if (disc % 2 != 0) return;
      GaloisField::Elem s = disc / 2;
      out.push_back(f.div(f.sub(s, b), two_a));
      out.push_back(f.div(f.sub(f.neg(s), b), two_a));
      return;
    }
    if (f.is_zero(b)) {
      auto r = f.div(c, a);
      if (f.is_zero(r)) {
        out.push_back(f.zero());
      } else {
        out.push_back(static_cast<GaloisField::Elem>(static_cast<std::uint64_t>(r) * ((m + 1) / 2) % m));
      }
      return;
    }
    // x = (b/a) y with y^2 + y = a c / b^2.
    auto z = f.div(f.mul(a, c), f.mul(b, b));
    auto y = as_[z];
    if (y == kNone) return;
    auto scale = f.div(b, a);
    out.push_back(f.mul(scale, y));
    out.push_back(f.mul(scale, f.add(y, f.one())));
  }

 private:
  static constexpr GaloisField::Elem kNone = 0xffffffffu;
  const GaloisField& f_;
  std::vector<GaloisField::Elem> as_;
};

// Number of coordinate prefixes the enumeration visits over F_q.
void check_work(const ReducedModel& c, std::uint32_t q, const EnumerationLimits& lim) {
  const int g = c.genus();
  unsigned __int128 work = 0;
  for (int lead = 0; lead < g; ++lead) {
    const int s = c.lead_plans()[static_cast<std::size_t>(lead)].solved;
    const int free = s > 0 ? g - lead - 1 - s : std::max(0, g - lead - 2);
    unsigned __int128 total = 1;
    for (int i = 0; i < free && total <= lim.max_prefixes; ++i) total *= q;
    work += total;
  }
  if (work > lim.max_prefixes)
    throw BudgetExceeded("enumerating points of a genus " + std::to_string(g) + " curve over F_" +
                         std::to_string(q) + " exceeds the budget of " + std::to_string(lim.max_prefixes) +
                         " prefixes");
}

}  // namespace

ReducedModel::ReducedModel(const QuadricModel& model, std::uint32_t p)
    : source_(std::make_shared<const QuadricModel>(model)), p_(p), genus_(model.genus) {
  if (std::find(model.good_primes.begin(), model.good_primes.end(), p) == model.good_primes.end() ||
      model.level % static_cast<int>(p) == 0)
    throw BadPrimeError("prime " + std::to_string(p) + " is not a good prime for " + model.label);
  for (const auto& q : model.quadrics) {
    std::vector<ReducedTerm> terms;
    for (const auto& t : q.terms) {
      std::int64_t r = t.coeff % static_cast<std::int64_t>(p);
      if (r < 0) r += p;
      if (r != 0) terms.push_back({t.i, t.j, static_cast<std::uint32_t>(r)});
    }
    quads_.push_back(std::move(terms));
  }
  // The quadrics must stay independent mod p.
  const auto& f = *galois_field(p, 1);
  const int g = genus_;
  Matrix<GaloisField> m;
  for (const auto& q : quads_) {
    Row<GaloisField> row(static_cast<std::size_t>(g * g), f.zero());
    for (const auto& t : q) row[static_cast<std::size_t>(t.i * g + t.j)] = f.from_int(t.coeff);
    m.push_back(std::move(row));
  }
  if (rank(f, m) != quads_.size())
    throw InputError("quadrics of " + model.label + " become dependent mod " + std::to_string(p));

  std::vector<std::vector<detail::Term<GaloisField>>> terms;
  for (const auto& q : quads_) {
    auto& row = terms.emplace_back();
    for (const auto& t : q) row.emplace_back(t.i, t.j, f.from_int(t.coeff));
  }
  plans_.resize(static_cast<std::size_t>(g));
  for (int lead = 0; lead < g; ++lead) {
    auto plan = detail::block_plan(f, terms, g, lead);
    auto& out = plans_[static_cast<std::size_t>(lead)];
    out.solved = plan.solved;
    for (const auto& combo : plan.combos) {
      auto& row = out.combos.emplace_back();
      for (const auto& [i, j, c] : combo) row.push_back({i, j, f.coefficients(c)[0]});
    }
  }
  EnumerationLimits lim;
  for (const auto& x : enumerate_points(*this, 1, lim)) {
    if (!is_smooth_at(f, x))
      throw SingularError("reduction of " + model.label + " mod " + std::to_string(p) +
                          " is singular at " + format_coords(f, x));
  }
}

GaloisField::Elem ReducedModel::evaluate(const GaloisField& f, std::size_t k, const Coords& x) const {
  auto acc = f.zero();
  for (const auto& t : quads_[k])
    acc = f.add(acc, f.mul(f.from_int(t.coeff), f.mul(x[t.i], x[t.j])));
  return acc;
}

bool ReducedModel::on_curve(const GaloisField& f, const Coords& x) const {
  for (std::size_t k = 0; k < quads_.size(); ++k)
    if (!f.is_zero(evaluate(f, k, x))) return false;
  return true;
}

std::vector<Coords> ReducedModel::jacobian(const GaloisField& f, const Coords& x) const {
  std::vector<Coords> jac(quads_.size(), Coords(genus_, f.zero()));
  for (std::size_t k = 0; k < quads_.size(); ++k) {
    for (const auto& t : quads_[k]) {
      auto c = f.from_int(t.coeff);
      if (t.i == t.j) {
        jac[k][t.i] = f.add(jac[k][t.i], f.mul(f.from_int(2 * t.coeff), x[t.i]));
      } else {
        jac[k][t.i] = f.add(jac[k][t.i], f.mul(c, x[t.j]));
        jac[k][t.j] = f.add(jac[k][t.j], f.mul(c, x[t.i]));
      }
    }
  }
  return jac;
}

bool ReducedModel::is_smooth_at(const GaloisField& f, const Coords& x) const {
  return rank(f, jacobian(f, x)) == static_cast<std::size_t>(genus_ - 2);
}

namespace {

// Points with leading coordinate `lead`; the last coordinate is found as a
// root of the first quadric that is not constant in it.
void enumerate_root_solve(const ReducedModel& c, const GaloisField& f, int lead, std::vector<Coords>& out) {
  const int g = c.genus();
  const int last = g - 1;

  // Split each quadric as a x_last^2 + x_last * B(x') + C(x').
  struct Split {
    GaloisField::Elem a;
    std::vector<std::pair<int, GaloisField::Elem>> lin;
    std::vector<std::tuple<int, int, GaloisField::Elem>> rest;
  };
  std::vector<Split> split;
  for (const auto& q : c.quadrics()) {
    Split s{f.zero(), {}, {}};
    for (const auto& t : q) {
      auto e = f.from_int(t.coeff);
      if (t.i == last && t.j == last) s.a = e;
      else if (t.j == last) s.lin.emplace_back(t.i, e);
      else s.rest.emplace_back(t.i, t.j, e);
    }
    split.push_back(std::move(s));
  }
  std::stable_sort(split.begin(), split.end(),
                   [&](const Split& x, const Split& y) { return !f.is_zero(x.a) && f.is_zero(y.a); });

  QuadraticSolver solver(f);
  std::vector<GaloisField::Elem> roots;
  std::vector<GaloisField::Elem> bvals(split.size()), cvals(split.size());
  Coords x(g, f.zero());

  {
    std::fill(x.begin(), x.end(), f.zero());
    x[lead] = f.one();
    if (lead == last) {
      if (c.on_curve(f, x)) out.push_back(x);
      return;
    }
    // Odometer over x[lead+1 .. last-1]; element values run 0..q-1.
    for (int i = lead + 1; i < last; ++i) x[i] = 0;
    for (;;) {
      int solver_quad = -1;
      bool dead = false;
      for (std::size_t k = 0; k < split.size(); ++k) {
        const auto& s = split[k];
        auto b = f.zero();
        for (const auto& [i, e] : s.lin) b = f.add(b, f.mul(e, x[i]));
        bvals[k] = b;
        auto cc = f.zero();
        for (const auto& [i, j, e] : s.rest) cc = f.add(cc, f.mul(e, f.mul(x[i], x[j])));
        cvals[k] = cc;
        if (!f.is_zero(s.a) || !f.is_zero(b)) {
          solver_quad = static_cast<int>(k);
          break;
        }
        if (!f.is_zero(cc)) {
          dead = true;
          break;
        }
      }
      if (!dead) {
        if (solver_quad < 0) {
          roots.resize(f.order());
          std::iota(roots.begin(), roots.end(), 0u);
        } else {
          solver.roots(split[solver_quad].a, bvals[solver_quad], cvals[solver_quad], roots);
        }
        for (auto r : roots) {
          x[last] = r;
          if (c.on_curve(f, x)) out.push_back(x);
        }
        x[last] = f.zero();
      }
      int i = last - 1;
      while (i > lead) {
        if (x[i] + 1 < f.order()) {
          ++x[i];
          break;
        }
        x[i] = 0;
        --i;
      }
      if (i == lead) break;
    }
  }
}

// Points with leading coordinate `lead`: for each prefix the block
// coordinates satisfy a linear system from the plan's combinations.
void enumerate_block_linear(const ReducedModel& c, const GaloisField& f, int lead, std::vector<Coords>& out) {
  const int g = c.genus();
  const auto& plan = c.lead_plans()[static_cast<std::size_t>(lead)];
  const int s = plan.solved;
  const int first_y = g - s;

  struct Combo {
    std::vector<std::vector<std::pair<int, GaloisField::Elem>>> lin;  // per y index
    std::vector<std::tuple<int, int, GaloisField::Elem>> rest;
  };
  std::vector<Combo> combos;
  for (const auto& q : plan.combos) {
    Combo cb;
    cb.lin.resize(s);
    for (const auto& t : q) {
      auto e = f.from_int(t.coeff);
      if (t.j >= first_y) cb.lin[t.j - first_y].emplace_back(t.i, e);
      else cb.rest.emplace_back(t.i, t.j, e);
    }
    combos.push_back(std::move(cb));
  }

  Coords x(g, f.zero());
  Matrix<GaloisField> sys(combos.size(), Row<GaloisField>(s + 1, f.zero()));
  {
    std::fill(x.begin(), x.end(), f.zero());
    x[lead] = f.one();
    for (int i = lead + 1; i < first_y; ++i) x[i] = 0;
    for (;;) {
      for (std::size_t k = 0; k < combos.size(); ++k) {
        for (int iy = 0; iy < s; ++iy) {
          auto acc = f.zero();
          for (const auto& [i, e] : combos[k].lin[iy]) acc = f.add(acc, f.mul(e, x[i]));
          sys[k][iy] = acc;
        }
        auto cc = f.zero();
        for (const auto& [i, j, e] : combos[k].rest) cc = f.add(cc, f.mul(e, f.mul(x[i], x[j])));
        sys[k][s] = f.neg(cc);
      }
      auto e = rref(f, sys);
      bool consistent = e.pivots.empty() || e.pivots.back() < static_cast<std::size_t>(s);
      if (consistent) {
        std::vector<char> pivot(s, 0);
        for (auto pc : e.pivots) pivot[pc] = 1;
        std::vector<int> free_vars;
        for (int iy = 0; iy < s; ++iy)
          if (!pivot[iy]) free_vars.push_back(iy);
        std::vector<GaloisField::Elem> fv(free_vars.size(), 0);
        for (;;) {
          for (std::size_t t = 0; t < free_vars.size(); ++t) x[first_y + free_vars[t]] = fv[t];
          for (std::size_t r = 0; r < e.rows.size(); ++r) {
            auto v = e.rows[r][s];
            for (std::size_t t = 0; t < free_vars.size(); ++t)
              v = f.sub(v, f.mul(e.rows[r][free_vars[t]], fv[t]));
            x[first_y + static_cast<int>(e.pivots[r])] = v;
          }
          if (c.on_curve(f, x)) out.push_back(x);
          std::size_t t = 0;
          while (t < fv.size()) {
            if (fv[t] + 1 < f.order()) {
              ++fv[t];
              break;
            }
            fv[t] = 0;
            ++t;
          }
          if (t == fv.size()) break;
        }
        for (int iy = 0; iy < s; ++iy) x[first_y + iy] = f.zero();
      }
      int i = first_y - 1;
      while (i > lead) {
        if (x[i] + 1 < f.order()) {
          ++x[i];
          break;
        }
        x[i] = 0;
        --i;
      }
      if (i == lead) break;
    }
  }
}

}  // namespace

std::vector<Coords> enumerate_points(const ReducedModel& c, std::uint32_t k, const EnumerationLimits& lim) {
  const auto fp = galois_field(c.prime(), k);
  const auto& f = *fp;
  const int g = c.genus();
  check_work(c, f.order(), lim);
  std::vector<Coords> out;
  for (int lead = 0; lead < g; ++lead) {
    if (c.lead_plans()[static_cast<std::size_t>(lead)].solved > 0) enumerate_block_linear(c, f, lead, out);
    else enumerate_root_solve(c, f, lead, out);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::uint64_t count_points(const ReducedModel& c, std::uint32_t k, const EnumerationLimits& lim) {
  return enumerate_points(c, k, lim).size();
}

std::vector<Coords> conjugates(const ReducedModel& c, const ClosedPoint& pt) {
  const auto& f = *galois_field(c.prime(), pt.degree);
  std::vector<Coords> out;
  for (std::uint32_t j = 0; j < pt.degree; ++j) {
    Coords y(pt.coords.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = f.frobenius(pt.coords[i], j);
    out.push_back(std::move(y));
  }
  return out;
}

std::vector<ClosedPoint> closed_points(const ReducedModel& c, std::uint32_t max_degree,
                                       const EnumerationLimits& lim) {
  std::vector<ClosedPoint> out;
  for (std::uint32_t e = 1; e <= max_degree; ++e) {
    const auto& f = *galois_field(c.prime(), e);
    for (const auto& x : enumerate_points(c, e, lim)) {
      bool keep = true;
      for (std::uint32_t j = 1; j < e && keep; ++j) {
        Coords y(x.size());
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = f.frobenius(x[i], j);
        // Fixed by a smaller Frobenius power, or a smaller conjugate exists.
        if (y == x || y < x) keep = false;
      }
      if (keep) out.push_back({e, x});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

LocalExpansion local_expansion(const ReducedModel& c, const GaloisField& f, const Coords& point, int order) {
  const int g = c.genus();
  if (order < 1) throw InputError("expansion order must be positive");
  if (!c.on_curve(f, point)) throw InputError("point " + format_coords(f, point) + " is not on the curve");
  LocalExpansion ex;
  ex.chart = 0;
  while (ex.chart < g && f.is_zero(point[ex.chart])) ++ex.chart;
  if (ex.chart == g) throw InputError("zero vector is not a projective point");
  Coords p0(g);
  auto inv = f.inv(point[ex.chart]);
  for (int i = 0; i < g; ++i) p0[i] = f.mul(point[i], inv);
  ex.coeffs.push_back(p0);

  auto jac = c.jacobian(f, p0);
  if (rank(f, jac) != static_cast<std::size_t>(g - 2))
    throw SingularError("singular point " + format_coords(f, p0));
  if (order == 1) {
    ex.param = ex.chart;
    return ex;
  }
  Matrix<GaloisField> aug = jac;
  Row<GaloisField> chart_row(g, f.zero());
  chart_row[ex.chart] = f.one();
  aug.push_back(chart_row);
  auto ker = kernel(f, aug, static_cast<std::size_t>(g));
  if (ker.size() != 1) throw SingularError("tangent line undetermined at " + format_coords(f, p0));
  Coords w = ker[0];
  ex.param = 0;
  while (f.is_zero(w[ex.param])) ++ex.param;
  auto winv = f.inv(w[ex.param]);
  for (auto& e : w) e = f.mul(e, winv);
  ex.coeffs.push_back(w);

  std::vector<int> free_cols;
  for (int i = 0; i < g; ++i)
    if (i != ex.chart && i != ex.param) free_cols.push_back(i);
  Matrix<GaloisField> jr;
  for (const auto& row : jac) {
    Row<GaloisField> r;
    for (int i : free_cols) r.push_back(row[i]);
    jr.push_back(std::move(r));
  }
  for (int n = 2; n < order; ++n) {
    Row<GaloisField> rhs(c.quadrics().size(), f.zero());
    for (std::size_t k = 0; k < c.quadrics().size(); ++k) {
      auto acc = f.zero();
      for (const auto& t : c.quadrics()[k]) {
        auto inner = f.zero();
        for (int s = 1; s < n; ++s)
          inner = f.add(inner, f.mul(ex.coeffs[s][t.i], ex.coeffs[n - s][t.j]));
        acc = f.add(acc, f.mul(f.from_int(t.coeff), inner));
      }
      rhs[k] = f.neg(acc);
    }
    auto sol = solve(f, jr, rhs);
    if (!sol) throw SingularError("expansion lifting failed at " + format_coords(f, p0));
    Coords v(g, f.zero());
    for (std::size_t i = 0; i < free_cols.size(); ++i) v[free_cols[i]] = (*sol)[i];
    ex.coeffs.push_back(std::move(v));
  }
  return ex;
}

int EffectiveDivisor::degree() const {
  int d = 0;
  for (const auto& [pt, m] : parts) d += static_cast<int>(pt.degree) * m;
  return d;
}

std::string EffectiveDivisor::to_string(const ReducedModel& c) const {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) s += " + ";
    const auto& [pt, m] = parts[i];
    if (m > 1) s += std::to_string(m) + "*";
    const auto& f = *galois_field(c.prime(), pt.degree);
    s += "[" + std::to_string(pt.degree) + "]" + format_coords(f, pt.coords);
  }
  return s;
}

std::vector<Coords> divisor_rows(const ReducedModel& c, const EffectiveDivisor& d, const GaloisField& target) {
  std::vector<Coords> rows;
  for (const auto& [pt, m] : d.parts) {
    if (m < 1) throw InputError("divisor multiplicities must be positive");
    const auto& small = *galois_field(c.prime(), pt.degree);
    auto t = embedding_multiplier(small, target);
    auto ex = local_expansion(c, small, pt.coords, m);
    for (int s = 0; s < m; ++s) {
      Coords base(ex.coeffs[s].size());
      for (std::size_t i = 0; i < base.size(); ++i) base[i] = embed(small, target, t, ex.coeffs[s][i]);
      for (std::uint32_t j = 0; j < pt.degree; ++j) {
        Coords y(base.size());
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = target.frobenius(base[i], j);
        rows.push_back(std::move(y));
      }
    }
  }
  return rows;
}

RRResult riemann_roch(const ReducedModel& c, const EffectiveDivisor& d, std::uint32_t extra) {
  std::uint32_t l = 1;
  for (const auto& [pt, m] : d.parts) l = lcm_u32(l, pt.degree);
  const auto& target = *galois_field(c.prime(), l * extra);
  auto rows = divisor_rows(c, d, target);
  RRResult r;
  r.degree = d.degree();
  auto rk = static_cast<int>(rank(target, Matrix<GaloisField>(rows.begin(), rows.end())));
  r.span_dim = rk - 1;
  r.ell = r.degree - r.span_dim;
  return r;
}

}  // namespace modgon
