#include "modgon/gonality.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "block_plan.hpp"
#include "modgon/errors.hpp"
#include "modgon/linalg.hpp"

namespace modgon {

std::string shape_string(const Shape& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += "+";
    out += std::to_string(s[i]);
  }
  return out;
}

Shape parse_shape(const std::string& s) {
  Shape out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, '+')) {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
      throw InputError("bad divisor shape '" + s + "'");
    out.push_back(std::stoi(tok));
    if (out.back() < 1) throw InputError("bad divisor shape '" + s + "'");
  }
  if (out.empty()) throw InputError("empty divisor shape");
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

void partitions(int rest, int min_part, int max_part, Shape& cur, std::vector<Shape>& out) {
  if (rest == 0) {
    out.push_back(cur);
    return;
  }
  for (int part = min_part; part <= std::min(rest, max_part); ++part) {
    cur.push_back(part);
    partitions(rest - part, part, max_part, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<Shape> shapes(int d, int min_ones, int max_part) {
  std::vector<Shape> all, out;
  Shape cur;
  if (d >= 1) partitions(d, 1, max_part, cur, all);
  for (auto& s : all)
    if (std::count(s.begin(), s.end(), 1) >= min_ones) out.push_back(std::move(s));
  std::stable_sort(out.begin(), out.end(), [](const Shape& a, const Shape& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a < b;
  });
  return out;
}

int pigeonhole_k(std::uint64_t n, std::uint32_t q) {
  if (n == 0) return -1;
  return static_cast<int>((n - 1) / (static_cast<std::uint64_t>(q) + 1));
}

std::vector<Shape> admissible_shapes(int d, std::uint64_t n, std::uint32_t p, bool pigeonhole) {
  if (n == 0) {
    std::vector<Shape> out;
    for (int e = 1; e <= d; ++e)
      for (auto& s : shapes(e, 0, e)) out.push_back(std::move(s));
    return out;
  }
  const int k = pigeonhole ? pigeonhole_k(n, p) : 0;
  return shapes(d, k + 1, d);
}

namespace {

struct Group {
  int degree;
  int count;
};

std::vector<Group> groups_of(const Shape& s) {
  std::vector<Group> out;
  for (int part : s) {
    if (!out.empty() && out.back().degree == part) ++out.back().count;
    else out.push_back({part, 1});
  }
  return out;
}

std::uint64_t binom_capped(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
  if (k > n) return 0;
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > cap) return cap;
  }
  return static_cast<std::uint64_t>(r);
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  unsigned __int128 r = static_cast<unsigned __int128>(a) * b;
  return r > UINT64_MAX ? UINT64_MAX : static_cast<std::uint64_t>(r);
}

constexpr std::uint64_t kCap = UINT64_MAX / 4;

// Number of divisors of a shape given closed-point counts per degree.
std::uint64_t shape_size(const Shape& s, const std::vector<std::vector<ClosedPoint>>& pts) {
  std::uint64_t total = 1;
  for (const auto& gr : groups_of(s)) {
    const std::uint64_t n = pts[static_cast<std::size_t>(gr.degree - 1)].size();
    if (n == 0) return 0;
    total = sat_mul(total, binom_capped(n + gr.count - 1, gr.count, kCap));
  }
  return total;
}

// Closed points by degree 1..max_degree; stops at the first degree whose
// enumeration exceeds the limits.
std::vector<std::vector<ClosedPoint>> closed_points_by_degree(const ReducedModel& c, int max_degree,
                                                             const EnumerationLimits& lim) {
  std::vector<std::vector<ClosedPoint>> out;
  for (int e = 1; e <= max_degree; ++e) {
    std::vector<ClosedPoint> level;
    try {
      const auto& f = *galois_field(c.prime(), static_cast<std::uint32_t>(e));
      for (const auto& x : enumerate_points(c, static_cast<std::uint32_t>(e), lim)) {
        bool keep = true;
        for (int j = 1; j < e && keep; ++j) {
          Coords y(x.size());
          for (std::size_t i = 0; i < y.size(); ++i) y[i] = f.frobenius(x[i], static_cast<std::uint32_t>(j));
          if (y <= x) keep = false;
        }
        if (keep) level.push_back({static_cast<std::uint32_t>(e), x});
      }
    } catch (const BudgetExceeded&) {
      break;
    }
    out.push_back(std::move(level));
  }
  return out;
}

// Span rows of closed points of one degree inside F_{p^L}:
// rows[idx][s] holds the e conjugates of the order-s expansion coefficient.
struct DegreeRows {
  std::vector<std::vector<std::vector<Coords>>> rows;
};

DegreeRows degree_rows(const ReducedModel& c, const std::vector<ClosedPoint>& pts, int e, std::uint32_t big_k,
                       int order) {
  const auto& small = *galois_field(c.prime(), static_cast<std::uint32_t>(e));
  const auto& big = *galois_field(c.prime(), big_k);
  const auto t = embedding_multiplier(small, big);
  DegreeRows out;
  out.rows.reserve(pts.size());
  for (const auto& pt : pts) {
    auto ex = local_expansion(c, small, pt.coords, order);
    auto& per = out.rows.emplace_back();
    for (int s = 0; s < order; ++s) {
      Coords base(ex.coeffs[static_cast<std::size_t>(s)].size());
      for (std::size_t i = 0; i < base.size(); ++i) base[i] = embed(small, big, t, ex.coeffs[static_cast<std::size_t>(s)][i]);
      auto& conj = per.emplace_back();
      for (int j = 0; j < e; ++j) {
        Coords y(base.size());
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = big.frobenius(base[i], static_cast<std::uint32_t>(j));
        conj.push_back(std::move(y));
      }
    }
  }
  return out;
}

struct PreparedShape {
  Shape shape;
  std::vector<Group> groups;
  const GaloisField* field = nullptr;
  std::vector<const DegreeRows*> rows;  // per group
  std::uint64_t size = 0;
};

struct Partition {
  std::size_t shape;
  std::size_t lead;
};

struct PartitionResult {
  bool done = false;
  std::uint64_t divisors = 0;
  std::optional<std::vector<std::size_t>> witness;  // point index per slot
};

// Depth-first search over the divisors of one partition.
class PartitionSearch {
 public:
  PartitionSearch(const PreparedShape& ps, std::size_t lead, const std::atomic<std::size_t>& best,
                  std::size_t my_index, int genus)
      : ps_(ps),
        f_(*ps.field),
        lead_(lead),
        best_(best),
        my_index_(my_index),
        echelon_(f_, static_cast<std::size_t>(genus)) {
    for (std::size_t gi = 0; gi < ps.groups.size(); ++gi)
      for (int k = 0; k < ps.groups[gi].count; ++k) slot_group_.push_back(gi);
    idx_.assign(slot_group_.size(), 0);
  }

  PartitionResult run() {
    PartitionResult r;
    dfs(0, r);
    r.done = !aborted_;
    return r;
  }

 private:
  bool dfs(std::size_t k, PartitionResult& r) {
    if (k == slot_group_.size()) {
      ++r.divisors;
      return false;
    }
    if (best_.load(std::memory_order_relaxed) < my_index_) {
      aborted_ = true;
      return false;
    }
    const std::size_t gi = slot_group_[k];
    const auto& rows = ps_.rows[gi]->rows;
    std::size_t from = 0;
    std::size_t to = rows.size();
    if (k == 0) {
      from = lead_;
      to = lead_ + 1;
    } else if (slot_group_[k - 1] == gi) {
      from = idx_[k - 1];
    }
    for (std::size_t i = from; i < to; ++i) {
      idx_[k] = i;
      std::size_t mult = 0;
      for (std::size_t j = k; j-- > 0 && slot_group_[j] == gi && idx_[j] == i;) ++mult;
      const auto mark = echelon_.size();
      bool independent = true;
      for (const auto& row : rows[i][mult]) {
        if (!echelon_.push(row)) {
          independent = false;
          break;
        }
      }
      if (!independent) {
        // Complete the dependent prefix; ell can only grow.
        std::vector<std::size_t> w(idx_.begin(), idx_.begin() + static_cast<std::ptrdiff_t>(k) + 1);
        for (std::size_t j = k + 1; j < slot_group_.size(); ++j)
          w.push_back(slot_group_[j] == slot_group_[j - 1] ? w.back() : 0);
        r.witness = std::move(w);
        echelon_.truncate(mark);
        return true;
      }
      bool found = dfs(k + 1, r);
      echelon_.truncate(mark);
      if (found || aborted_) return found;
    }
    return false;
  }

  const PreparedShape& ps_;
  const GaloisField& f_;
  std::size_t lead_;
  const std::atomic<std::size_t>& best_;
  std::size_t my_index_;
  Echelon<GaloisField> echelon_;
  std::vector<std::size_t> slot_group_;
  std::vector<std::size_t> idx_;
  bool aborted_ = false;
};


// Checkpoint lines: a header naming the search, then one line per completed
// partition without a witness.
class Checkpoint {
 public:
  Checkpoint(const std::filesystem::path& path, std::string header) : path_(path), header_(std::move(header)) {
    if (path_.empty()) return;
    std::ifstream in(path_);
    std::string line;
    if (in && std::getline(in, line)) {
      if (line != header_)
        throw InputError("checkpoint " + path_.string() + " belongs to a different search: " + line);
      while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tag, shape;
        std::size_t lead;
        std::uint64_t count;
        if (ls >> tag >> shape >> lead >> count && tag == "done") done_[{shape, lead}] = count;
      }
      out_.open(path_, std::ios::app);
    } else {
      out_.open(path_);
      out_ << header_ << "\n";
      out_.flush();
    }
  }

  std::optional<std::uint64_t> lookup(const std::string& shape, std::size_t lead) const {
    auto it = done_.find({shape, lead});
    if (it == done_.end()) return std::nullopt;
    return it->second;
  }

  void record(const std::string& shape, std::size_t lead, std::uint64_t count) {
    if (path_.empty()) return;
    std::lock_guard<std::mutex> lock(mu_);
    out_ << "done " << shape << " " << lead << " " << count << "\n";
    out_.flush();
  }

 private:
  std::filesystem::path path_;
  std::string header_;
  std::map<std::pair<std::string, std::size_t>, std::uint64_t> done_;
  std::ofstream out_;
  std::mutex mu_;
};

SearchResult run_search(const ReducedModel& c, int d, const std::vector<Shape>& candidate_shapes,
                        const std::string& mode, const SearchConfig& cfg) {
  SearchResult res;
  res.degree = d;
  const int g = c.genus();
  int max_part = 0;
  for (const auto& s : candidate_shapes) max_part = std::max(max_part, s.back());
  auto pts = closed_points_by_degree(c, max_part, cfg.limits);
  for (const auto& level : pts) res.pool.push_back(level.size());

  // Budget: shapes in order while the cumulative estimate fits.
  std::vector<PreparedShape> prepared;
  bool over = false;
  for (const auto& s : candidate_shapes) {
    if (over || static_cast<std::size_t>(s.back()) > pts.size()) {
      res.skipped.push_back(s);
      continue;
    }
    PreparedShape ps;
    ps.shape = s;
    ps.groups = groups_of(s);
    ps.size = shape_size(s, pts);
    const auto cost = sat_mul(ps.size, static_cast<std::uint64_t>(d) * d * g);
    if (res.estimate + cost > cfg.budget || cost == UINT64_MAX) {
      over = true;
      res.skipped.push_back(s);
      continue;
    }
    res.estimate += cost;
    res.searched.push_back(s);
    prepared.push_back(std::move(ps));
  }

  // Expansion rows per (degree, field degree), to the largest multiplicity.
  std::map<std::pair<int, std::uint32_t>, int> orders;
  for (auto& ps : prepared) {
    std::uint32_t l = 1;
    for (const auto& gr : ps.groups) l = lcm_u32(l, static_cast<std::uint32_t>(gr.degree));
    ps.field = galois_field(c.prime(), l).get();
    for (const auto& gr : ps.groups) {
      auto& o = orders[{gr.degree, l}];
      o = std::max(o, gr.count);
    }
  }
  std::map<std::pair<int, std::uint32_t>, DegreeRows> rows;
  for (const auto& [key, order] : orders)
    rows[key] = degree_rows(c, pts[static_cast<std::size_t>(key.first - 1)], key.first, key.second, order);
  for (auto& ps : prepared) {
    const auto l = ps.field->degree();
    for (const auto& gr : ps.groups) ps.rows.push_back(&rows.at({gr.degree, l}));
  }

  std::vector<Partition> parts;
  for (std::size_t si = 0; si < prepared.size(); ++si) {
    if (prepared[si].size == 0) continue;
    const auto n = pts[static_cast<std::size_t>(prepared[si].groups.front().degree - 1)].size();
    for (std::size_t lead = 0; lead < n; ++lead) parts.push_back({si, lead});
  }

  std::ostringstream header;
  header << "modgon-search " << mode << " model=" << c.source().hash << " p=" << c.prime() << " d=" << d
         << " pigeonhole=" << (cfg.pigeonhole ? 1 : 0);
  Checkpoint ck(cfg.checkpoint, header.str());

  std::vector<PartitionResult> results(parts.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> best{parts.size()};
  std::mutex err_mu;
  std::exception_ptr error;
  auto worker = [&] {
    try {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= parts.size() || i > best.load()) return;
        const auto& ps = prepared[parts[i].shape];
        const auto name = shape_string(ps.shape);
        if (auto cached = ck.lookup(name, parts[i].lead)) {
          results[i].done = true;
          results[i].divisors = *cached;
          continue;
        }
        PartitionSearch search(ps, parts[i].lead, best, i, g);
        results[i] = search.run();
        if (results[i].witness) {
          auto cur = best.load();
          while (i < cur && !best.compare_exchange_weak(cur, i)) {
          }
        } else if (results[i].done) {
          ck.record(name, parts[i].lead, results[i].divisors);
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(err_mu);
      if (!error) error = std::current_exception();
      best.store(0);
    }
  };
  const unsigned nw = std::max(1u, cfg.workers);
  if (nw == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < nw; ++w) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (error) std::rethrow_exception(error);

  // Every partition before the first witness ran to completion.
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (!results[i].done) throw std::logic_error("search partition left unfinished");
    res.divisors += results[i].divisors;
    if (results[i].witness) {
      const auto& ps = prepared[parts[i].shape];
      std::vector<std::size_t> slot_group;
      for (std::size_t gi = 0; gi < ps.groups.size(); ++gi)
        for (int k = 0; k < ps.groups[gi].count; ++k) slot_group.push_back(gi);
      EffectiveDivisor w;
      const auto& idx = *results[i].witness;
      for (std::size_t k = 0; k < idx.size(); ++k) {
        const auto& pt = pts[static_cast<std::size_t>(ps.groups[slot_group[k]].degree - 1)][idx[k]];
        if (!w.parts.empty() && w.parts.back().first == pt) ++w.parts.back().second;
        else w.parts.emplace_back(pt, 1);
      }
      // Independent recomputation of the witness from scratch.
      auto rr = riemann_roch(c, w);
      if (rr.ell < 2) throw std::logic_error("search witness failed recomputation: " + w.to_string(c));
      res.witness = std::move(w);
      res.witness_ell = rr.ell;
      break;
    }
  }
  return res;
}

}  // namespace

SearchResult gonality_lower_bound(const ReducedModel& c, int d, const SearchConfig& cfg) {
  if (d < 1) throw InputError("target degree must be positive");
  const auto n = count_points(c, 1, cfg.limits);
  return run_search(c, d, admissible_shapes(d, n, c.prime(), cfg.pigeonhole), "lower", cfg);
}

SearchResult gonality_upper_search(const ReducedModel& c, int d, int pool_degree, const SearchConfig& cfg) {
  if (d < 1 || pool_degree < 1) throw InputError("degree and pool degree must be positive");
  return run_search(c, d, shapes(d, 0, pool_degree), "upper" + std::to_string(pool_degree), cfg);
}

SearchResult unpruned_search(const ReducedModel& c, int d, const EnumerationLimits& lim) {
  SearchResult res;
  res.degree = d;
  auto pts = closed_points_by_degree(c, d, lim);
  if (static_cast<int>(pts.size()) < d) throw BudgetExceeded("closed points of degree " + std::to_string(pts.size() + 1) + " exceed the enumeration limits");
  for (const auto& level : pts) res.pool.push_back(level.size());
  std::vector<Shape> all;
  for (int e = 1; e <= d; ++e)
    for (auto& s : shapes(e, 0, e)) all.push_back(std::move(s));
  for (const auto& s : all) {
    res.searched.push_back(s);
    const auto groups = groups_of(s);
    std::vector<std::size_t> slot_group;
    for (std::size_t gi = 0; gi < groups.size(); ++gi)
      for (int k = 0; k < groups[gi].count; ++k) slot_group.push_back(gi);
    std::vector<std::size_t> idx(slot_group.size(), 0);
    // Odometer over non-decreasing index tuples within each group.
    auto valid_start = [&] {
      for (std::size_t gi = 0; gi < groups.size(); ++gi)
        if (pts[static_cast<std::size_t>(groups[gi].degree - 1)].empty()) return false;
      return true;
    };
    if (!valid_start()) continue;
    for (;;) {
      EffectiveDivisor div;
      for (std::size_t k = 0; k < idx.size(); ++k) {
        const auto& pt = pts[static_cast<std::size_t>(groups[slot_group[k]].degree - 1)][idx[k]];
        if (!div.parts.empty() && div.parts.back().first == pt) ++div.parts.back().second;
        else div.parts.emplace_back(pt, 1);
      }
      auto rr = riemann_roch(c, div);
      if (rr.ell >= 2) {
        res.witness = std::move(div);
        res.witness_ell = rr.ell;
        return res;
      }
      ++res.divisors;
      // Advance: rightmost slot that can grow, then reset the slots after it.
      std::size_t k = idx.size();
      bool advanced = false;
      while (k-- > 0) {
        const auto n = pts[static_cast<std::size_t>(groups[slot_group[k]].degree - 1)].size();
        if (idx[k] + 1 < n) {
          ++idx[k];
          for (std::size_t j = k + 1; j < idx.size(); ++j)
            idx[j] = slot_group[j] == slot_group[j - 1] ? idx[j - 1] : 0;
          advanced = true;
          break;
        }
      }
      if (!advanced) break;
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Rational points and witnesses over Q.

std::vector<IntPoint> rational_points(const QuadricModel& m, int height) {
  if (height < 1) throw InputError("height bound must be positive");
  const int g = m.genus;
  RationalField q;
  std::vector<std::vector<detail::Term<RationalField>>> terms;
  for (const auto& quad : m.quadrics) {
    auto& row = terms.emplace_back();
    for (const auto& t : quad.terms) row.emplace_back(t.i, t.j, q.from_int(t.coeff));
  }
  auto on_model = [&](const IntPoint& x) {
    for (const auto& quad : m.quadrics) {
      __int128 v = 0;
      for (const auto& t : quad.terms) v += static_cast<__int128>(t.coeff) * x[t.i] * x[t.j];
      if (v != 0) return false;
    }
    return true;
  };
  auto primitive = [](const IntPoint& x) {
    std::int64_t gg = 0;
    for (auto v : x) gg = std::gcd(gg, v < 0 ? -v : v);
    return gg == 1;
  };
  std::set<IntPoint> found;
  IntPoint x(static_cast<std::size_t>(g), 0);
  const std::int64_t h = height;

  for (int lead = 0; lead < g; ++lead) {
    auto plan = detail::block_plan(q, terms, g, lead);
    const int s = plan.solved;
    const int first_y = s > 0 ? g - s : g;  // without a plan every coordinate is enumerated
    double prefixes = static_cast<double>(h);
    for (int i = lead + 1; i < first_y; ++i) prefixes *= static_cast<double>(2 * h + 1);
    if (prefixes > 5e7)
      throw BudgetExceeded("rational point search over height " + std::to_string(h) + " visits too many prefixes");
    std::fill(x.begin(), x.end(), 0);
    // Odometer over x[lead] in [1, h] and x[lead+1 .. first_y-1] in [-h, h].
    std::vector<int> odo;
    for (int i = lead; i < first_y; ++i) odo.push_back(i);
    x[lead] = 1;
    for (int i = lead + 1; i < first_y; ++i) x[i] = -h;

    // Integer combination coefficients, split by which y they multiply.
    struct Combo {
      std::vector<std::vector<std::pair<int, mpq_class>>> lin;
      std::vector<std::tuple<int, int, mpq_class>> rest;
    };
    std::vector<Combo> combos;
    for (const auto& cb : plan.combos) {
      Combo out;
      out.lin.resize(static_cast<std::size_t>(s));
      for (const auto& [i, j, c] : cb) {
        if (j >= first_y) out.lin[static_cast<std::size_t>(j - first_y)].emplace_back(i, c);
        else out.rest.emplace_back(i, j, c);
      }
      combos.push_back(std::move(out));
    }

    for (;;) {
      if (s == 0) {
        if (on_model(x) && primitive(x)) found.insert(x);
      } else {
        Matrix<RationalField> sys(combos.size(), Row<RationalField>(static_cast<std::size_t>(s) + 1, 0));
        for (std::size_t k = 0; k < combos.size(); ++k) {
          for (int iy = 0; iy < s; ++iy) {
            mpq_class acc = 0;
            for (const auto& [i, c] : combos[k].lin[static_cast<std::size_t>(iy)]) acc += c * x[i];
            sys[k][static_cast<std::size_t>(iy)] = acc;
          }
          mpq_class cc = 0;
          for (const auto& [i, j, c] : combos[k].rest) cc += c * x[i] * x[j];
          sys[k][static_cast<std::size_t>(s)] = -cc;
        }
        auto e = rref(q, std::move(sys));
        const bool consistent = e.pivots.empty() || e.pivots.back() < static_cast<std::size_t>(s);
        if (consistent) {
          std::vector<char> pivot(static_cast<std::size_t>(s), 0);
          for (auto pc : e.pivots) pivot[pc] = 1;
          std::vector<int> free_vars;
          for (int iy = 0; iy < s; ++iy)
            if (!pivot[static_cast<std::size_t>(iy)]) free_vars.push_back(iy);
          std::uint64_t combos_free = 1;
          for (std::size_t t = 0; t < free_vars.size(); ++t) {
            combos_free *= static_cast<std::uint64_t>(2 * h + 1);
            if (combos_free > 100'000'000) throw BudgetExceeded("rational point search: solution space too large");
          }
          std::vector<std::int64_t> fv(free_vars.size(), -h);
          for (;;) {
            bool ok = true;
            for (std::size_t t = 0; t < free_vars.size(); ++t) x[static_cast<std::size_t>(first_y + free_vars[t])] = fv[t];
            for (std::size_t r = 0; r < e.rows.size() && ok; ++r) {
              mpq_class v = e.rows[r][static_cast<std::size_t>(s)];
              for (std::size_t t = 0; t < free_vars.size(); ++t) v -= e.rows[r][static_cast<std::size_t>(free_vars[t])] * fv[t];
              if (v.get_den() != 1 || abs(v) > h) ok = false;
              else x[static_cast<std::size_t>(first_y) + e.pivots[r]] = v.get_num().get_si();
            }
            if (ok && on_model(x) && primitive(x)) found.insert(x);
            std::size_t t = 0;
            while (t < fv.size()) {
              if (fv[t] < h) {
                ++fv[t];
                break;
              }
              fv[t] = -h;
              ++t;
            }
            if (t == fv.size()) break;
          }
          for (int iy = first_y; iy < g; ++iy) x[static_cast<std::size_t>(iy)] = 0;
        }
      }
      // Advance the odometer.
      int i = first_y - 1;
      while (i > lead) {
        if (x[static_cast<std::size_t>(i)] < h) {
          ++x[static_cast<std::size_t>(i)];
          break;
        }
        x[static_cast<std::size_t>(i)] = -h;
        --i;
      }
      if (i == lead) {
        if (x[static_cast<std::size_t>(lead)] < h) ++x[static_cast<std::size_t>(lead)];
        else break;
      }
    }
  }
  std::vector<IntPoint> out(found.begin(), found.end());
  auto norm = [](const IntPoint& p) {
    std::int64_t n = 0;
    for (auto v : p) n = std::max(n, v < 0 ? -v : v);
    return n;
  };
  std::stable_sort(out.begin(), out.end(), [&](const IntPoint& a, const IntPoint& b) {
    const auto na = norm(a), nb = norm(b);
    if (na != nb) return na < nb;
    return a < b;
  });
  return out;
}

namespace {

Row<RationalField> to_row(const RationalField& q, const IntPoint& p) {
  Row<RationalField> row;
  for (auto v : p) row.push_back(q.from_int(v));
  return row;
}

// Coefficients v_0..v_{order-1} of a rational power series parametrization
// at a smooth point; same normalization as local_expansion.
Matrix<RationalField> rational_expansion(const QuadricModel& m, const IntPoint& point, int order) {
  RationalField q;
  const int g = m.genus;
  if (static_cast<int>(point.size()) != g) throw InputError("point has the wrong number of coordinates");
  int chart = 0;
  while (chart < g && point[chart] == 0) ++chart;
  if (chart == g) throw InputError("zero vector is not a projective point");
  Row<RationalField> p0;
  for (auto v : point) p0.push_back(mpq_class(v) / mpq_class(point[chart]));
  Matrix<RationalField> coeffs{p0};
  Matrix<RationalField> jac(m.quadrics.size(), Row<RationalField>(g, 0));
  for (std::size_t k = 0; k < m.quadrics.size(); ++k) {
    mpq_class value = 0;
    for (const auto& t : m.quadrics[k].terms) {
      mpq_class c(static_cast<long>(t.coeff));
      value += c * p0[t.i] * p0[t.j];
      jac[k][t.i] += c * p0[t.j];
      jac[k][t.j] += c * p0[t.i];
    }
    if (value != 0) throw InputError("rational point is not on the model " + m.label);
  }
  if (rank(q, jac) != static_cast<std::size_t>(g - 2)) throw SingularError("singular rational point on " + m.label);
  if (order == 1) return coeffs;
  auto aug = jac;
  Row<RationalField> chart_row(g, 0);
  chart_row[chart] = 1;
  aug.push_back(chart_row);
  auto ker = kernel(q, aug, static_cast<std::size_t>(g));
  if (ker.size() != 1) throw SingularError("tangent line undetermined on " + m.label);
  auto w = ker[0];
  int param = 0;
  while (w[param] == 0) ++param;
  const mpq_class lead = w[param];
  for (auto& e : w) e /= lead;
  coeffs.push_back(w);

  std::vector<int> free_cols;
  for (int i = 0; i < g; ++i)
    if (i != chart && i != param) free_cols.push_back(i);
  Matrix<RationalField> jr;
  for (const auto& row : jac) {
    Row<RationalField> r;
    for (int i : free_cols) r.push_back(row[i]);
    jr.push_back(std::move(r));
  }
  for (int n = 2; n < order; ++n) {
    Row<RationalField> rhs(m.quadrics.size(), 0);
    for (std::size_t k = 0; k < m.quadrics.size(); ++k) {
      mpq_class acc = 0;
      for (const auto& t : m.quadrics[k].terms)
        for (int s = 1; s < n; ++s) acc += mpq_class(static_cast<long>(t.coeff)) * coeffs[s][t.i] * coeffs[n - s][t.j];
      rhs[k] = -acc;
    }
    auto sol = solve(q, jr, rhs);
    if (!sol) throw SingularError("expansion lifting failed on " + m.label);
    Row<RationalField> v(g, 0);
    for (std::size_t i = 0; i < free_cols.size(); ++i) v[free_cols[i]] = (*sol)[i];
    coeffs.push_back(std::move(v));
  }
  return coeffs;
}

}  // namespace

int rational_ell(const std::vector<IntPoint>& points) {
  RationalField q;
  Matrix<RationalField> m;
  for (const auto& p : points) m.push_back(to_row(q, p));
  const auto d = static_cast<int>(points.size());
  return d - (static_cast<int>(rank(q, std::move(m))) - 1);
}

int rational_ell(const QuadricModel& m, std::vector<IntPoint> points) {
  RationalField q;
  std::sort(points.begin(), points.end());
  Matrix<RationalField> rows;
  for (std::size_t i = 0; i < points.size();) {
    std::size_t j = i;
    while (j < points.size() && points[j] == points[i]) ++j;
    for (auto& r : rational_expansion(m, points[i], static_cast<int>(j - i))) rows.push_back(std::move(r));
    i = j;
  }
  const auto d = static_cast<int>(points.size());
  return d - (static_cast<int>(rank(q, std::move(rows))) - 1);
}

RationalSearchResult rational_upper_search(const QuadricModel& m, int d, const std::vector<IntPoint>& pool,
                                           std::uint64_t budget, bool multiplicities) {
  RationalSearchResult res;
  res.degree = d;
  res.pool = pool.size();
  if (d < 1) throw InputError("target degree must be positive");
  if (pool.empty() || (!multiplicities && pool.size() < static_cast<std::size_t>(d))) return res;
  RationalField q;
  const auto g = static_cast<std::size_t>(m.genus);
  // rows[i][k]: the k-th expansion coefficient at pool point i.
  std::vector<Matrix<RationalField>> rows;
  for (const auto& p : pool) {
    if (multiplicities) rows.push_back(rational_expansion(m, p, d));
    else rows.push_back({to_row(q, p)});
  }
  const std::uint64_t per = static_cast<std::uint64_t>(d) * d * g;
  const std::uint64_t max_divisors = std::max<std::uint64_t>(1, budget / per);
  Echelon<RationalField> ech(q, g);
  std::vector<std::size_t> idx(static_cast<std::size_t>(d));
  std::optional<std::vector<std::size_t>> witness;

  // Increasing index tuples (non-decreasing with multiplicities, a repeat
  // adding the next expansion coefficient); a dependent prefix gives a
  // witness.
  auto dfs = [&](auto&& self, std::size_t k, std::size_t from) -> bool {
    if (k == idx.size()) {
      ++res.divisors;
      return false;
    }
    const std::size_t left = idx.size() - k;
    for (std::size_t i = from; i < pool.size() && (multiplicities || i + left <= pool.size()); ++i) {
      if (res.divisors >= max_divisors) {
        res.complete = false;
        return false;
      }
      idx[k] = i;
      std::size_t mult = 0;
      while (mult < k && idx[k - 1 - mult] == i) ++mult;
      const auto mark = ech.size();
      if (!ech.push(rows[i][mult])) {
        std::vector<std::size_t> w(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k) + 1);
        for (std::size_t j = multiplicities ? i : i + 1; w.size() < idx.size(); j += multiplicities ? 0 : 1)
          w.push_back(j);
        witness = std::move(w);
        ech.truncate(mark);
        return true;
      }
      const bool found = self(self, k + 1, multiplicities ? i : i + 1);
      ech.truncate(mark);
      if (found || !res.complete) return found;
    }
    return false;
  };
  dfs(dfs, 0, 0);
  if (witness) {
    std::vector<IntPoint> pts;
    for (auto i : *witness) pts.push_back(pool[i]);
    res.witness_ell = multiplicities ? rational_ell(m, pts) : rational_ell(pts);
    if (res.witness_ell < 2) throw std::logic_error("rational witness failed recomputation");
    res.witness = std::move(pts);
    res.complete = true;
  }
  return res;
}

}  // namespace modgon
