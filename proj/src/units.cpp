#include "modgon/units.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <set>
#include <sstream>

#include "modgon/errors.hpp"

namespace modgon {

std::int64_t gcd(std::int64_t a, std::int64_t b) { return std::gcd(a, b); }

std::int64_t pow_mod(std::int64_t base, std::int64_t exp, std::int64_t mod) {
  if (mod == 1) return 0;
  std::int64_t b = ((base % mod) + mod) % mod;
  std::int64_t r = 1;
  while (exp > 0) {
    if (exp & 1) r = r * b % mod;
    b = b * b % mod;
    exp >>= 1;
  }
  return r;
}

std::vector<std::int64_t> prime_divisors(std::int64_t n) {
  std::vector<std::int64_t> out;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      out.push_back(p);
      while (n % p == 0) n /= p;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t p = 2; p * p <= n; ++p)
    if (n % p == 0) return false;
  return true;
}

std::int64_t euler_phi(std::int64_t n) {
  std::int64_t r = n;
  for (auto p : prime_divisors(n)) r = r / p * (p - 1);
  return r;
}

namespace {

std::vector<int> units_mod(int n) {
  std::vector<int> out;
  if (n == 1) return {0};
  for (int x = 1; x < n; ++x)
    if (std::gcd(x, n) == 1) out.push_back(x);
  return out;
}

// Closure of a set of residues under multiplication; always includes 1.
std::vector<int> closure(int n, const std::vector<int>& gens) {
  std::vector<char> in(n, 0);
  std::vector<int> elems{1 % n};
  in[1 % n] = 1;
  for (std::size_t i = 0; i < elems.size(); ++i) {
    for (int g : gens) {
      int y = static_cast<int>(static_cast<std::int64_t>(elems[i]) * g % n);
      if (!in[y]) {
        in[y] = 1;
        elems.push_back(y);
      }
    }
  }
  std::sort(elems.begin(), elems.end());
  return elems;
}

std::string to_string_signed(int level, int x) {
  return (level > 2 && x == level - 1) ? "-1" : std::to_string(x);
}

}  // namespace

UnitGroup::UnitGroup(int level) : level_(level) {
  if (level < 1) throw InputError("level must be positive");
  elements_ = units_mod(level);
  if (elements_.size() == 1) return;

  std::vector<char> span(level, 0);
  std::vector<int> span_list{1};
  span[1] = 1;
  std::vector<CyclicFactor> picked;
  while (span_list.size() < elements_.size()) {
    int best = -1, best_ord = 0;
    bool best_is_minus_one = false;
    for (int x : elements_) {
      if (span[x]) continue;
      // Quotient order: first k with x^k in span.
      int k = 1;
      std::int64_t y = x;
      while (!span[y]) {
        y = y * x % level;
        ++k;
      }
      if (k != order_of(x)) continue;
      bool m1 = (x == level - 1);
      if (k > best_ord || (k == best_ord && m1 && !best_is_minus_one)) {
        best = x;
        best_ord = k;
        best_is_minus_one = m1;
      }
    }
    if (best < 0) throw std::logic_error("unit group decomposition failed");
    picked.push_back({best_ord, best});
    std::vector<int> next;
    for (int s : span_list) {
      std::int64_t y = s;
      for (int j = 0; j < best_ord; ++j) {
        next.push_back(static_cast<int>(y));
        span[y] = 1;
        y = y * best % level;
      }
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    span_list = std::move(next);
  }
  std::reverse(picked.begin(), picked.end());
  factors_ = std::move(picked);
}

int UnitGroup::order_of(int x) const {
  if (level_ == 1) return 1;
  int k = 1;
  std::int64_t y = x % level_;
  while (y != 1) {
    y = y * x % level_;
    ++k;
  }
  return k;
}

std::vector<int> UnitGroup::generators() const {
  std::vector<int> g;
  for (const auto& f : factors_) g.push_back(f.generator);
  return g;
}

std::string UnitGroup::structure_string() const {
  if (factors_.empty()) return "C1";
  std::string s;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (i) s += "xC";
    else s += "C";
    s += std::to_string(factors_[i].order);
  }
  return s;
}

std::string UnitGroup::generators_string() const {
  auto g = generators();
  std::sort(g.begin(), g.end(), [&](int a, int b) {
    bool am = a == level_ - 1, bm = b == level_ - 1;
    if (am != bm) return am;
    return a < b;
  });
  std::string s;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i) s += ",";
    s += to_string_signed(level_, g[i]);
  }
  return s;
}

DirichletSubgroup::DirichletSubgroup(int level, std::vector<int> sorted_elements)
    : level_(level), elements_(std::move(sorted_elements)) {}

bool DirichletSubgroup::contains(int x) const {
  x = ((x % level_) + level_) % level_;
  return std::binary_search(elements_.begin(), elements_.end(), x);
}

bool DirichletSubgroup::is_subgroup_of(const DirichletSubgroup& other) const {
  if (level_ != other.level_) return false;
  return std::includes(other.elements_.begin(), other.elements_.end(), elements_.begin(),
                       elements_.end());
}

bool DirichletSubgroup::is_full() const {
  return static_cast<std::int64_t>(elements_.size()) == euler_phi(level_);
}

std::vector<int> DirichletSubgroup::display_generators() const {
  std::vector<int> gens;
  if (level_ <= 2) return gens;
  gens.push_back(level_ - 1);
  auto span = closure(level_, gens);
  for (int x : elements_) {
    if (span.size() == elements_.size()) break;
    if (std::binary_search(span.begin(), span.end(), x)) continue;
    gens.push_back(x);
    span = closure(level_, gens);
  }
  return gens;
}

std::string DirichletSubgroup::display() const {
  std::ostringstream os;
  if (level_ <= 2) return "{1}";
  if (elements_.size() <= 10) {
    os << "{";
    bool first = true;
    for (int x : elements_) {
      if (2 * x > level_) continue;
      if (!first) os << ",";
      os << "±" << x;
      first = false;
    }
    os << "}";
  } else {
    os << "<";
    auto g = display_generators();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (i) os << ",";
      os << to_string_signed(level_, g[i]);
    }
    os << ">";
  }
  return os.str();
}

std::string DirichletSubgroup::key() const {
  std::string s = std::to_string(level_) + ":";
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(elements_[i]);
  }
  return s;
}

std::strong_ordering operator<=>(const DirichletSubgroup& a, const DirichletSubgroup& b) {
  if (auto c = a.level_ <=> b.level_; c != 0) return c;
  if (auto c = a.elements_.size() <=> b.elements_.size(); c != 0) return c;
  return a.elements_ <=> b.elements_;
}

DirichletSubgroup subgroup_from_generators(int level, std::span<const std::int64_t> gens) {
  if (level < 1) throw InputError("level must be positive");
  std::vector<int> g;
  for (auto x : gens) {
    std::int64_t r = ((x % level) + level) % level;
    if (std::gcd(r, static_cast<std::int64_t>(level)) != 1 && level > 1)
      throw InputError("generator " + std::to_string(x) + " is not coprime to " +
                       std::to_string(level));
    g.push_back(static_cast<int>(r));
  }
  g.push_back(level > 1 ? level - 1 : 0);
  if (level == 1) return DirichletSubgroup(1, {0});
  return DirichletSubgroup(level, closure(level, g));
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool parse_int(std::string_view s, std::int64_t& out) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

// "-1", "4", "2^13", "-2^3". Anything else is malformed.
std::int64_t parse_generator_token(int level, std::string_view tok) {
  auto caret = tok.find('^');
  std::int64_t base = 0, exp = 1;
  if (caret == std::string_view::npos) {
    if (!parse_int(tok, base))
      throw InputError("malformed generator token '" + std::string(tok) + "'");
  } else {
    if (!parse_int(tok.substr(0, caret), base) || !parse_int(tok.substr(caret + 1), exp) ||
        exp < 0 || tok.substr(caret + 1).starts_with('-') ||
        tok.substr(caret + 1).starts_with('+'))
      throw InputError("malformed generator token '" + std::string(tok) + "'");
  }
  return pow_mod(base, exp, level);
}

}  // namespace

DirichletSubgroup parse_delta(int level, std::string_view text) {
  text = trim(text);
  if (text.empty()) throw InputError("empty subgroup description");
  if (text == "full") {
    std::vector<std::int64_t> all;
    for (int x : units_mod(level)) all.push_back(x);
    return subgroup_from_generators(level, all);
  }
  if (text == "trivial") return subgroup_from_generators(level, {});

  if (text.front() == '{') {
    if (text.back() != '}') throw InputError("unterminated set '" + std::string(text) + "'");
    std::vector<std::int64_t> listed;
    for (auto tok : split(text.substr(1, text.size() - 2), ',')) {
      bool pm = false;
      if (tok.starts_with("±")) {
        tok.remove_prefix(std::string_view("±").size());
        pm = true;
      } else if (tok.starts_with("+-")) {
        tok.remove_prefix(2);
        pm = true;
      }
      std::int64_t v = 0;
      if (!parse_int(tok, v))
        throw InputError("malformed set element '" + std::string(tok) + "'");
      if (std::gcd(((v % level) + level) % level, static_cast<std::int64_t>(level)) != 1)
        throw InputError("set element " + std::to_string(v) + " is not a unit mod " +
                         std::to_string(level));
      listed.push_back(v);
      if (pm) listed.push_back(-v);
    }
    std::set<int> as_set;
    for (auto v : listed) as_set.insert(static_cast<int>(((v % level) + level) % level));
    auto sub = subgroup_from_generators(level, listed);
    std::vector<int> mine(as_set.begin(), as_set.end());
    if (mine != sub.elements())
      throw InputError("set " + std::string(text) + " is not closed under multiplication mod " +
                       std::to_string(level));
    return sub;
  }

  std::string_view body = text;
  if (text.front() == '<') {
    if (text.back() != '>') throw InputError("unterminated generator list '" + std::string(text) + "'");
    body = text.substr(1, text.size() - 2);
  }
  std::vector<std::int64_t> gens;
  for (auto tok : split(body, ',')) gens.push_back(parse_generator_token(level, tok));
  return subgroup_from_generators(level, gens);
}

std::vector<DirichletSubgroup> enumerate_deltas(int level, bool proper_only) {
  if (level < 1) throw InputError("level must be positive");
  std::set<std::vector<int>> found;
  auto minus = subgroup_from_generators(level, {});
  std::vector<std::vector<int>> work;
  for (int x : units_mod(level)) {
    std::int64_t g = x;
    auto s = subgroup_from_generators(level, std::span<const std::int64_t>(&g, 1));
    if (found.insert(s.elements()).second) work.push_back(s.elements());
  }
  // Close under pairwise joins.
  for (std::size_t i = 0; i < work.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      std::vector<std::int64_t> gens(work[i].begin(), work[i].end());
      gens.insert(gens.end(), work[j].begin(), work[j].end());
      auto s = subgroup_from_generators(level, gens);
      if (found.insert(s.elements()).second) work.push_back(s.elements());
    }
  }
  std::vector<DirichletSubgroup> out;
  auto phi = level == 1 ? 1 : euler_phi(level);
  for (const auto& e : found) {
    DirichletSubgroup d(level, e);
    if (proper_only && (d == minus || static_cast<std::int64_t>(e.size()) == phi)) continue;
    out.push_back(std::move(d));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> lattice_edges(
    std::span<const DirichletSubgroup> deltas) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  if (deltas.empty()) return edges;
  for (const auto& d : deltas)
    if (d.level() != deltas.front().level())
      throw InputError("lattice_edges: subgroups at mixed levels");
  const std::size_t n = deltas.size();
  auto below = [&](std::size_t a, std::size_t b) {
    return a != b && deltas[a].order() < deltas[b].order() && deltas[a].is_subgroup_of(deltas[b]);
  };
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (!below(a, b)) continue;
      bool covered = true;
      for (std::size_t c = 0; c < n && covered; ++c)
        if (below(a, c) && below(c, b)) covered = false;
      if (covered) edges.emplace_back(a, b);
    }
  }
  return edges;
}

std::vector<int> parse_level_list(std::string_view text) {
  std::set<int> out;
  for (auto tok : split(text, ',')) {
    if (tok.empty()) continue;
    auto dash = tok.find('-', 1);
    std::int64_t a = 0, b = 0;
    if (dash == std::string_view::npos) {
      if (!parse_int(tok, a)) throw InputError("malformed level '" + std::string(tok) + "'");
      b = a;
    } else if (!parse_int(trim(tok.substr(0, dash)), a) || !parse_int(trim(tok.substr(dash + 1)), b)) {
      throw InputError("malformed level range '" + std::string(tok) + "'");
    }
    if (a < 1 || b < a) throw InputError("empty or invalid level range '" + std::string(tok) + "'");
    for (auto n = a; n <= b; ++n) out.insert(static_cast<int>(n));
  }
  return {out.begin(), out.end()};
}

}  // namespace modgon
