#include "modgon/bounds.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "modgon/errors.hpp"

namespace modgon {

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char ch) { return ch >= '0' && ch <= '9'; });
}

std::int64_t to_int(std::string_view s, const std::string& what) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v < 0)
    throw InputError(what + ": expected a non-negative integer, got '" + std::string(s) + "'");
  return v;
}

// "29 {±1,±12}", "71 <-1,5>" or the key form "29:1,12,17,28".
std::optional<DirichletSubgroup> try_parse_curve(std::string_view s) {
  auto t = trim(s);
  auto colon = t.find(':');
  auto space = t.find_first_of(" \t");
  if (colon != std::string::npos && (space == std::string::npos || colon < space)) {
    auto lv = t.substr(0, colon);
    if (!all_digits(lv)) return std::nullopt;
    const int level = static_cast<int>(to_int(lv, "level"));
    std::vector<std::int64_t> listed;
    std::stringstream ss(t.substr(colon + 1));
    std::string tok;
    while (std::getline(ss, tok, ',')) listed.push_back(to_int(trim(tok), "residue"));
    auto sub = subgroup_from_generators(level, listed);
    if (sub.order() != listed.size()) throw InputError("residue list '" + t + "' is not a subgroup");
    return sub;
  }
  if (space == std::string::npos) return std::nullopt;
  auto lv = t.substr(0, space);
  if (!all_digits(lv)) return std::nullopt;
  const int level = static_cast<int>(to_int(lv, "level"));
  if (level < 1) throw InputError("level must be positive");
  return parse_delta(level, trim(t.substr(space)));
}

bool parse_bool(const std::string& v, const std::string& what) {
  if (v == "true" || v == "yes") return true;
  if (v == "false" || v == "no") return false;
  throw InputError(what + ": expected true or false, got '" + v + "'");
}

const std::set<std::string> kProperties = {"hyperelliptic", "trigonal-C", "trigonal-Q", "has-rational-point"};

struct Schema {
  FactKind kind;
  const char* name;
  std::vector<std::string> required;
  std::vector<std::string> optional;
};

const std::vector<Schema>& schemas() {
  static const std::vector<Schema> s = {
      {FactKind::PointCount, "point_count", {"p", "count"}, {"k"}},
      {FactKind::KnownMap, "known_map", {"target", "degree"},
       {"target_gonality", "target_genus", "target_nonhyperelliptic"}},
      {FactKind::Classification, "classification", {"property", "value"}, {}},
      {FactKind::Betti22, "betti22", {"field", "value"}, {}},
      {FactKind::ExternalGonality, "external_gonality", {"field", "value", "direction"}, {}},
  };
  return s;
}

void validate(Fact& f, const std::string& where) {
  auto need_int = [&](const char* k) { return to_int(f.payload.at(k), where + ": " + k); };
  switch (f.kind) {
    case FactKind::PointCount: {
      if (!is_prime(need_int("p"))) throw InputError(where + ": p is not prime");
      if (!f.has("k")) f.payload["k"] = "1";
      if (need_int("k") < 1) throw InputError(where + ": k must be at least 1");
      need_int("count");
      break;
    }
    case FactKind::KnownMap: {
      if (need_int("degree") < 1) throw InputError(where + ": degree must be at least 1");
      auto& target = f.payload.at("target");
      if (target.empty()) throw InputError(where + ": empty target");
      if (f.has("target_gonality") && need_int("target_gonality") < 1)
        throw InputError(where + ": target_gonality must be at least 1");
      if (f.has("target_genus")) need_int("target_genus");
      if (f.has("target_nonhyperelliptic")) parse_bool(f.text("target_nonhyperelliptic"), where);
      if (target != "P1") {
        if (auto c = try_parse_curve(target)) target = c->key();
        else if (!f.has("target_gonality") && !f.has("target_genus"))
          throw InputError(where + ": external target '" + target + "' needs target_gonality or target_genus");
      }
      break;
    }
    case FactKind::Classification:
      if (!kProperties.count(f.text("property")))
        throw InputError(where + ": unknown property '" + f.text("property") + "'");
      parse_bool(f.text("value"), where + ": value");
      break;
    case FactKind::Betti22: {
      auto fld = parse_gon_field(f.text("field"));
      if (fld.kind == 'C') throw InputError(where + ": betti22 field must be Q or F<p>");
      need_int("value");
      break;
    }
    case FactKind::ExternalGonality: {
      parse_gon_field(f.text("field"));
      if (need_int("value") < 1) throw InputError(where + ": gonality must be at least 1");
      const auto& dir = f.text("direction");
      if (dir != "lower" && dir != "upper" && dir != "exact")
        throw InputError(where + ": direction must be lower, upper or exact");
      break;
    }
  }
}

Fact build_fact(const std::vector<std::pair<std::string, std::string>>& kv, const std::string& where) {
  std::map<std::string, std::string> rec;
  for (const auto& [k, v] : kv)
    if (!rec.emplace(k, v).second) throw InputError(where + ": duplicate key '" + k + "'");
  for (const char* k : {"kind", "curve", "source"})
    if (!rec.count(k)) throw InputError(where + ": missing '" + std::string(k) + "'");
  Fact f;
  f.origin = where;
  f.source = rec["source"];
  if (f.source.empty()) throw InputError(where + ": empty source");
  const Schema* schema = nullptr;
  for (const auto& s : schemas())
    if (rec["kind"] == s.name) schema = &s;
  if (!schema) throw InputError(where + ": unknown kind '" + rec["kind"] + "'");
  f.kind = schema->kind;

  const auto curve = rec["curve"];
  if (curve == "all") {
    f.curve.all = true;
    if (rec.count("min_genus")) f.curve.min_genus = static_cast<int>(to_int(rec["min_genus"], where + ": min_genus"));
    if (rec.count("except")) {
      std::stringstream ss(rec["except"]);
      std::string tok;
      while (std::getline(ss, tok, ';')) f.curve.except.push_back(parse_curve(tok));
      std::sort(f.curve.except.begin(), f.curve.except.end());
    }
  } else {
    if (rec.count("min_genus") || rec.count("except"))
      throw InputError(where + ": min_genus and except only apply to 'curve: all'");
    try {
      f.curve.curve = parse_curve(curve);
    } catch (const InputError& e) {
      throw InputError(where + ": curve '" + curve + "': " + e.what());
    }
  }
  for (const auto& [k, v] : rec) {
    if (k == "kind" || k == "curve" || k == "source" || k == "min_genus" || k == "except") continue;
    const bool known = std::find(schema->required.begin(), schema->required.end(), k) != schema->required.end() ||
                       std::find(schema->optional.begin(), schema->optional.end(), k) != schema->optional.end();
    if (!known) throw InputError(where + ": key '" + k + "' does not belong to " + schema->name);
    f.payload[k] = v;
  }
  for (const auto& k : schema->required)
    if (!f.payload.count(k)) throw InputError(where + ": " + schema->name + " needs '" + k + "'");
  validate(f, where);
  return f;
}

}  // namespace

std::string_view fact_kind_name(FactKind k) {
  for (const auto& s : schemas())
    if (s.kind == k) return s.name;
  return "?";
}

bool CurveSelector::matches(const DirichletSubgroup& d, int genus) const {
  if (!all) return curve && *curve == d;
  if (genus < min_genus) return false;
  return std::find(except.begin(), except.end(), d) == except.end();
}

std::string CurveSelector::canonical() const {
  if (!all) return curve->key();
  std::string out = "all";
  if (min_genus > 0) out += " min_genus=" + std::to_string(min_genus);
  for (const auto& e : except) out += " except=" + e.key();
  return out;
}

std::string Fact::canonical() const {
  std::string out(fact_kind_name(kind));
  out += "|" + curve.canonical() + "|";
  for (const auto& [k, v] : payload) out += k + "=" + v + ";";
  out += computed ? "|computed|" : "|cited|";
  out += source;
  return out;
}

std::int64_t Fact::number(const std::string& key) const { return to_int(payload.at(key), key); }
const std::string& Fact::text(const std::string& key) const { return payload.at(key); }
bool Fact::flag(const std::string& key) const { return has(key) && parse_bool(payload.at(key), key); }

std::vector<TextRecord> read_records(std::string_view text, const std::string& origin) {
  std::vector<TextRecord> out;
  TextRecord rec;
  std::size_t line_no = 0;
  auto flush = [&] {
    if (!rec.fields.empty()) out.push_back(std::move(rec));
    rec = {};
  };
  std::string line;
  std::istringstream in{std::string(text)};
  while (std::getline(in, line)) {
    ++line_no;
    auto t = trim(line);
    if (t.empty()) {
      flush();
      continue;
    }
    if (t[0] == '#') continue;
    auto colon = t.find(':');
    if (colon == std::string::npos)
      throw InputError(origin + ":" + std::to_string(line_no) + ": expected 'key: value'");
    if (rec.fields.empty()) rec.where = origin + ":" + std::to_string(line_no);
    rec.fields.emplace_back(trim(t.substr(0, colon)), trim(t.substr(colon + 1)));
  }
  flush();
  return out;
}

DirichletSubgroup parse_curve(std::string_view s) {
  auto c = try_parse_curve(s);
  if (!c) throw InputError("expected a curve as 'N Delta', got '" + std::string(s) + "'");
  return *c;
}

std::vector<Fact> parse_facts(std::string_view text, const std::string& origin) {
  std::vector<Fact> out;
  for (const auto& r : read_records(text, origin)) out.push_back(build_fact(r.fields, r.where));
  return out;
}

std::vector<Fact> load_facts(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read facts file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_facts(ss.str(), path.filename().string());
}

std::string GonField::name() const {
  if (kind == 'F') return "F" + std::to_string(p);
  return std::string(1, kind);
}

GonField parse_gon_field(std::string_view s) {
  auto t = trim(s);
  if (t == "Q" || t == "C") return {t[0], 0};
  if (t.size() > 1 && t[0] == 'F' && all_digits(std::string_view(t).substr(1))) {
    auto p = to_int(std::string_view(t).substr(1), "field");
    if (!is_prime(p)) throw InputError("field F" + std::to_string(p) + ": not a prime");
    return {'F', static_cast<std::uint32_t>(p)};
  }
  throw InputError("unknown field '" + t + "' (expected Q, C or F<p>)");
}

std::string Interval::to_string() const {
  if (lo == hi) return std::to_string(lo);
  return "[" + std::to_string(lo) + "," + (hi == kUnbounded ? std::string("-") : std::to_string(hi)) + "]";
}

Interval& CurveEntry::slot(const std::string& field) {
  if (field == "Q") return q;
  if (field == "C") return c;
  return fp.at(parse_gon_field(field).p);
}

const Interval& CurveEntry::slot(const std::string& field) const {
  return const_cast<CurveEntry*>(this)->slot(field);
}

std::optional<std::size_t> BoundLedger::find(const DirichletSubgroup& d) const {
  for (std::size_t i = 0; i < curves.size(); ++i)
    if (curves[i].delta == d) return i;
  return std::nullopt;
}

std::string BoundLedger::curve_name(std::size_t i) const {
  return std::to_string(curves[i].delta.level()) + " " + curves[i].delta.display();
}

std::vector<std::size_t> BoundLedger::final_derivations(std::size_t curve, const std::string& field) const {
  std::vector<std::size_t> out;
  for (Side side : {Side::Lo, Side::Hi})
    for (std::size_t k = derivations.size(); k-- > 0;) {
      const auto& d = derivations[k];
      if (d.curve == curve && d.field == field && d.side == side) {
        out.push_back(k);
        break;
      }
    }
  std::sort(out.begin(), out.end());
  return out;
}

std::string BoundLedger::describe(const Derivation& d) const {
  std::ostringstream os;
  os << "round " << d.round << " " << d.rule << ": " << curve_name(d.curve) << " gon_" << d.field
     << (d.side == Side::Lo ? " >= " : " <= ") << d.value;
  for (const auto& p : d.premises) os << "; " << p;
  for (auto f : d.facts) os << "; fact " << facts[f].origin << " (" << facts[f].source << ")";
  return os.str();
}

// ---------------------------------------------------------------- engine

namespace {

struct MapInfo {
  std::optional<std::size_t> target;  // ledger curve
  std::string label;
  std::int64_t degree = 1;
  std::optional<int> target_gon;  // Q-gonality of an external target
  std::optional<int> target_genus;
  bool target_nonhyperelliptic = false;
  std::optional<std::size_t> fact;  // none for lattice projections
};

struct CurveFacts {
  std::map<std::string, std::pair<bool, std::size_t>> props;  // property -> (value, fact)
  std::vector<MapInfo> maps;
  std::vector<std::size_t> counts, betti, external;
};

struct Candidate {
  std::string field;
  Side side = Side::Lo;
  int value = 0;
  std::string rule;
  std::vector<std::size_t> facts;
  std::vector<std::string> premises;
};

struct Context {
  const BoundLedger& L;
  std::vector<CurveFacts> cf;
  const std::vector<CurveEntry>* state = nullptr;

  const CurveEntry& at(std::size_t i) const { return (*state)[i]; }
  int genus(std::size_t i) const { return L.curves[i].inv.genus; }
  std::optional<std::size_t> prop(std::size_t i, const std::string& p, bool value) const {
    auto it = cf[i].props.find(p);
    if (it == cf[i].props.end() || it->second.first != value) return std::nullopt;
    return it->second.second;
  }
};

std::string bound_text(const std::string& who, const std::string& field, Side side, int v) {
  return "gon_" + field + "(" + who + ") " + (side == Side::Lo ? ">= " : "<= ") + std::to_string(v);
}

int clamp_mul(std::int64_t a, std::int64_t b) {
  const auto r = a * b;
  return r >= kUnbounded ? kUnbounded - 1 : static_cast<int>(r);
}

using RuleFn = void (*)(const Context&, std::size_t, std::vector<Candidate>&);

void rule_low_genus(const Context& cx, std::size_t i, std::vector<Candidate>& out) {
  const int g = cx.genus(i);
  auto rp = cx.prop(i, "has-rational-point", true);
  if (!rp || g > 1) return;
  out.push_back({"Q", Side::Hi, g == 0 ? 1 : 2, "low_genus", {*rp},
                 {"g=" + std::to_string(g), g == 0 ? "a genus 0 curve with a rational point is P1"
                                                   : "a rational point gives a degree 2 map"}});
}

void rule_poonen_iii(const Context& cx, std::size_t i, std::vector<Candidate>& out) {
  const int g = cx.genus(i);
  if (g < 2) return;
  const std::string why = "g=" + std::to_string(g) + ", gon <= 2g-2";
  out.push_back({"Q", Side::Hi, 2 * g - 2, "poonen.iii", {}, {why}});
  out.push_back({"C", Side::Hi, 2 * g - 2, "poonen.iii", {}, {why}});
  for (const auto& [p, iv] : cx.at(i).fp) out.push_back({"F" + std::to_string(p), Side::Hi, 2 * g - 2, "poonen.iii", {}, {why}});
}

void rule_poonen_iv(const Context& cx, std::size_t i, std::vector<Candidate>& out) {
  const int g = cx.genus(i);
  auto rp = cx.prop(i, "has-rational-point", true);
  if (g < 2 || !rp) return;
  out.push_back({"Q", Side::Hi, g, "poonen.iv", {*rp}, {"g=" + std::to_string(g) + " with a rational point"}});
}

void rule_poonen_v(const Context& cx, std::size_t i, std::vector<Candidate>& out) {
  const int g = cx.genus(i);
  out.push_back({"C", Side::Hi, (g + 3) / 2, "poonen.v", {}, {"g=" + std::to_string(g) + ", gon_C <= (g+3)/2"}});
}

std::string map_text(const Context& cx, std::size_t i, const MapInfo& m) {
  return cx.L.curve_name(i) + " -> " + (m.target ? cx.L.curve_name(*m.target) : m.label) + " of degree " +
         std::to_string(m.degree) + (m.fact ? "" : " (projection)");
}

std::vector<std::size_t> map_facts(const MapInfo& m) {
  if (m.fact) return {*m.fact};
  return {};
}

// Q-gonality of an external target: cited, or implied by genus 0 / 1 (the
// image of a rational point is rational).
std::optional<int> external_gon(const MapInfo& m) {
  if (m.target_gon) return m.target_gon;
  if (m.target_genus && *m.target_genus == 0) return 1;
  if (m.target_genus && *m.target_genus == 1) return 2;
  return std::nullopt;
}

void rule_poonen_vi(const Context& cx, std::size_t i, std::vector<Candidate>& out) {
  for (const auto& m : cx.cf[i].maps) {
    if (m.target) {
      for (const char* field : {"Q", "C"}) {
        const int h = cx.at(*m.target).slot(field).hi;
        if (h == kUnbounded) continue;
        out.push_back({field, Side::Hi, clamp_mul(m.degree, h), "poonen.vi", map_facts(m),
                       {map_text(cx, i, m), bound_text(cx.L.curve_name(*m.target), field, Side::Hi, h)}});
      }
    } else if (auto gy = external_gon(m)) {
      for (const char* field : {"Q", "C"})
        out.push_back({field, Side::Hi, clamp_mul(m.degree, *gy), "poonen.vi", map_facts(m),
                       {map_text(cx, i, m), "gon_Q(" + m.label + ") = " + std::to_string(*gy)}});
    }
  }
}

void rule_poonen_vii(const Context& cx, std::size_t i, std::vector<Candidate>& out) {
  for (const auto& m : cx.cf[i].maps) {
    if (m.target) {
      for (const char* field : {"Q", "C"}) {
        const int l = cx.at(*m.target).slot(field).lo;
        if (l <= 1) continue;
        out.push_back({field, Side::Lo, l, "poonen.vii", map_facts(m),
                       {map_text(cx, i, m), bound_text(cx.L.curve_name(*m.target), field, Side::Lo, l)}});
      }
    } else if (m.target_gon && *m.target_gon > 1) {
      out.push_back({"Q", Side::Lo, *m.target_gon, "poonen.vii", map_facts(m),
                     {map_text(cx, i, m), "gon_Q(" + m.label + ") = " + std::to_string(*m.target_gon)}});
    }
  }
}

void rule_poonen_i(const Context& cx, std::size_t i, std::vector<Candidate>& out) {
  const auto& e = cx.at(i);
  if (e.c.lo > 1) out.push_back({"Q", Side::Lo, e.c.lo, "poonen.i", {}, {bound_text("C", "C", Side::Lo, e.c.lo)}});
  if (e.q.hi != kUnbounded)
    out.push_back({"C", Side::Hi, e.q.hi, "poonen.i", {}, {bound_text("C", "Q", Side::Hi, e.q.hi)}});
}

void rule_reduction(const Context& cx, std::size_t i, std::vector<Candidate>& out) {
  const auto& e = cx.at(i);
  for (const auto& [p, iv] : e.fp) {
    const auto f = "F" + std::to_string(p);
    if (iv.lo > 1) out.push_back({"Q", Side::Lo, iv.lo, "reduction", {}, {bound_text("C", f, Side::Lo, iv.lo)}});
    if (e.q.hi != kUnbounded)
      out.push_back({f, Side::Hi, e.q.hi, "reduction", {}, {bound_text("C", "Q", Side::Hi, e.q.hi)}});
  }
}

void rule_point_count(const Context& cx, std::size_t i, std::vector<Candidate>& out) {
  for (auto fi : cx.cf[i].counts) {
    const auto& f = cx.L.facts[fi];
    const auto p = f.number("p"), k = f.number("k"), n = f.number("count");
    std::int64_t q = 1;
    for (std::int64_t j = 0; j < k; ++j) q *= p;
    if (n < 1) continue;
    const auto d = (n - 1) / (q + 1);  // largest d with n > d(q+1)
    if (d < 1) continue;
    out.push_back({"Q", Side::Lo, static_cast<int>(d + 1), f.computed ? "point_count+certificate" : "point_count", {fi},
                   {"#X(F_" + std::to_string(q) + ")=" + std::to_string(n) + " > " + std::to_string(d) + "*" +
                    std::to_string(q + 1)}});
  }
}

void rule_external(const Context& cx, std::size_t i, std::vector<Candidate>& out) {
  for (auto fi : cx.cf[i].external) {
    const auto& f = cx.L.facts[fi];
    const auto field = parse_gon_field(f.text("field")).name();
    const int v = static_cast<int>(f.number("value"));
    const auto& dir = f.text("direction");
    const std::string rule = f.computed ? "certificate" : "cited";
    if (dir != "upper") out.push_back({field, Side::Lo, v, rule, {fi}, {}});
    if (dir != "lower") out.push_back({field, Side::Hi, v, rule, {fi}, {}});
  }
}

void rule_kim_sarnak(const Context& cx, std::size_t i, std::vector<Candidate>& out) {
  const auto mu = cx.L.curves[i].inv.mu;
  std::int64_t d = 1;
  while (mu > kim_sarnak_floor(d)) ++d;
  if (d <= 1) return;
  out.push_back({"C", Side::Lo, static_cast<int>(d), "kim_sarnak", {},
                 {"index " + std::to_string(mu) + " > floor(12000*" + std::to_string(d - 1) + "/119) = " +
                  std::to_string(kim_sarnak_floor(d - 1))}});
}

// Lower bound on gon_C of a map target.
int target_gon_c_lower(const Context& cx, const MapInfo& m) {
  if (m.target) return cx.at(*m.target).c.lo;
  if (!m.target_genus) return 1;
  if (*m.target_genus >= 2 && m.target_nonhyperelliptic) return 3;
  return *m.target_genus >= 1 ? 2 : 1;
}

void rule_castelnuovo_severi(const Context& cx, std::size_t i, std::vector<Candidate>& out) {
  const int gx = cx.genus(i);
  const auto& e = cx.at(i);
  for (const auto& m : cx.cf[i].maps) {
    const std::int64_t deg = m.degree;
    if (deg < 2) continue;
    std::optional<int> gy = m.target ? std::optional<int>(cx.genus(*m.target)) : m.target_genus;
    if (!gy) continue;
    std::vector<std::string> premises{map_text(cx, i, m), "g(X)=" + std::to_string(gx) + ", g(Y)=" + std::to_string(*gy)};
    int lo = e.c.lo;
    for (std::int64_t n = e.c.lo; n <= e.c.hi && n <= 2 * gx + 2; ++n) {
      // A common factorization has degree dividing gcd(m, n); for prime m it
      // is X -> Y itself, which needs a degree n/m map on Y.
      if (std::gcd(deg, n) != 1) {
        if (!is_prime(deg)) break;
        const int need = static_cast<int>(n / deg);
        if (target_gon_c_lower(cx, m) <= need) break;
        premises.push_back("n=" + std::to_string(n) + ": no factorization, gon_C(Y) > " + std::to_string(need));
      }
      const std::int64_t bound = deg * *gy + (deg - 1) * (n - 1);
      if (gx <= bound) break;
      premises.push_back("n=" + std::to_string(n) + ": " + std::to_string(deg) + "*" + std::to_string(*gy) + "+" +
                         std::to_string(deg - 1) + "*" + std::to_string(n - 1) + " = " + std::to_string(bound) +
                         " < " + std::to_string(gx));
      lo = static_cast<int>(n + 1);
    }
    if (lo > e.c.lo) {
      premises.push_back(bound_text(cx.L.curve_name(i), "C", Side::Lo, e.c.lo));
      if (m.target) premises.push_back(bound_text(cx.L.curve_name(*m.target), "C", Side::Lo, cx.at(*m.target).c.lo));
      out.push_back({"C", Side::Lo, lo, "castelnuovo_severi", map_facts(m), premises});
    }
  }
}

void rule_tower(const Context& cx, std::size_t i, std::vector<Candidate>& out) {
  const int g = cx.genus(i);
  const auto& e = cx.at(i);
  auto rp = cx.prop(i, "has-rational-point", true);
  if (g < 10 || !rp || e.q.lo < 5 || e.c.lo != 4) return;
  out.push_back({"C", Side::Lo, 5, "tower", {*rp},
                 {"g=" + std::to_string(g) + " >= 10", bound_text("C", "Q", Side::Lo, e.q.lo),
                  bound_text("C", "C", Side::Lo, e.c.lo),
                  "a degree 4 map over C factors over Q through C' of degree d' | 4 with g(C') <= (4/d'-1)^2: "
                  "d'=1 needs g <= 9, d'=2,4 give gon_Q <= 4"}});
}

bool not_hyper_not_trigonal(const Context& cx, std::size_t i, std::vector<std::size_t>& facts) {
  auto nh = cx.prop(i, "hyperelliptic", false);
  auto nt = cx.prop(i, "trigonal-C", false);
  if (!nh || !nt) return false;
  facts.push_back(*nh);
  facts.push_back(*nt);
  return true;
}

void rule_betti(const Context& cx, std::size_t i, std::vector<Candidate>& out) {
  const int g = cx.genus(i);
  if (g < 5) return;
  for (auto fi : cx.cf[i].betti) {
    const auto& f = cx.L.facts[fi];
    if (f.number("value") != 0) continue;
    std::vector<std::size_t> facts{fi};
    if (!not_hyper_not_trigonal(cx, i, facts)) return;
    std::sort(facts.begin(), facts.end());
    out.push_back({"C", Side::Lo, 5, f.computed ? "betti+certificate" : "betti", facts,
                   {"beta22=0 over " + f.text("field"), "g=" + std::to_string(g) + " >= 5"}});
  }
}

void rule_genus6(const Context& cx, std::size_t i, std::vector<Candidate>& out) {
  if (cx.genus(i) != 6) return;
  std::vector<std::size_t> facts;
  if (!not_hyper_not_trigonal(cx, i, facts)) return;
  std::sort(facts.begin(), facts.end());
  out.push_back({"C", Side::Lo, 4, "genus6", facts, {"g=6, neither hyperelliptic nor trigonal"}});
  out.push_back({"C", Side::Hi, 4, "genus6", facts, {"g=6, gon_C <= (g+3)/2 = 4"}});
}

void rule_classification(const Context& cx, std::size_t i, std::vector<Candidate>& out) {
  const int g = cx.genus(i);
  const auto gs = "g=" + std::to_string(g);
  if (auto h = cx.prop(i, "hyperelliptic", true)) {
    out.push_back({"C", Side::Hi, 2, "classification", {*h}, {"hyperelliptic"}});
    if (auto rp = cx.prop(i, "has-rational-point", true)) {
      std::vector<std::size_t> f{*h, *rp};
      std::sort(f.begin(), f.end());
      out.push_back({"Q", Side::Hi, 2, "classification", f, {"hyperelliptic with a rational point"}});
    }
  }
  auto nh = cx.prop(i, "hyperelliptic", false);
  if (nh && g >= 2) out.push_back({"C", Side::Lo, 3, "classification", {*nh}, {gs, "not hyperelliptic"}});
  if (auto t = cx.prop(i, "trigonal-C", true)) out.push_back({"C", Side::Hi, 3, "classification", {*t}, {"trigonal over C"}});
  if (auto nt = cx.prop(i, "trigonal-C", false); nt && nh && g >= 2) {
    std::vector<std::size_t> f{*nh, *nt};
    std::sort(f.begin(), f.end());
    out.push_back({"C", Side::Lo, 4, "classification", f, {gs, "neither hyperelliptic nor trigonal over C"}});
  }
  if (auto t = cx.prop(i, "trigonal-Q", true)) out.push_back({"Q", Side::Hi, 3, "classification", {*t}, {"trigonal over Q"}});
  if (auto nt = cx.prop(i, "trigonal-Q", false); nt && nh && g >= 2) {
    std::vector<std::size_t> f{*nh, *nt};
    std::sort(f.begin(), f.end());
    out.push_back({"Q", Side::Lo, 4, "classification", f, {gs, "not hyperelliptic, not trigonal over Q"}});
  }
}

const std::vector<std::pair<std::string, RuleFn>>& rule_table() {
  static const std::vector<std::pair<std::string, RuleFn>> t = {
      {"low_genus", rule_low_genus},
      {"poonen.i", rule_poonen_i},
      {"poonen.iii", rule_poonen_iii},
      {"poonen.iv", rule_poonen_iv},
      {"poonen.v", rule_poonen_v},
      {"poonen.vi", rule_poonen_vi},
      {"poonen.vii", rule_poonen_vii},
      {"reduction", rule_reduction},
      {"point_count", rule_point_count},
      {"external", rule_external},
      {"kim_sarnak", rule_kim_sarnak},
      {"castelnuovo_severi", rule_castelnuovo_severi},
      {"tower", rule_tower},
      {"betti", rule_betti},
      {"genus6", rule_genus6},
      {"classification", rule_classification},
  };
  return t;
}

RuleFn rule_for_derivation(const std::string& id) {
  // Derivation ids name the rule and, for fact-driven rules, whether the
  // fact was cited or computed.
  auto name = id;
  if (name.ends_with("+certificate")) name.resize(name.size() - std::string_view("+certificate").size());
  if (name == "cited" || name == "certificate") name = "external";
  for (const auto& [n, fn] : rule_table())
    if (n == name) return fn;
  throw std::logic_error("unknown rule id '" + id + "'");
}

Context make_context(const BoundLedger& L) {
  Context cx{L, std::vector<CurveFacts>(L.curves.size()), &L.curves};
  for (std::size_t fi = 0; fi < L.facts.size(); ++fi) {
    const auto& f = L.facts[fi];
    std::vector<std::size_t> targets;
    if (f.curve.all) {
      for (std::size_t i = 0; i < L.curves.size(); ++i)
        if (f.curve.matches(L.curves[i].delta, L.curves[i].inv.genus)) targets.push_back(i);
    } else {
      const auto& d = *f.curve.curve;
      auto idx = L.find(d);
      if (!idx) {
        if (std::find(L.levels.begin(), L.levels.end(), d.level()) != L.levels.end())
          throw InputError(f.origin + ": " + std::to_string(d.level()) + " " + d.display() +
                           " is not an intermediate curve at its level");
        continue;  // level not loaded
      }
      targets.push_back(*idx);
    }
    for (auto i : targets) {
      const auto level = L.curves[i].delta.level();
      auto& c = cx.cf[i];
      auto check_prime = [&](std::uint32_t p) {
        if (level % static_cast<int>(p) == 0)
          throw InputError(f.origin + ": p=" + std::to_string(p) + " divides the level " + std::to_string(level));
      };
      switch (f.kind) {
        case FactKind::Classification: {
          const auto& prop = f.text("property");
          const bool value = f.flag("value");
          auto [it, fresh] = c.props.emplace(prop, std::make_pair(value, fi));
          if (!fresh && it->second.first != value)
            throw InputError(f.origin + " and " + L.facts[it->second.second].origin + " disagree on " + prop + " for " +
                             L.curve_name(i));
          if (!fresh) it->second.second = std::min(it->second.second, fi);
          break;
        }
        case FactKind::PointCount:
          check_prime(static_cast<std::uint32_t>(f.number("p")));
          c.counts.push_back(fi);
          break;
        case FactKind::Betti22: {
          auto fld = parse_gon_field(f.text("field"));
          if (fld.kind == 'F') check_prime(fld.p);
          c.betti.push_back(fi);
          break;
        }
        case FactKind::ExternalGonality: {
          auto fld = parse_gon_field(f.text("field"));
          if (fld.kind == 'F') check_prime(fld.p);
          c.external.push_back(fi);
          break;
        }
        case FactKind::KnownMap: {
          MapInfo m;
          m.degree = f.number("degree");
          m.fact = fi;
          m.label = f.text("target");
          if (f.has("target_gonality")) m.target_gon = static_cast<int>(f.number("target_gonality"));
          if (f.has("target_genus")) m.target_genus = static_cast<int>(f.number("target_genus"));
          m.target_nonhyperelliptic = f.flag("target_nonhyperelliptic");
          if (m.label == "P1") {
            m.target_genus = 0;
            m.target_gon = 1;
          } else if (auto t = try_parse_curve(m.label)) {
            m.label = std::to_string(t->level()) + " " + t->display();
            if (auto ti = L.find(*t)) {
              if (m.target_genus && *m.target_genus != L.curves[*ti].inv.genus)
                throw InputError(f.origin + ": target genus " + std::to_string(*m.target_genus) + " but " +
                                 L.curve_name(*ti) + " has genus " + std::to_string(L.curves[*ti].inv.genus));
              m.target = ti;
            } else if (!m.target_gon && !m.target_genus) {
              break;  // target level not loaded and nothing cited about it
            }
          }
          c.maps.push_back(std::move(m));
          break;
        }
      }
    }
  }
  for (const auto& [small, large] : L.edges) {
    MapInfo m;
    m.target = large;
    m.degree = projection_degree(L.curves[small].delta, L.curves[large].delta);
    cx.cf[small].maps.push_back(m);
  }
  return cx;
}

bool stronger(Side side, int a, int b) { return side == Side::Lo ? a > b : a < b; }

bool improves(const CurveEntry& e, const Candidate& c) {
  const auto& iv = e.slot(c.field);
  return c.side == Side::Lo ? c.value > iv.lo : c.value < iv.hi;
}

bool better(const Candidate& a, const Candidate& b) {
  if (a.value != b.value) return stronger(a.side, a.value, b.value);
  return std::tie(a.rule, a.facts, a.premises) < std::tie(b.rule, b.facts, b.premises);
}

void apply(CurveEntry& e, const Derivation& d) {
  auto& iv = e.slot(d.field);
  if (d.side == Side::Lo) iv.lo = std::max(iv.lo, d.value);
  else iv.hi = std::min(iv.hi, d.value);
}

void check_clashes(const BoundLedger& L, std::size_t from) {
  for (std::size_t k = from; k < L.derivations.size(); ++k) {
    const auto& d = L.derivations[k];
    const auto& iv = L.curves[d.curve].slot(d.field);
    if (iv.lo <= iv.hi) continue;
    std::ostringstream os;
    os << "inconsistent bounds for " << L.curve_name(d.curve) << " gon_" << d.field << ": " << iv.lo << " > "
       << iv.hi;
    for (auto j : L.final_derivations(d.curve, d.field)) os << "\n  " << L.describe(L.derivations[j]);
    throw InconsistentFacts(os.str());
  }
}

void add_fp_slots(BoundLedger& L) {
  for (const auto& f : L.facts) {
    if (f.kind != FactKind::ExternalGonality) continue;
    auto fld = parse_gon_field(f.text("field"));
    if (fld.kind != 'F') continue;
    for (auto& e : L.curves)
      if (f.curve.matches(e.delta, e.inv.genus) && e.delta.level() % static_cast<int>(fld.p) != 0)
        e.fp.emplace(fld.p, Interval{});
  }
}

}  // namespace

const std::vector<std::string>& rule_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v;
    for (const auto& [n, fn] : rule_table()) v.push_back(n);
    return v;
  }();
  return ids;
}

BoundLedger initial_ledger(const std::vector<int>& levels, std::vector<Fact> facts, unsigned workers) {
  BoundLedger L;
  L.levels = levels;
  std::sort(L.levels.begin(), L.levels.end());
  L.levels.erase(std::unique(L.levels.begin(), L.levels.end()), L.levels.end());
  for (int n : L.levels) {
    auto ds = enumerate_deltas(n, true);
    const auto base = L.curves.size();
    for (auto& d : ds) L.curves.push_back({d, {}, {}, {}, {}});
    for (auto [a, b] : lattice_edges(ds)) L.edges.emplace_back(base + a, base + b);
  }
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next++) < L.curves.size();) L.curves[i].inv = invariants(L.curves[i].delta);
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < std::max(1u, workers); ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  std::vector<std::pair<std::string, Fact>> keyed;
  for (auto& f : facts) keyed.emplace_back(f.canonical(), std::move(f));
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second.origin < b.second.origin;
  });
  for (auto& [k, f] : keyed)
    if (L.facts.empty() || L.facts.back().canonical() != k) L.facts.push_back(std::move(f));
  add_fp_slots(L);
  return L;
}

void propagate(BoundLedger& L, const PropagateOptions& opt) {
  auto cx = make_context(L);
  std::vector<std::size_t> rule_order(rule_table().size());
  std::iota(rule_order.begin(), rule_order.end(), 0);
  if (!opt.rule_order.empty()) {
    rule_order.clear();
    for (const auto& id : opt.rule_order) {
      auto it = std::find(rule_ids().begin(), rule_ids().end(), id);
      if (it == rule_ids().end()) throw InputError("unknown rule '" + id + "'");
      rule_order.push_back(static_cast<std::size_t>(it - rule_ids().begin()));
    }
  }
  std::vector<std::size_t> curve_order = opt.curve_order;
  if (curve_order.empty()) {
    curve_order.resize(L.curves.size());
    std::iota(curve_order.begin(), curve_order.end(), 0);
  }

  std::size_t round = L.derivations.empty() ? 0 : L.derivations.back().round;
  for (std::size_t iter = 0;; ++iter) {
    if (iter >= opt.max_rounds) throw std::logic_error("propagation did not reach a fixed point");
    const auto snapshot = L.curves;
    cx.state = &snapshot;
    std::map<std::tuple<std::size_t, std::string, Side>, Candidate> best;
    std::vector<Candidate> cands;
    for (auto r : rule_order)
      for (auto i : curve_order) {
        cands.clear();
        rule_table()[r].second(cx, i, cands);
        for (auto& c : cands) {
          if (!improves(snapshot[i], c)) continue;
          auto key = std::make_tuple(i, c.field, c.side);
          auto it = best.find(key);
          if (it == best.end()) best.emplace(key, std::move(c));
          else if (better(c, it->second)) it->second = std::move(c);
        }
      }
    if (best.empty()) break;
    ++round;
    const auto from = L.derivations.size();
    for (auto& [key, c] : best) {
      Derivation d{round, c.rule, std::get<0>(key), c.field, c.side, c.value, c.facts, c.premises};
      apply(L.curves[d.curve], d);
      L.derivations.push_back(std::move(d));
    }
    check_clashes(L, from);
  }
  cx.state = &L.curves;
  if (auto v = coherence_violations(L); !v.empty()) throw std::logic_error("incoherent ledger: " + v.front());
}

BoundLedger propagate(const std::vector<int>& levels, std::vector<Fact> facts, const PropagateOptions& opt) {
  auto L = initial_ledger(levels, std::move(facts), opt.workers);
  propagate(L, opt);
  return L;
}

BoundLedger replay(const std::vector<int>& levels, const std::vector<Fact>& facts,
                   const std::vector<Derivation>& derivations) {
  auto L = initial_ledger(levels, facts);
  auto cx = make_context(L);
  std::size_t k = 0;
  while (k < derivations.size()) {
    const auto round = derivations[k].round;
    const auto snapshot = L.curves;
    cx.state = &snapshot;
    const auto from = L.derivations.size();
    for (; k < derivations.size() && derivations[k].round == round; ++k) {
      const auto& d = derivations[k];
      if (d.curve >= L.curves.size()) throw std::logic_error("derivation names an unknown curve");
      std::vector<Candidate> cands;
      rule_for_derivation(d.rule)(cx, d.curve, cands);
      const bool found = std::any_of(cands.begin(), cands.end(), [&](const Candidate& c) {
        return c.rule == d.rule && c.field == d.field && c.side == d.side && c.value == d.value &&
               c.facts == d.facts && c.premises == d.premises;
      });
      if (!found) throw std::logic_error("derivation not reproduced: " + L.describe(d));
      const auto& iv = snapshot[d.curve].slot(d.field);
      if (!(d.side == Side::Lo ? d.value > iv.lo : d.value < iv.hi))
        throw std::logic_error("derivation does not narrow its interval: " + L.describe(d));
      apply(L.curves[d.curve], d);
      L.derivations.push_back(d);
    }
    check_clashes(L, from);
  }
  return L;
}

std::vector<std::string> coherence_violations(const BoundLedger& L) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < L.curves.size(); ++i) {
    const auto& e = L.curves[i];
    const auto name = L.curve_name(i);
    if (e.q.lo > e.q.hi || e.c.lo > e.c.hi) out.push_back(name + ": empty interval");
    if (e.c.lo > e.q.lo) out.push_back(name + ": gon_C lower bound above gon_Q lower bound");
    if (e.c.hi > e.q.hi) out.push_back(name + ": gon_C upper bound above gon_Q upper bound");
    for (const auto& [p, iv] : e.fp) {
      if (iv.lo > iv.hi) out.push_back(name + ": empty F" + std::to_string(p) + " interval");
      if (iv.lo > e.q.lo) out.push_back(name + ": F" + std::to_string(p) + " lower bound above gon_Q lower bound");
    }
  }
  for (const auto& [s, l] : L.edges) {
    if (L.curves[s].q.lo < L.curves[l].q.lo || L.curves[s].c.lo < L.curves[l].c.lo)
      out.push_back(L.curve_name(s) + ": lower bound below that of its image " + L.curve_name(l));
  }
  return out;
}

std::vector<std::string> ledger_differences(const BoundLedger& a, const BoundLedger& b) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < a.curves.size(); ++i) {
    auto j = b.find(a.curves[i].delta);
    if (!j) {
      out.push_back(a.curve_name(i) + ": missing from the second ledger");
      continue;
    }
    const auto& x = a.curves[i];
    const auto& y = b.curves[*j];
    if (x.q != y.q) out.push_back(a.curve_name(i) + ": gon_Q " + x.q.to_string() + " -> " + y.q.to_string());
    if (x.c != y.c) out.push_back(a.curve_name(i) + ": gon_C " + x.c.to_string() + " -> " + y.c.to_string());
  }
  return out;
}

}  // namespace modgon
