#include "modgon/certificate.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "modgon/errors.hpp"
#include "modgon/koszul.hpp"

namespace modgon {

namespace {

const std::pair<CertKind, std::string_view> kKinds[] = {{CertKind::FpLower, "fp_lower"},
                                                        {CertKind::UpperWitness, "upper_witness"},
                                                        {CertKind::Betti22, "betti22"},
                                                        {CertKind::PointCount, "point_count"}};

Certificate base(CertKind kind, const QuadricModel& m, std::string field) {
  Certificate c;
  c.kind = kind;
  c.curve = m.delta();
  c.model = m.label;
  c.model_hash = m.hash;
  c.field = std::move(field);
  return c;
}

std::string join_shapes(const std::vector<Shape>& v) {
  if (v.empty()) return "-";
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + shape_string(v[i]);
  return s;
}

std::string join_counts(const std::vector<std::uint64_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s.empty() ? "-" : s;
}

// "3*(0:0:1) + (1:1:0)" for a sorted multiset of points.
std::string format_rational_divisor(const std::vector<IntPoint>& pts) {
  std::string s;
  for (std::size_t i = 0; i < pts.size();) {
    std::size_t j = i;
    while (j < pts.size() && pts[j] == pts[i]) ++j;
    if (!s.empty()) s += " + ";
    if (j - i > 1) s += std::to_string(j - i) + "*";
    s += "(";
    for (std::size_t k = 0; k < pts[i].size(); ++k) s += (k ? ":" : "") + std::to_string(pts[i][k]);
    s += ")";
    i = j;
  }
  return s;
}

void add_search(Certificate& c, const SearchResult& r, const ReducedModel& red) {
  c.data.emplace_back("pool", join_counts(r.pool));
  c.data.emplace_back("shapes", join_shapes(r.searched));
  c.data.emplace_back("skipped", join_shapes(r.skipped));
  c.data.emplace_back("divisors", std::to_string(r.divisors));
  c.data.emplace_back("witness", r.witness ? r.witness->to_string(red) : "-");
  c.data.emplace_back("ell", std::to_string(r.witness ? r.witness_ell : 1));
}

std::string fact_source(const Certificate& c) {
  return "certificate " + std::string(cert_kind_name(c.kind)) + " on model " + c.model + " (sha256 " +
         c.model_hash.substr(0, 16) + ")";
}

}  // namespace

std::string_view cert_kind_name(CertKind k) {
  for (const auto& [kind, name] : kKinds)
    if (kind == k) return name;
  return "?";
}

const std::string& Certificate::get(const std::string& key) const {
  for (const auto& [k, v] : data)
    if (k == key) return v;
  throw InputError(origin + ": certificate has no '" + key + "'");
}

std::int64_t Certificate::number(const std::string& key) const {
  const auto& v = get(key);
  try {
    std::size_t used = 0;
    auto n = std::stoll(v, &used);
    if (used == v.size()) return n;
  } catch (const std::exception&) {
  }
  throw InputError(origin + ": '" + key + "' is not an integer: " + v);
}

bool Certificate::certified() const {
  switch (kind) {
    case CertKind::FpLower:
      return status == "certified";
    case CertKind::UpperWitness:
      return status == "found";
    case CertKind::Betti22:
      return number("value") == 0;
    case CertKind::PointCount:
      return true;
  }
  return false;
}

std::string format_certificate(const Certificate& c) {
  std::string out;
  auto line = [&](std::string_view k, const std::string& v) { out += std::string(k) + ": " + v + "\n"; };
  line("kind", std::string(cert_kind_name(c.kind)));
  line("curve", std::to_string(c.curve.level()) + " " + c.curve.display());
  line("model", c.model);
  line("model_hash", c.model_hash);
  line("field", c.field);
  for (const auto& [k, v] : c.data) line(k, v);
  line("status", c.status);
  return out;
}

std::vector<Certificate> parse_certificates(std::string_view text, const std::string& origin) {
  std::vector<Certificate> out;
  for (const auto& rec : read_records(text, origin)) {
    Certificate c;
    c.origin = rec.where;
    bool kind = false, curve = false;
    for (const auto& [k, v] : rec.fields) {
      if (k == "kind") {
        auto it = std::find_if(std::begin(kKinds), std::end(kKinds), [&](const auto& e) { return e.second == v; });
        if (it == std::end(kKinds)) throw InputError(rec.where + ": unknown certificate kind '" + v + "'");
        c.kind = it->first;
        kind = true;
      } else if (k == "curve") {
        c.curve = parse_curve(v);
        curve = true;
      } else if (k == "model") {
        c.model = v;
      } else if (k == "model_hash") {
        c.model_hash = v;
      } else if (k == "field") {
        c.field = v;
      } else if (k == "status") {
        c.status = v;
      } else {
        for (const auto& [seen, _] : c.data)
          if (seen == k) throw InputError(rec.where + ": duplicate key '" + k + "'");
        c.data.emplace_back(k, v);
      }
    }
    if (!kind || !curve || c.model.empty() || c.model_hash.empty() || c.field.empty() || c.status.empty())
      throw InputError(rec.where + ": certificate needs kind, curve, model, model_hash, field and status");
    if (c.field != "Q") parse_gon_field(c.field);
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<Certificate> load_certificates(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read certificate file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_certificates(ss.str(), path.filename().string());
}

void check_model(const Certificate& c, const QuadricModel& m) {
  if (c.model_hash != m.hash)
    throw InputError(c.origin + ": certificate for " + c.model + " does not match model hash " + m.hash);
  if (c.curve != m.delta()) throw InputError(c.origin + ": certificate curve differs from the model's");
}

std::vector<Fact> certificate_facts(const Certificate& c) {
  std::string body;
  auto line = [&](std::string_view k, const std::string& v) { body += std::string(k) + ": " + v + "\n"; };
  const std::string curve = c.curve.key();
  auto gonality = [&](const std::string& field, std::int64_t value, const char* dir) {
    line("kind", "external_gonality");
    line("curve", curve);
    line("field", field);
    line("value", std::to_string(value));
    line("direction", dir);
  };
  switch (c.kind) {
    case CertKind::FpLower:
      if (c.status == "certified") gonality(c.field, c.number("degree") + 1, "lower");
      else if (c.status == "witness") gonality(c.field, c.number("degree"), "upper");
      break;
    case CertKind::UpperWitness:
      if (c.status == "found") gonality(c.field, c.number("degree"), "upper");
      break;
    case CertKind::Betti22:
      line("kind", "betti22");
      line("curve", curve);
      line("field", c.field);
      line("value", c.get("value"));
      break;
    case CertKind::PointCount:
      line("kind", "point_count");
      line("curve", curve);
      line("p", std::to_string(parse_gon_field(c.field).p));
      line("k", c.get("ext"));
      line("count", c.get("count"));
      break;
  }
  if (body.empty()) return {};
  line("source", fact_source(c));
  auto facts = parse_facts(body, c.origin);
  for (auto& f : facts) f.computed = true;
  return facts;
}

Certificate certify_fp_lower(const QuadricModel& m, std::uint32_t p, int d, const SearchConfig& cfg) {
  ReducedModel red(m, p);
  auto r = gonality_lower_bound(red, d, cfg);
  auto c = base(CertKind::FpLower, m, "F" + std::to_string(p));
  c.data.emplace_back("degree", std::to_string(d));
  c.data.emplace_back("pigeonhole", cfg.pigeonhole ? "on" : "off");
  c.data.emplace_back("budget", std::to_string(cfg.budget));
  add_search(c, r, red);
  c.status = r.witness ? "witness" : r.complete() ? "certified" : "incomplete";
  return c;
}

Certificate certify_fp_upper(const QuadricModel& m, std::uint32_t p, int d, int pool_degree,
                             const SearchConfig& cfg) {
  ReducedModel red(m, p);
  auto r = gonality_upper_search(red, d, pool_degree, cfg);
  auto c = base(CertKind::UpperWitness, m, "F" + std::to_string(p));
  c.data.emplace_back("degree", std::to_string(d));
  c.data.emplace_back("pool_degree", std::to_string(pool_degree));
  c.data.emplace_back("budget", std::to_string(cfg.budget));
  add_search(c, r, red);
  c.status = r.witness ? "found" : r.complete() ? "not-found" : "incomplete";
  return c;
}

Certificate certify_q_upper(const QuadricModel& m, int d, int height, std::uint64_t budget) {
  auto pool = rational_points(m, height);
  auto r = rational_upper_search(m, d, pool, budget, false);
  bool multiplicities = false;
  if (!r.witness && r.complete) {
    r = rational_upper_search(m, d, pool, budget, true);
    multiplicities = true;
  }
  auto c = base(CertKind::UpperWitness, m, "Q");
  c.data.emplace_back("degree", std::to_string(d));
  c.data.emplace_back("height", std::to_string(height));
  c.data.emplace_back("budget", std::to_string(budget));
  c.data.emplace_back("points", std::to_string(pool.size()));
  c.data.emplace_back("multiplicities", multiplicities ? "on" : "off");
  c.data.emplace_back("divisors", std::to_string(r.divisors));
  c.data.emplace_back("witness", r.witness ? format_rational_divisor(*r.witness) : "-");
  c.data.emplace_back("ell", std::to_string(r.witness ? r.witness_ell : 1));
  c.status = r.witness ? "found" : r.complete ? "not-found" : "incomplete";
  return c;
}

Certificate certify_betti(const QuadricModel& m, std::uint32_t p, std::uint32_t k) {
  auto r = betti_22(m, p, k);
  auto c = base(CertKind::Betti22, m, "F" + std::to_string(p));
  c.data.emplace_back("ext", std::to_string(k));
  c.data.emplace_back("dims", std::to_string(r.dim_source) + " " + std::to_string(r.dim_middle) + " " +
                                  std::to_string(r.dim_target));
  c.data.emplace_back("ranks", std::to_string(r.rank_d1) + " " + std::to_string(r.rank_d2));
  c.data.emplace_back("complex", r.composes_to_zero ? "ok" : "broken");
  c.data.emplace_back("value", std::to_string(r.beta22));
  if (!r.composes_to_zero) throw std::logic_error("Koszul differentials do not compose to zero on " + m.label);
  c.status = "computed";
  return c;
}

Certificate certify_count(const QuadricModel& m, std::uint32_t p, std::uint32_t k, const EnumerationLimits& lim) {
  ReducedModel red(m, p);
  auto n = count_points(red, k, lim);
  auto c = base(CertKind::PointCount, m, "F" + std::to_string(p));
  c.data.emplace_back("ext", std::to_string(k));
  c.data.emplace_back("count", std::to_string(n));
  c.status = "computed";
  return c;
}

}  // namespace modgon
