#include <doctest.h>

#include <set>

#include "fixtures.hpp"
#include "modgon/bounds.hpp"
#include "modgon/certificate.hpp"
#include "modgon/congruence.hpp"
#include "modgon/report.hpp"

using namespace modgon;

namespace {

using Table = std::vector<std::map<std::string, std::string>>;

// Tab-separated with one header line and `#` comments.
Table read_tsv(const std::string& name) {
  std::ifstream in(fixtures::data_dir() / "golden" / name);
  REQUIRE(in);
  Table out;
  std::vector<std::string> header;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, '\t')) cells.push_back(c);
    if (header.empty()) {
      header = cells;
      continue;
    }
    REQUIRE(cells.size() == header.size());
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < cells.size(); ++i) row[header[i]] = cells[i];
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<int> levels_of(const Table& t) {
  std::set<int> s;
  for (const auto& r : t) s.insert(std::stoi(r.at("N")));
  return {s.begin(), s.end()};
}

const CurveEntry& entry(const BoundLedger& L, const std::map<std::string, std::string>& row) {
  auto i = L.find(parse_delta(std::stoi(row.at("N")), row.at("delta")));
  REQUIRE(i.has_value());
  return L.curves[*i];
}

std::vector<int> range(int a, int b) {
  std::vector<int> v;
  for (int n = a; n <= b; ++n) v.push_back(n);
  return v;
}

// One full pass: the report, its derivations and the comparison.
std::string full_report(unsigned workers) {
  const auto levels = range(1, 40);
  PropagateOptions opt;
  opt.workers = workers;
  auto L = propagate(levels,
                     load_inputs({fixtures::data_dir() / "facts", fixtures::data_dir() / "certificates"},
                                 fixtures::data_dir() / "models"),
                     opt);
  auto rows = report_rows(L);
  std::string out = format_rows(rows, Format::Text) + format_rows(rows, Format::JsonLines);
  for (const auto& d : L.derivations) out += L.describe(d) + "\n";
  out += format_comparison(compare_golden(rows, load_golden(fixtures::data_dir() / "golden" / "table1.tsv"), levels));
  return out;
}

std::string some_certificates(unsigned workers) {
  SearchConfig cfg;
  cfg.workers = workers;
  auto g5 = fixtures::model("x32_15");
  auto g8 = fixtures::model("x29_12");
  return format_certificate(certify_count(g8, 2, 2)) + format_certificate(certify_fp_lower(g5, 3, 3, cfg)) +
         format_certificate(certify_fp_lower(g5, 3, 4, cfg)) + format_certificate(certify_fp_upper(g5, 3, 4, 2, cfg)) +
         format_certificate(certify_q_upper(fixtures::model("x34_9_13_15"), 4, 10)) +
         format_certificate(certify_betti(g8, 2));
}

}  // namespace

TEST_CASE("summary table genera") {
  const auto golden = load_golden(fixtures::data_dir() / "golden" / "table1.tsv");
  REQUIRE(golden.size() == 39);
  for (const auto& r : golden) {
    INFO(r.anchor << " " << r.level << " " << r.delta);
    CHECK(invariants(parse_delta(r.level, r.delta)).genus == r.genus);
  }
  CHECK(invariants(parse_delta(30, "{±1,±11}")).genus == 5);
  CHECK(invariants(parse_delta(29, "{±1,±12}")).genus == 8);
  CHECK(invariants(parse_delta(35, "{±1,±6}")).genus == 13);
}

TEST_CASE("Kim-Sarnak table indices") {
  // Printed cells no subgroup can have, with the computed value.
  const std::map<std::string, std::int64_t> slips = {{"ks.r15", 1768}};
  const auto table = read_tsv("kim_sarnak.tsv");
  REQUIRE(table.size() == 25);
  std::size_t exact = 0;
  for (const auto& r : table) {
    const int n = std::stoi(r.at("N"));
    auto d = parse_delta(n, r.at("delta"));
    const auto printed = std::stoll(r.at("index"));
    const auto mu = invariants(d).mu;
    INFO(r.at("anchor") << " " << n << " " << r.at("delta"));
    CHECK(index_closed_form(d) == mu);
    CHECK(mu % gamma0_index(n) == 0);
    if (auto s = slips.find(r.at("anchor")); s != slips.end()) {
      // Every index at level N is a multiple of the Gamma_0(N) index.
      CHECK(printed % gamma0_index(n) != 0);
      CHECK(mu == s->second);
      MESSAGE(r.at("anchor") << " " << n << " " << r.at("delta") << ": printed " << printed << " is not a multiple of "
                             << gamma0_index(n) << "; computed " << mu);
    } else {
      CHECK(mu == printed);
      ++exact;
    }
  }
  CHECK(exact == table.size() - slips.size());
}

TEST_CASE("cited facts reproduce the rule tables") {
  const auto facts = load_inputs({fixtures::data_dir() / "facts"}, fixtures::data_dir() / "models");
  for (const auto& f : facts) REQUIRE_FALSE(f.computed);

  const auto ks = read_tsv("kim_sarnak.tsv");
  auto K = propagate(levels_of(ks), facts);
  for (const auto& r : ks) {
    INFO(r.at("anchor"));
    CHECK(entry(K, r).c.lo >= std::stoi(r.at("gon_C_lower")));
  }

  const auto cs = read_tsv("castelnuovo_severi.tsv");
  auto C = propagate(levels_of(cs), facts);
  for (const auto& r : cs) {
    INFO(r.at("anchor"));
    const auto& e = entry(C, r);
    CHECK(e.inv.genus == std::stoi(r.at("g")));
    CHECK(e.c.lo >= std::stoi(r.at("gon_C_lower")));
    auto i = *C.find(e.delta);
    bool by_cs = false;
    for (const auto& d : C.derivations)
      if (d.curve == i && d.field == "C" && d.rule == "castelnuovo_severi" && d.value >= std::stoi(r.at("gon_C_lower")))
        by_cs = true;
    CHECK(by_cs);
  }

  const auto pc = read_tsv("point_count_bounds.tsv");
  auto P = propagate(levels_of(pc), facts);
  for (const auto& r : pc) {
    INFO(r.at("anchor"));
    const std::uint64_t q = std::stoull(r.at("p")) * std::stoull(r.at("p"));
    CHECK(std::stoull(r.at("count")) > 5 * (q + 1));
    const auto& e = entry(P, r);
    CHECK(e.q.lo >= std::stoi(r.at("gon_Q_lower")));
    auto i = *P.find(e.delta);
    bool by_count = false;
    for (const auto& d : P.derivations)
      if (d.curve == i && d.field == "Q" && d.rule == "point_count" && d.value >= 6) by_count = true;
    CHECK(by_count);
  }
}

TEST_CASE("two runs give byte-identical reports and certificates") {
  const auto a = full_report(1);
  CHECK(a == full_report(1));
  CHECK(a == full_report(4));
  const auto c = some_certificates(1);
  CHECK(c == some_certificates(1));
  CHECK(c == some_certificates(3));
}
