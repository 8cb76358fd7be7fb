#include <doctest.h>

#include <regex>

#include "fixtures.hpp"
#include "modgon/certificate.hpp"
#include "modgon/curve.hpp"
#include "modgon/errors.hpp"
#include "modgon/field.hpp"

using namespace modgon;
namespace fs = std::filesystem;

namespace {

std::vector<fs::path> certificate_paths() {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(fixtures::data_dir() / "certificates"))
    if (e.path().extension() == ".cert") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path model_for(const Certificate& c) { return fixtures::data_dir() / "models" / model_file_name(c.curve); }

// "3*(0:0:1) + (1:0:0)" read without the library's own formatter.
std::vector<std::pair<IntPoint, int>> read_witness(const std::string& text) {
  std::vector<std::pair<IntPoint, int>> out;
  static const std::regex term(R"((?:(\d+)\*)?\(([-0-9:]+)\))");
  for (auto it = std::sregex_iterator(text.begin(), text.end(), term); it != std::sregex_iterator(); ++it) {
    IntPoint pt;
    std::stringstream ss((*it)[2].str());
    std::string c;
    while (std::getline(ss, c, ':')) pt.push_back(std::stoll(c));
    out.emplace_back(pt, (*it)[1].matched ? std::stoi((*it)[1].str()) : 1);
  }
  return out;
}

// ell of the reduction mod p of a rational divisor, from curve.cpp's
// Riemann-Roch with the points as degree-one closed points.
int reduced_ell(const QuadricModel& m, std::uint32_t p, const std::vector<std::pair<IntPoint, int>>& parts) {
  ReducedModel red(m, p);
  const auto& f = *galois_field(p, 1);
  EffectiveDivisor d;
  for (const auto& [pt, mult] : parts) {
    Coords x;
    for (auto v : pt) x.push_back(f.from_int(v));
    auto lead = std::find_if(x.begin(), x.end(), [&](auto e) { return !f.is_zero(e); });
    REQUIRE(lead != x.end());
    const auto scale = f.inv(*lead);
    for (auto& e : x) e = f.mul(e, scale);
    REQUIRE(red.on_curve(f, x));
    d.parts.push_back({ClosedPoint{1, x}, mult});
  }
  return riemann_roch(red, d).ell;
}

}  // namespace

TEST_CASE("shipped certificates round trip and match their models") {
  auto paths = certificate_paths();
  REQUIRE(paths.size() > 60);
  for (const auto& p : paths) {
    INFO(p.filename().string());
    const auto text = slurp(p);
    auto certs = parse_certificates(text, p.filename().string());
    REQUIRE(certs.size() == 1);
    CHECK(format_certificate(certs[0]) == text);
    REQUIRE(fs::exists(model_for(certs[0])));
    auto m = load_model(model_for(certs[0]));
    CHECK_NOTHROW(check_model(certs[0], m));
    CHECK_FALSE(certs[0].incomplete());
  }
}

TEST_CASE("a certificate is refused by a different model") {
  auto c = load_certificates(fixtures::data_dir() / "certificates" / "x29_12.count.p1.cert").at(0);
  auto m = fixtures::model("x29_12");
  auto tampered = c;
  tampered.model_hash[0] = tampered.model_hash[0] == '0' ? '1' : '0';
  CHECK_THROWS_AS(check_model(tampered, m), InputError);
  CHECK_THROWS_AS(check_model(c, fixtures::model("x30_11")), InputError);
}

TEST_CASE("certificate parser errors") {
  const std::string good = slurp(fixtures::data_dir() / "certificates" / "x29_12.count.p1.cert");
  CHECK_NOTHROW(parse_certificates(good));
  auto replace = [&](const std::string& from, const std::string& to) {
    auto s = good;
    s.replace(s.find(from), from.size(), to);
    return s;
  };
  CHECK_THROWS_AS(parse_certificates(replace("kind: point_count", "kind: hunch")), InputError);
  CHECK_THROWS_AS(parse_certificates(replace("status: computed\n", "")), InputError);
  CHECK_THROWS_AS(parse_certificates(replace("ext: 1\n", "ext: 1\next: 2\n")), InputError);
  CHECK_THROWS_AS(parse_certificates(replace("field: F2", "field: F4")), InputError);
  auto c = parse_certificates(replace("count: 7", "count: seven")).at(0);
  CHECK_THROWS_AS(certificate_facts(c), InputError);
}

TEST_CASE("certificates become computed facts") {
  auto facts_of = [](const char* name) {
    return certificate_facts(load_certificates(fixtures::data_dir() / "certificates" / name).at(0));
  };
  auto lower = facts_of("x32_15.fp-lower.f3.cert");
  REQUIRE(lower.size() == 1);
  CHECK(lower[0].kind == FactKind::ExternalGonality);
  CHECK(lower[0].text("field") == "F3");
  CHECK(lower[0].number("value") == 4);
  CHECK(lower[0].text("direction") == "lower");
  CHECK(lower[0].computed);
  CHECK(lower[0].source.find("32.1.15") != std::string::npos);

  auto upper = facts_of("x32_15.upper.f3.cert");
  REQUIRE(upper.size() == 1);
  CHECK(upper[0].number("value") == 4);
  CHECK(upper[0].text("direction") == "upper");

  auto q = facts_of("x31_2_4_8_15.upper.q.cert");
  REQUIRE(q.size() == 1);
  CHECK(q[0].text("field") == "Q");
  CHECK(q[0].number("value") == 5);

  auto betti = facts_of("x29_12.betti.cert");
  REQUIRE(betti.size() == 1);
  CHECK(betti[0].kind == FactKind::Betti22);
  CHECK(betti[0].number("value") == 0);

  auto count = facts_of("x29_12.count.p2.cert");
  REQUIRE(count.size() == 1);
  CHECK(count[0].kind == FactKind::PointCount);
  CHECK(count[0].number("k") == 2);

  // Searches that found nothing say nothing.
  auto c = load_certificates(fixtures::data_dir() / "certificates" / "x32_15.upper.f3.cert").at(0);
  c.status = "not-found";
  CHECK(certificate_facts(c).empty());
  c.kind = CertKind::FpLower;
  c.status = "incomplete";
  CHECK(certificate_facts(c).empty());
}

TEST_CASE("point count certificates agree with the Hecke trace counts") {
  std::size_t checked = 0;
  for (const auto& p : certificate_paths()) {
    auto c = load_certificates(p).at(0);
    if (c.kind != CertKind::PointCount) continue;
    auto counts = fixtures::hecke_counts(model_for(c));
    const auto prime = parse_gon_field(c.field).p;
    REQUIRE(counts.count(prime));
    INFO(p.filename().string());
    const auto expected = c.number("ext") == 1 ? counts[prime].first : counts[prime].second;
    CHECK(c.number("count") == static_cast<std::int64_t>(expected));
    ++checked;
  }
  CHECK(checked == 2 * fixtures::model_paths().size());
}

TEST_CASE("the Q witness on 31 {±1,±2,±4,±8,±15} uses multiplicities") {
  auto m = fixtures::model("x31_2_4_8_15");
  auto c = load_certificates(fixtures::data_dir() / "certificates" / "x31_2_4_8_15.upper.q.cert").at(0);
  CHECK(c.get("multiplicities") == "on");
  auto parts = read_witness(c.get("witness"));
  REQUIRE(parts.size() == 2);
  int degree = 0;
  std::vector<IntPoint> flat;
  for (const auto& [pt, mult] : parts) {
    degree += mult;
    for (int i = 0; i < mult; ++i) flat.push_back(pt);
    CHECK(mult > 1);
  }
  CHECK(degree == 5);
  CHECK(rational_ell(m, flat) >= 2);
  // Reduction can only raise ell, so every good prime must see ell >= 2 too.
  for (auto p : m.good_primes) {
    INFO("p = " << p);
    CHECK(reduced_ell(m, p, parts) >= 2);
  }
  // Distinct points alone do not reach degree 5 at this height.
  auto distinct = rational_upper_search(m, 5, rational_points(m, 10), 100'000'000, false);
  CHECK_FALSE(distinct.witness);
}

TEST_CASE("certificates are reproducible") {
  for (const char* name : {"x29_12.count.p1.cert", "x32_15.fp-lower.f3.cert", "x32_15.upper.f3.cert",
                           "x34_9_13_15.upper.q.cert", "x29_12.betti.cert"}) {
    INFO(name);
    const auto path = fixtures::data_dir() / "certificates" / name;
    auto shipped = load_certificates(path).at(0);
    auto m = load_model(model_for(shipped));
    const auto p = shipped.field == "Q" ? 0u : parse_gon_field(shipped.field).p;
    Certificate again;
    switch (shipped.kind) {
      case CertKind::PointCount:
        again = certify_count(m, p, static_cast<std::uint32_t>(shipped.number("ext")));
        break;
      case CertKind::FpLower:
        again = certify_fp_lower(m, p, static_cast<int>(shipped.number("degree")));
        break;
      case CertKind::UpperWitness:
        again = shipped.field == "Q"
                    ? certify_q_upper(m, static_cast<int>(shipped.number("degree")),
                                      static_cast<int>(shipped.number("height")))
                    : certify_fp_upper(m, p, static_cast<int>(shipped.number("degree")),
                                       static_cast<int>(shipped.number("pool_degree")));
        break;
      case CertKind::Betti22:
        again = certify_betti(m, p, static_cast<std::uint32_t>(shipped.number("ext")));
        break;
    }
    CHECK(format_certificate(again) == slurp(path));
  }
  SearchConfig four;
  four.workers = 4;
  auto m = fixtures::model("x32_15");
  CHECK(format_certificate(certify_fp_lower(m, 3, 3, four)) == format_certificate(certify_fp_lower(m, 3, 3)));
}
