// modgon: lattice listings, invariants, certificates and the summary report.
//
// Exit status: 0 ok / certified / clean diff, 1 not certified or diff
// present, 2 input error, 3 budget exceeded.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "modgon/bounds.hpp"
#include "modgon/certificate.hpp"
#include "modgon/congruence.hpp"
#include "modgon/errors.hpp"
#include "modgon/report.hpp"

using namespace modgon;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0, kNotCertified = 1, kInputError = 2, kBudget = 3;

fs::path data_dir() {
  if (const char* env = std::getenv("MODGON_DATA"); env && *env) return env;
  return MODGON_DEFAULT_DATA;
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw InputError("cannot write " + out);
  f << text;
}

int ks_lower(std::int64_t mu) {
  std::int64_t d = 1;
  while (mu > kim_sarnak_floor(d)) ++d;
  return static_cast<int>(d);
}

struct Options {
  std::string level;
  std::string delta;
  std::optional<std::uint32_t> prime;
  std::uint32_t ext = 1;
  int degree = 0;
  int height = 10;
  std::uint64_t budget = 100'000'000;
  std::vector<std::string> facts;
  std::string models;
  std::string golden;
  std::string out;
  std::string diff;
  std::string derivations;
  std::string format = "text";
  std::string checkpoint;
  std::vector<std::string> without;
  unsigned workers = 1;
  bool rational = false;
  bool no_pigeonhole = false;
  bool no_diff = false;
};

fs::path models_dir(const Options& o) { return o.models.empty() ? data_dir() / "models" : fs::path(o.models); }

int cmd_lattice(const Options& o) {
  std::vector<std::vector<std::string>> cells;
  for (int n : parse_level_list(o.level)) {
    auto deltas = enumerate_deltas(n, true);
    auto edges = lattice_edges(deltas);
    for (std::size_t i = 0; i < deltas.size(); ++i) {
      auto inv = invariants(deltas[i]);
      std::string above;
      for (const auto& [a, b] : edges)
        if (a == i) above += (above.empty() ? "" : " ") + deltas[b].display();
      cells.push_back({std::to_string(n), deltas[i].display(), std::to_string(deltas[i].order()),
                       std::to_string(inv.mu), std::to_string(inv.genus), above.empty() ? "-" : above});
    }
  }
  emit(format_table({"N", "delta", "order", "index", "g", "contained_in"}, cells, parse_format(o.format)), o.out);
  return kOk;
}

int cmd_invariants(const Options& o) {
  std::vector<std::vector<std::string>> cells;
  for (int n : parse_level_list(o.level)) {
    std::vector<DirichletSubgroup> deltas;
    if (o.delta.empty()) deltas = enumerate_deltas(n, true);
    else deltas.push_back(parse_delta(n, o.delta));
    for (const auto& d : deltas) {
      auto inv = invariants(d);
      cells.push_back({std::to_string(n), d.display(), std::to_string(inv.mu), std::to_string(inv.nu2),
                       std::to_string(inv.nu3), std::to_string(inv.cusps), std::to_string(inv.genus),
                       std::to_string(ks_lower(inv.mu))});
    }
  }
  emit(format_table({"N", "delta", "index", "nu2", "nu3", "cusps", "g", "ks_gon_C_lower"}, cells,
                    parse_format(o.format)),
       o.out);
  return kOk;
}

int cmd_certify(const std::string& kind, const Options& o) {
  auto levels = parse_level_list(o.level);
  if (levels.size() != 1) throw InputError("certify needs a single --level");
  if (o.delta.empty()) throw InputError("certify needs --delta");
  auto delta = parse_delta(levels.front(), o.delta);
  const auto path = models_dir(o) / model_file_name(delta);
  if (!fs::exists(path)) throw InputError("no model for " + std::to_string(delta.level()) + " " + delta.display() +
                                          " (looked for " + path.string() + ")");
  auto m = load_model(path);
  const std::uint32_t p = o.prime.value_or(m.good_primes.front());
  SearchConfig cfg;
  cfg.budget = o.budget;
  cfg.workers = o.workers;
  cfg.pigeonhole = !o.no_pigeonhole;
  cfg.checkpoint = o.checkpoint;
  auto need_degree = [&] {
    if (o.degree < 1) throw InputError(kind + " needs --degree");
  };

  Certificate c;
  if (kind == "fp-lower") {
    need_degree();
    if (o.ext != 1) throw InputError("fp-lower searches over the prime field; drop --ext");
    c = certify_fp_lower(m, p, o.degree, cfg);
  } else if (kind == "upper") {
    need_degree();
    c = o.rational ? certify_q_upper(m, o.degree, o.height, o.budget)
                   : certify_fp_upper(m, p, o.degree, static_cast<int>(o.ext), cfg);
  } else if (kind == "betti") {
    c = certify_betti(m, p, o.ext);
  } else {
    c = certify_count(m, p, o.ext);
  }
  emit(format_certificate(c), o.out);
  std::cerr << cert_kind_name(c.kind) << " " << delta.level() << " " << delta.display() << " over " << c.field
            << ": " << c.status << "\n";
  if (c.incomplete()) return kBudget;
  return c.certified() ? kOk : kNotCertified;
}

FactKind parse_kind(const std::string& s) {
  for (auto k : {FactKind::PointCount, FactKind::KnownMap, FactKind::Classification, FactKind::Betti22,
                 FactKind::ExternalGonality})
    if (fact_kind_name(k) == s) return k;
  throw InputError("unknown fact kind '" + s + "'");
}

int cmd_report(const Options& o) {
  auto levels = parse_level_list(o.level);
  std::vector<fs::path> paths;
  if (o.facts.empty()) {
    paths = {data_dir() / "facts", data_dir() / "certificates"};
  } else {
    for (const auto& f : o.facts) paths.emplace_back(f);
  }
  std::vector<FactKind> without;
  for (const auto& w : o.without) without.push_back(parse_kind(w));
  PropagateOptions opt;
  opt.workers = o.workers;
  auto ledger = propagate(levels, load_inputs(paths, models_dir(o), without), opt);
  // With facts withheld, name every curve whose bounds moved.
  std::vector<std::string> ablation;
  if (!without.empty()) ablation = ledger_differences(propagate(levels, load_inputs(paths, models_dir(o)), opt), ledger);
  auto rows = report_rows(ledger);
  emit(format_rows(rows, parse_format(o.format)), o.out);
  if (!o.derivations.empty()) {
    std::string text;
    for (const auto& d : ledger.derivations) text += ledger.describe(d) + "\n";
    emit(text, o.derivations);
  }
  std::string text;
  for (const auto& a : ablation) text += "withheld  " + a + "\n";
  bool clean = ablation.empty();
  if (!o.no_diff) {
    const fs::path golden = o.golden.empty() ? data_dir() / "golden" / "table1.tsv" : fs::path(o.golden);
    auto cmp = compare_golden(rows, load_golden(golden), levels);
    text += format_comparison(cmp);
    clean = clean && cmp.clean();
  }
  if (o.diff.empty()) std::cerr << text;
  else emit(text, o.diff);
  return clean ? kOk : kNotCertified;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gonality bounds for intermediate modular curves X_Delta(N)"};
  app.require_subcommand(1);
  Options o;

  auto add_level = [&](CLI::App* s, bool required) {
    auto* opt = s->add_option("--level", o.level, "Levels, e.g. 41 or 1-40,48");
    if (required) opt->required();
  };
  auto add_output = [&](CLI::App* s) {
    s->add_option("--format", o.format, "text, csv or json-lines")
        ->check(CLI::IsMember({"text", "csv", "json-lines"}));
    s->add_option("--out", o.out, "Write to this file instead of stdout");
  };

  auto* lattice = app.add_subcommand("lattice", "List the proper Delta at each level with index, genus and edges");
  add_level(lattice, true);
  add_output(lattice);

  auto* inv = app.add_subcommand("invariants", "Index, elliptic points, cusps and genus");
  add_level(inv, true);
  inv->add_option("--delta", o.delta, "One subgroup, e.g. '{±1,±11}' or '<-1,4>'; default all");
  add_output(inv);

  auto* certify = app.add_subcommand("certify", "Compute a certificate on a shipped model");
  std::string kind;
  certify->add_option("kind", kind, "fp-lower, upper, betti or count")
      ->required()
      ->check(CLI::IsMember({"fp-lower", "upper", "betti", "count"}));
  add_level(certify, true);
  certify->add_option("--delta", o.delta, "The subgroup")->required();
  certify->add_option("--prime", o.prime, "Good prime (default: first one listed in the model)");
  certify->add_option("--ext", o.ext, "Extension degree (betti, count) or largest closed-point degree (upper)")
      ->check(CLI::PositiveNumber);
  certify->add_option("--degree", o.degree, "Divisor degree d")->check(CLI::PositiveNumber);
  certify->add_option("--height", o.height, "Height bound for rational points")->check(CLI::PositiveNumber);
  certify->add_option("--budget", o.budget, "Work budget")->check(CLI::PositiveNumber);
  certify->add_option("--models", o.models, "Model directory (default $MODGON_DATA/models)");
  certify->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
  certify->add_option("--checkpoint", o.checkpoint, "Resumable progress file for fp-lower");
  certify->add_flag("--rational", o.rational, "upper: search over Q instead of F_p");
  certify->add_flag("--no-pigeonhole", o.no_pigeonhole, "fp-lower: keep only the rational-point shape reduction");
  certify->add_option("--out", o.out, "Write the certificate here instead of stdout");

  auto* report = app.add_subcommand("report", "Propagate facts and print the summary table");
  add_level(report, true);
  report->add_option("--facts", o.facts, "Facts/certificate files or directories (repeatable)");
  report->add_option("--models", o.models, "Model directory, for certificate hash checks");
  report->add_option("--golden", o.golden, "Golden table (default $MODGON_DATA/golden/table1.tsv)");
  report->add_option("--without", o.without, "Drop facts of this kind (repeatable), e.g. point_count");
  report->add_option("--diff", o.diff, "Write the comparison here instead of stderr");
  report->add_option("--derivations", o.derivations, "Write every derivation to this file");
  report->add_flag("--no-diff", o.no_diff, "Skip the golden comparison");
  report->add_option("--workers", o.workers, "Worker threads for invariants")->check(CLI::PositiveNumber);
  add_output(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*lattice) return cmd_lattice(o);
    if (*inv) return cmd_invariants(o);
    if (*certify) return cmd_certify(kind, o);
    return cmd_report(o);
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kBudget;
  } catch (const InconsistentFacts& e) {
    std::cerr << "inconsistent facts: " << e.what() << "\n";
    return kInputError;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
}
