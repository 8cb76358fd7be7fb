#pragma once

// Table rows from a propagated ledger, their text/csv/json-lines renderings
// and the comparison against a golden copy of the summary table.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "modgon/bounds.hpp"
#include "modgon/certificate.hpp"

namespace modgon {

/// Reads *.facts files as facts and *.cert files as certificates; a
/// directory contributes its *.facts and *.cert files in name order.
/// Certificates whose model file is present under models_dir must match its
/// hash. Facts of the kinds listed in `without` are dropped.
std::vector<Fact> load_inputs(const std::vector<std::filesystem::path>& paths, const std::filesystem::path& models_dir,
                              const std::vector<FactKind>& without = {});

struct ReportRow {
  int level = 0;
  std::string structure;   // of (Z/NZ)^x, "C2xC6"
  std::string generators;  // of (Z/NZ)^x
  std::string delta;       // display form
  std::string key;         // DirichletSubgroup::key()
  int genus = 0;
  Interval q, c;
  std::vector<std::string> rules;  // derivations behind the final Q and C bounds
};

/// One row per curve of genus >= min_genus, in ledger order.
std::vector<ReportRow> report_rows(const BoundLedger& ledger, int min_genus = 3);

enum class Format { Text, Csv, JsonLines };
Format parse_format(std::string_view s);
std::string format_rows(const std::vector<ReportRow>& rows, Format f);
/// Aligned columns (nothing for no rows), csv with a header line, or one
/// JSON object of strings per row.
std::string format_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& cells,
                         Format f);

/// A golden cell as printed and its reading. `flagged` marks readings that
/// repair a printing slip.
struct GoldenCell {
  std::string printed;
  Interval reading;
  bool flagged = false;
};
GoldenCell parse_golden_cell(const std::string& printed);

struct GoldenRow {
  std::string anchor;
  int level = 0;
  std::string structure, generators, delta;
  std::string key;
  int genus = 0;
  GoldenCell q, c;
};

/// Tab-separated, `#` comments, one header line naming the columns.
std::vector<GoldenRow> parse_golden(std::string_view text, const std::string& origin = "<golden>");
std::vector<GoldenRow> load_golden(const std::filesystem::path& path);

struct Comparison {
  std::vector<std::string> diffs;  // each names the row anchor or curve
  std::vector<std::string> notes;  // flagged readings
  std::size_t rows_compared = 0;
  std::size_t q_diffs = 0;
  std::size_t c_definite_diffs = 0;  // gon_C diffs where the golden cell is a single value
  bool clean() const { return diffs.empty(); }
};

/// Golden rows at the given levels are compared with the computed rows; a
/// computed row with no golden counterpart is a diff when its level is at
/// most the largest golden level. A "k" cell must be matched exactly, a
/// ">=k" cell by lower bound k.
Comparison compare_golden(const std::vector<ReportRow>& rows, const std::vector<GoldenRow>& golden,
                          const std::vector<int>& levels);
std::string format_comparison(const Comparison& c);

}  // namespace modgon
