#include "modgon/report.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "modgon/errors.hpp"
#include "modgon/model.hpp"

namespace modgon {

namespace {

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, '\t')) out.push_back(cell);
  if (!line.empty() && line.back() == '\t') out.emplace_back();
  return out;
}

// Display width: UTF-8 continuation bytes take no column.
std::size_t width(const std::string& s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char ch) {
    return (static_cast<unsigned char>(ch) & 0xC0) != 0x80;
  }));
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

int to_int(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    int v = std::stoi(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw InputError(where + ": expected an integer, got '" + s + "'");
}

void add_file(const std::filesystem::path& file, const std::filesystem::path& models_dir, std::vector<Fact>& out) {
  const auto ext = file.extension();
  if (ext == ".facts") {
    for (auto& f : load_facts(file)) out.push_back(std::move(f));
  } else if (ext == ".cert") {
    for (const auto& c : load_certificates(file)) {
      const auto model = models_dir / model_file_name(c.curve);
      if (!models_dir.empty() && std::filesystem::exists(model)) check_model(c, load_model(model));
      for (auto& f : certificate_facts(c)) out.push_back(std::move(f));
    }
  } else {
    throw InputError(file.string() + ": expected a .facts or .cert file");
  }
}

}  // namespace

std::vector<Fact> load_inputs(const std::vector<std::filesystem::path>& paths, const std::filesystem::path& models_dir,
                              const std::vector<FactKind>& without) {
  std::vector<Fact> out;
  for (const auto& p : paths) {
    if (std::filesystem::is_directory(p)) {
      std::vector<std::filesystem::path> files;
      for (const auto& e : std::filesystem::directory_iterator(p)) {
        const auto ext = e.path().extension();
        if (e.is_regular_file() && (ext == ".facts" || ext == ".cert")) files.push_back(e.path());
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) add_file(f, models_dir, out);
    } else if (std::filesystem::exists(p)) {
      add_file(p, models_dir, out);
    } else {
      throw InputError("no such facts path " + p.string());
    }
  }
  std::erase_if(out, [&](const Fact& f) { return std::find(without.begin(), without.end(), f.kind) != without.end(); });
  return out;
}

std::vector<ReportRow> report_rows(const BoundLedger& ledger, int min_genus) {
  std::vector<ReportRow> rows;
  std::map<int, UnitGroup> groups;
  for (std::size_t i = 0; i < ledger.curves.size(); ++i) {
    const auto& e = ledger.curves[i];
    if (e.inv.genus < min_genus) continue;
    const int n = e.delta.level();
    auto it = groups.find(n);
    if (it == groups.end()) it = groups.emplace(n, UnitGroup(n)).first;
    ReportRow r;
    r.level = n;
    r.structure = it->second.structure_string();
    r.generators = it->second.generators_string();
    r.delta = e.delta.display();
    r.key = e.delta.key();
    r.genus = static_cast<int>(e.inv.genus);
    r.q = e.q;
    r.c = e.c;
    for (const char* field : {"Q", "C"})
      for (auto k : ledger.final_derivations(i, field)) {
        const auto& rule = ledger.derivations[k].rule;
        if (std::find(r.rules.begin(), r.rules.end(), rule) == r.rules.end()) r.rules.push_back(rule);
      }
    rows.push_back(std::move(r));
  }
  return rows;
}

Format parse_format(std::string_view s) {
  if (s == "text") return Format::Text;
  if (s == "csv") return Format::Csv;
  if (s == "json-lines") return Format::JsonLines;
  throw InputError("unknown format '" + std::string(s) + "' (text, csv or json-lines)");
}

std::string format_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& cells,
                         Format f) {
  std::string out;
  switch (f) {
    case Format::Text: {
      if (cells.empty()) return out;
      std::vector<std::size_t> w(header.size());
      for (std::size_t j = 0; j < header.size(); ++j) w[j] = width(header[j]);
      for (const auto& row : cells)
        for (std::size_t j = 0; j < row.size(); ++j) w[j] = std::max(w[j], width(row[j]));
      auto emit = [&](const std::vector<std::string>& row) {
        std::string line;
        for (std::size_t j = 0; j < row.size(); ++j) {
          line += row[j];
          if (j + 1 < row.size()) line += std::string(w[j] - width(row[j]) + 2, ' ');
        }
        out += line + "\n";
      };
      emit(header);
      for (const auto& row : cells) emit(row);
      break;
    }
    case Format::Csv:
      out += join(header, ",") + "\n";
      for (const auto& row : cells) {
        std::vector<std::string> q;
        for (const auto& c : row) q.push_back(csv_cell(c));
        out += join(q, ",") + "\n";
      }
      break;
    case Format::JsonLines:
      for (const auto& row : cells) {
        nlohmann::ordered_json j;
        for (std::size_t k = 0; k < header.size(); ++k) j[header[k]] = row[k];
        out += j.dump() + "\n";
      }
      break;
  }
  return out;
}

std::string format_rows(const std::vector<ReportRow>& rows, Format f) {
  if (f != Format::JsonLines) {
    std::vector<std::vector<std::string>> cells;
    for (const auto& r : rows)
      cells.push_back({std::to_string(r.level), r.structure, r.generators, r.delta, std::to_string(r.genus),
                       r.q.to_string(), r.c.to_string(), join(r.rules, " ")});
    return format_table({"N", "structure", "generators", "delta", "g", "gon_Q", "gon_C", "results"}, cells, f);
  }
  auto bound = [](const Interval& i) {
    nlohmann::ordered_json j;
    j["lo"] = i.lo;
    j["hi"] = i.hi == kUnbounded ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(i.hi);
    return j;
  };
  std::string out;
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["N"] = r.level;
    j["structure"] = r.structure;
    j["generators"] = r.generators;
    j["delta"] = r.delta;
    j["key"] = r.key;
    j["g"] = r.genus;
    j["gon_Q"] = bound(r.q);
    j["gon_C"] = bound(r.c);
    j["results"] = r.rules;
    out += j.dump() + "\n";
  }
  return out;
}

GoldenCell parse_golden_cell(const std::string& printed) {
  GoldenCell c;
  c.printed = printed;
  std::string t = printed;
  if (t.size() > 2 && t.front() == '$' && t.back() == '$') {
    t = t.substr(1, t.size() - 2);
    c.flagged = true;
  }
  static const std::string kGeq = "≥";
  std::string digits;
  if (t.starts_with(kGeq)) {
    digits = t.substr(kGeq.size());
  } else if (t.starts_with("geq")) {
    digits = t.substr(3);
    c.flagged = true;
  } else {
    digits = t;
    if (c.flagged) throw InputError("golden cell '" + printed + "' is not a bound");
    c.reading.lo = c.reading.hi = to_int(digits, "golden cell");
    if (c.reading.lo < 1) throw InputError("golden cell '" + printed + "' is not a gonality");
    return c;
  }
  c.reading.lo = to_int(digits, "golden cell '" + printed + "'");
  c.reading.hi = kUnbounded;
  return c;
}

std::vector<GoldenRow> parse_golden(std::string_view text, const std::string& origin) {
  static const std::vector<std::string> kHeader = {"anchor", "N", "structure", "generators", "delta", "g", "gon_Q", "gon_C"};
  std::vector<GoldenRow> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  std::set<std::string> keys;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    auto cells = split_tabs(line);
    if (!header) {
      if (cells != kHeader) throw InputError(where + ": expected the header " + join(kHeader, " "));
      header = true;
      continue;
    }
    if (cells.size() != kHeader.size())
      throw InputError(where + ": expected " + std::to_string(kHeader.size()) + " cells, got " +
                       std::to_string(cells.size()));
    GoldenRow r;
    r.anchor = cells[0];
    r.level = to_int(cells[1], where);
    r.structure = cells[2];
    r.generators = cells[3];
    r.delta = cells[4];
    try {
      r.key = parse_delta(r.level, r.delta).key();
      r.q = parse_golden_cell(cells[6]);
      r.c = parse_golden_cell(cells[7]);
    } catch (const InputError& e) {
      throw InputError(where + ": " + e.what());
    }
    r.genus = to_int(cells[5], where);
    if (!keys.insert(r.key).second) throw InputError(where + ": duplicate row for " + r.key);
    out.push_back(std::move(r));
  }
  if (!header) throw InputError(origin + ": no header line");
  return out;
}

std::vector<GoldenRow> load_golden(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read golden table " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_golden(ss.str(), path.filename().string());
}

Comparison compare_golden(const std::vector<ReportRow>& rows, const std::vector<GoldenRow>& golden,
                          const std::vector<int>& levels) {
  Comparison cmp;
  const std::set<int> loaded(levels.begin(), levels.end());
  int max_level = 0;
  for (const auto& g : golden) max_level = std::max(max_level, g.level);
  std::map<std::string, const ReportRow*> by_key;
  for (const auto& r : rows) by_key[r.key] = &r;
  std::set<std::string> seen;

  auto cell = [&](const GoldenRow& g, const char* column, const GoldenCell& want, const Interval& got) {
    const std::string where = g.anchor + "." + column + " (" + std::to_string(g.level) + " " + g.delta + ")";
    if (want.flagged)
      cmp.notes.push_back(where + ": printed '" + want.printed + "' read as lower bound " +
                          std::to_string(want.reading.lo));
    const bool ok = want.reading.exact() ? got == want.reading : got.lo == want.reading.lo;
    if (ok) return true;
    cmp.diffs.push_back(where + ": table " + want.printed + ", computed " + got.to_string());
    return false;
  };

  for (const auto& g : golden) {
    if (!loaded.count(g.level)) continue;
    seen.insert(g.key);
    auto it = by_key.find(g.key);
    if (it == by_key.end()) {
      cmp.diffs.push_back(g.anchor + " (" + std::to_string(g.level) + " " + g.delta + "): no computed row");
      ++cmp.q_diffs;
      continue;
    }
    const auto& r = *it->second;
    ++cmp.rows_compared;
    if (r.genus != g.genus)
      cmp.diffs.push_back(g.anchor + ".g (" + std::to_string(g.level) + " " + g.delta + "): table " +
                          std::to_string(g.genus) + ", computed " + std::to_string(r.genus));
    if (!cell(g, "gon_Q", g.q, r.q)) ++cmp.q_diffs;
    if (!cell(g, "gon_C", g.c, r.c) && g.c.reading.exact()) ++cmp.c_definite_diffs;
  }
  for (const auto& r : rows)
    if (r.level <= max_level && !seen.count(r.key))
      cmp.diffs.push_back(std::to_string(r.level) + " " + r.delta + ": computed row missing from the table");
  return cmp;
}

std::string format_comparison(const Comparison& c) {
  std::string out;
  for (const auto& d : c.diffs) out += "diff  " + d + "\n";
  for (const auto& n : c.notes) out += "note  " + n + "\n";
  out += "compared " + std::to_string(c.rows_compared) + " rows: " + std::to_string(c.diffs.size()) + " diffs (" +
         std::to_string(c.q_diffs) + " gon_Q, " + std::to_string(c.c_definite_diffs) + " definite gon_C)\n";
  return out;
}

}  // namespace modgon
