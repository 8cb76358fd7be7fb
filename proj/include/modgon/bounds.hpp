#pragma once

// Facts, the bound ledger and the rule engine that narrows gonality
// intervals to a fixed point, recording a derivation for every step.

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "modgon/congruence.hpp"
#include "modgon/units.hpp"

namespace modgon {

enum class FactKind { PointCount, KnownMap, Classification, Betti22, ExternalGonality };

std::string_view fact_kind_name(FactKind k);

/// Which curves a fact is about: one curve, or every curve of the ledger
/// (optionally only those of genus >= min_genus, minus an exception list).
struct CurveSelector {
  bool all = false;
  std::optional<DirichletSubgroup> curve;
  int min_genus = 0;
  std::vector<DirichletSubgroup> except;

  bool matches(const DirichletSubgroup& d, int genus) const;
  std::string canonical() const;
};

struct Fact {
  FactKind kind = FactKind::Classification;
  CurveSelector curve;
  std::map<std::string, std::string> payload;  // validated at parse time
  std::string source;
  bool computed = false;  // produced by a certificate, not cited
  std::string origin;     // file:line, diagnostics only

  std::string canonical() const;
  std::int64_t number(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  bool has(const std::string& key) const { return payload.count(key) != 0; }
  bool flag(const std::string& key) const;
};

/// A block of `key: value` lines; `where` is origin:line of its first line.
struct TextRecord {
  std::string where;
  std::vector<std::pair<std::string, std::string>> fields;
};
/// Blocks are separated by blank lines; lines starting with `#` are skipped.
std::vector<TextRecord> read_records(std::string_view text, const std::string& origin);

/// "29 {±1,±12}", "71 <-1,5>" or the key form "29:1,12,17,28".
DirichletSubgroup parse_curve(std::string_view s);

/// Records separated by blank lines, one `key: value` per line, `#` starts
/// a comment line. Required keys: kind, curve, source. Throws InputError
/// naming the origin and the offending key or token.
std::vector<Fact> parse_facts(std::string_view text, const std::string& origin = "<facts>");
std::vector<Fact> load_facts(const std::filesystem::path& path);

/// "Q", "C" or "F<p>" for a prime p.
struct GonField {
  char kind = 'Q';  // 'Q', 'C' or 'F'
  std::uint32_t p = 0;
  std::string name() const;
  friend bool operator==(const GonField&, const GonField&) = default;
};
GonField parse_gon_field(std::string_view s);

inline constexpr int kUnbounded = std::numeric_limits<int>::max();

struct Interval {
  int lo = 1;
  int hi = kUnbounded;
  bool exact() const { return lo == hi; }
  std::string to_string() const;  // "6", "[5,7]", "[5,-]"
  friend bool operator==(const Interval&, const Interval&) = default;
};

enum class Side { Lo, Hi };

struct Derivation {
  std::size_t round = 0;
  std::string rule;
  std::size_t curve = 0;  // index into BoundLedger::curves
  std::string field;      // "Q", "C", "F3"
  Side side = Side::Lo;
  int value = 0;
  std::vector<std::size_t> facts;     // indices into BoundLedger::facts
  std::vector<std::string> premises;  // interval states and auxiliary quantities
  friend bool operator==(const Derivation&, const Derivation&) = default;
};

struct CurveEntry {
  DirichletSubgroup delta;
  CongruenceInvariants inv;
  Interval q, c;
  std::map<std::uint32_t, Interval> fp;

  Interval& slot(const std::string& field);
  const Interval& slot(const std::string& field) const;
};

struct BoundLedger {
  std::vector<int> levels;
  std::vector<CurveEntry> curves;  // by level, then enumerate_deltas order
  std::vector<Fact> facts;         // canonical order, duplicates removed
  std::vector<Derivation> derivations;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // (smaller group, larger group)

  std::optional<std::size_t> find(const DirichletSubgroup& d) const;
  std::string curve_name(std::size_t i) const;  // "29 {±1,±12}"
  /// Last derivations that set the final lower and upper bound of a slot.
  std::vector<std::size_t> final_derivations(std::size_t curve, const std::string& field) const;
  std::string describe(const Derivation& d) const;
};

/// Rule identifiers in their canonical order.
const std::vector<std::string>& rule_ids();

struct PropagateOptions {
  std::vector<std::string> rule_order;  // a permutation of rule_ids(); empty = canonical
  std::vector<std::size_t> curve_order; // a permutation of curve indices; empty = natural
  unsigned workers = 1;                 // genus computations only
  std::size_t max_rounds = 10'000;
};

/// Curves of every proper Delta at the given levels with their invariants,
/// all intervals [1, -], and the facts in canonical order.
BoundLedger initial_ledger(const std::vector<int>& levels, std::vector<Fact> facts, unsigned workers = 1);

/// Applies every rule to a fixed point. Each round evaluates all rules on
/// the state at the start of the round and keeps, per bound, the strongest
/// conclusion (ties broken by rule id, then premises), so the result does
/// not depend on rule, curve or fact order. Throws InconsistentFacts naming
/// both derivations when an interval empties, InputError for facts that
/// contradict the computed invariants.
BoundLedger propagate(const std::vector<int>& levels, std::vector<Fact> facts, const PropagateOptions& opt = {});
void propagate(BoundLedger& ledger, const PropagateOptions& opt = {});

/// Re-runs each derivation's rule on the replayed state of its round and
/// applies it; throws std::logic_error if a derivation is not reproduced.
BoundLedger replay(const std::vector<int>& levels, const std::vector<Fact>& facts,
                   const std::vector<Derivation>& derivations);

/// lo <= hi everywhere, C within Q, F_p lower bounds under the Q lower
/// bound, and lower bounds monotone along every lattice edge. Returns the
/// violations (empty when coherent).
std::vector<std::string> coherence_violations(const BoundLedger& ledger);

/// Curves whose intervals differ between two ledgers over the same levels.
std::vector<std::string> ledger_differences(const BoundLedger& a, const BoundLedger& b);

}  // namespace modgon
