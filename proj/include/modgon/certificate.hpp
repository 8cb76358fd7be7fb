#pragma once

// Certificate records: the outcome of a computation on a model, tied to the
// model file by its hash, and the facts it contributes to the bound ledger.
//
//   kind: fp_lower | upper_witness | betti22 | point_count
//   curve: 30 {±1,±11}
//   model: 30.1.11
//   model_hash: <sha256 of the model file>
//   field: F3 | Q
//   ...kind-specific keys...
//   status: certified | witness | found | not-found | incomplete | computed

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "modgon/bounds.hpp"
#include "modgon/gonality.hpp"
#include "modgon/model.hpp"

namespace modgon {

enum class CertKind { FpLower, UpperWitness, Betti22, PointCount };

std::string_view cert_kind_name(CertKind k);

struct Certificate {
  CertKind kind = CertKind::FpLower;
  DirichletSubgroup curve{1, {0}};
  std::string model;
  std::string model_hash;
  std::string field;
  std::vector<std::pair<std::string, std::string>> data;  // kind-specific, emission order
  std::string status;
  std::string origin;  // diagnostics only

  const std::string& get(const std::string& key) const;
  std::int64_t number(const std::string& key) const;
  /// A complete, positive result: exit status 0 for `certify`.
  bool certified() const;
  /// Gave up on budget: exit status 3.
  bool incomplete() const { return status == "incomplete"; }
};

std::string format_certificate(const Certificate& c);
std::vector<Certificate> parse_certificates(std::string_view text, const std::string& origin = "<certificate>");
std::vector<Certificate> load_certificates(const std::filesystem::path& path);

/// Throws InputError unless the certificate was computed from this model.
void check_model(const Certificate& c, const QuadricModel& m);

/// Facts the certificate supports, marked computed. Incomplete searches
/// and unsuccessful upper searches contribute nothing.
std::vector<Fact> certificate_facts(const Certificate& c);

/// gon over F_p > d, or a divisor of degree d with ell >= 2.
Certificate certify_fp_lower(const QuadricModel& m, std::uint32_t p, int d, const SearchConfig& cfg = {});

/// A degree d divisor with ell >= 2 over F_p from closed points of degree
/// <= pool_degree.
Certificate certify_fp_upper(const QuadricModel& m, std::uint32_t p, int d, int pool_degree,
                             const SearchConfig& cfg = {});

/// Over Q from rational points of height <= height: sums of distinct points
/// first, then with multiplicities.
Certificate certify_q_upper(const QuadricModel& m, int d, int height, std::uint64_t budget = 100'000'000);

/// beta_{2,2} over F_{p^k}; a zero certifies vanishing over Q.
Certificate certify_betti(const QuadricModel& m, std::uint32_t p, std::uint32_t k = 1);

/// #X(F_{p^k}) from the model.
Certificate certify_count(const QuadricModel& m, std::uint32_t p, std::uint32_t k = 1,
                          const EnumerationLimits& lim = {});

}  // namespace modgon
