#pragma once

// Canonical models given by integer quadrics, as read from .model files.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "modgon/units.hpp"

namespace modgon {

struct QuadTerm {
  int i = 0;  // i <= j; x_i * x_j
  int j = 0;
  std::int64_t coeff = 0;
};

struct Quadric {
  std::vector<QuadTerm> terms;  // sorted by (i, j), no zero coefficients
};

struct QuadricModel {
  std::string label;
  int level = 0;
  std::vector<std::int64_t> delta_generators;
  int genus = 0;
  std::vector<std::uint32_t> good_primes;
  std::vector<Quadric> quadrics;
  std::string hash;  // SHA-256 of the source text

  DirichletSubgroup delta() const;
  int ambient_dim() const { return genus - 1; }
};

/// Parses the header/body format:
///
///   label: 30.1.11
///   N: 30
///   delta: -1 11
///   genus: 5
///   good_primes: 7 11 13
///   x0^2 - 2*x1*x3 + x2*x4
///
/// Terms are `coeff * monomial` or a bare monomial; monomial factors are
/// x<i> or x<i>^<e>, joined by `*` or spaces. Every term must have degree 2.
/// The quadric count must be (g-2)(g-3)/2. Throws InputError otherwise.
QuadricModel parse_model(std::string_view text);
QuadricModel load_model(const std::filesystem::path& path);

std::string sha256_hex(std::string_view data);

/// Model file name for a curve: x<N>_<half residues>.model, e.g. x30_11.
std::string model_file_name(const DirichletSubgroup& delta);

}  // namespace modgon
