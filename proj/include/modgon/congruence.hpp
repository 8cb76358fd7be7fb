#pragma once

// Coset action of SL2(Z/NZ) on Gamma_Delta(N)\SL2 and the derived invariants.

#include <cstdint>
#include <vector>

#include "modgon/units.hpp"

namespace modgon {

/// Right cosets of H0 = {[[a,b],[0,a^-1]] : a in Delta} in SL2(Z/NZ).
///
/// A coset is determined by the bottom row (c,d) of any member, up to
/// scaling by Delta. Cosets are numbered in breadth-first order from the
/// identity coset, applying S before T, so numbering is reproducible.
struct CosetAction {
  int level = 1;
  std::vector<int> delta;      // sorted residues
  std::vector<int> perm_s;     // coset . S
  std::vector<int> perm_t;     // coset . T
  std::vector<std::pair<int, int>> rep;  // canonical bottom row per coset

  std::size_t size() const { return perm_s.size(); }
};

struct CongruenceInvariants {
  std::int64_t mu = 1;
  int nu2 = 0;
  int nu3 = 0;
  int cusps = 1;
  int genus = 0;
};

CosetAction coset_action(const DirichletSubgroup& delta);
CongruenceInvariants invariants(const CosetAction& rep);
CongruenceInvariants invariants(const DirichletSubgroup& delta);

/// N * prod_{p | N} (1 + 1/p).
std::int64_t gamma0_index(std::int64_t level);

/// Closed-form index gamma0_index(N) * phi(N) / |Delta|.
std::int64_t index_closed_form(const DirichletSubgroup& delta);

/// Degree of X_small -> X_large, i.e. |large| / |small|. Throws InputError
/// unless small is contained in large.
std::int64_t projection_degree(const DirichletSubgroup& small, const DirichletSubgroup& large);

/// floor(12000 d / 119): a curve of index above this is not d-gonal over C.
std::int64_t kim_sarnak_floor(std::int64_t d);

}  // namespace modgon
