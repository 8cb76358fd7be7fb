#include "modgon/congruence.hpp"

#include <deque>
#include <numeric>
#include <stdexcept>

#include "modgon/errors.hpp"

namespace modgon {

CosetAction coset_action(const DirichletSubgroup& delta) {
  CosetAction out;
  const int n = delta.level();
  out.level = n;
  out.delta = delta.elements();
  if (n == 1) {
    out.perm_s = {0};
    out.perm_t = {0};
    out.rep = {{0, 1}};
    return out;
  }

  // index[c*n + d] = coset of the primitive row (c, d), -1 if unseen.
  std::vector<int> index(static_cast<std::size_t>(n) * n, -1);
  auto enter = [&](int c, int d) {
    int id = static_cast<int>(out.rep.size());
    int best_c = c, best_d = d;
    for (int a : out.delta) {
      int ac = static_cast<int>(static_cast<std::int64_t>(a) * c % n);
      int ad = static_cast<int>(static_cast<std::int64_t>(a) * d % n);
      index[static_cast<std::size_t>(ac) * n + ad] = id;
      if (std::pair(ac, ad) < std::pair(best_c, best_d)) {
        best_c = ac;
        best_d = ad;
      }
    }
    out.rep.emplace_back(best_c, best_d);
    out.perm_s.push_back(-1);
    out.perm_t.push_back(-1);
    return id;
  };

  std::deque<int> queue{enter(0, 1)};
  while (!queue.empty()) {
    int id = queue.front();
    queue.pop_front();
    auto [c, d] = out.rep[id];
    // (c, d) S = (d, -c); (c, d) T = (c, c + d).
    std::pair<int, int> images[2] = {{d, (n - c) % n}, {c, (c + d) % n}};
    for (int k = 0; k < 2; ++k) {
      auto [c2, d2] = images[k];
      int& slot = index[static_cast<std::size_t>(c2) * n + d2];
      if (slot < 0) {
        int fresh = enter(c2, d2);
        queue.push_back(fresh);
      }
      (k == 0 ? out.perm_s : out.perm_t)[id] = slot;
    }
  }
  return out;
}

CongruenceInvariants invariants(const CosetAction& rep) {
  CongruenceInvariants inv;
  const int m = static_cast<int>(rep.size());
  inv.mu = m;
  inv.nu2 = inv.nu3 = inv.cusps = 0;
  std::vector<char> seen(m, 0);
  for (int i = 0; i < m; ++i) {
    if (rep.perm_s[i] == i) ++inv.nu2;
    if (rep.perm_t[rep.perm_s[i]] == i) ++inv.nu3;
    if (!seen[i]) {
      ++inv.cusps;
      for (int j = i; !seen[j]; j = rep.perm_t[j]) seen[j] = 1;
    }
  }
  std::int64_t twelve_g_minus_1 = inv.mu - 3 * inv.nu2 - 4 * inv.nu3 - 6 * inv.cusps;
  if (twelve_g_minus_1 % 12 != 0)
    throw std::logic_error("coset invariants violate the genus relation");
  inv.genus = static_cast<int>(twelve_g_minus_1 / 12 + 1);
  return inv;
}

CongruenceInvariants invariants(const DirichletSubgroup& delta) {
  return invariants(coset_action(delta));
}

std::int64_t gamma0_index(std::int64_t level) {
  std::int64_t r = level;
  for (auto p : prime_divisors(level)) r = r / p * (p + 1);
  return r;
}

std::int64_t index_closed_form(const DirichletSubgroup& delta) {
  if (delta.level() == 1) return 1;
  return gamma0_index(delta.level()) * euler_phi(delta.level()) /
         static_cast<std::int64_t>(delta.order());
}

std::int64_t projection_degree(const DirichletSubgroup& small, const DirichletSubgroup& large) {
  if (!small.is_subgroup_of(large))
    throw InputError("projection_degree: " + small.display() + " is not contained in " +
                     large.display());
  return static_cast<std::int64_t>(large.order() / small.order());
}

std::int64_t kim_sarnak_floor(std::int64_t d) { return 12000 * d / 119; }

}  // namespace modgon
