#pragma once

// Linear-block plans shared by the F_q point enumeration and the rational
// point search. Internal header.

#include <tuple>
#include <utility>
#include <vector>

#include "modgon/linalg.hpp"

namespace modgon::detail {

template <class F>
using Term = std::tuple<int, int, typename F::Elem>;  // (i, j, coeff), i <= j

template <class F>
struct BlockPlan {
  int solved = 0;  // size s of the trailing block y, 0 if none
  std::vector<std::vector<Term<F>>> combos;
};

// With x_i = 0 for i < lead, the largest trailing block y (2 <= s <= g-lead-1)
// having at least s independent combinations of the quadrics that contain
// no monomial quadratic in y.
template <class F>
BlockPlan<F> block_plan(const F& f, const std::vector<std::vector<Term<F>>>& quads, int g, int lead) {
  for (int s = g - lead - 1; s >= 2; --s) {
    const int first_y = g - s;
    std::vector<std::pair<int, int>> order;
    for (int i = first_y; i < g; ++i)
      for (int j = i; j < g; ++j) order.emplace_back(i, j);
    const std::size_t yy = order.size();
    for (int i = lead; i < first_y; ++i)
      for (int j = i; j < g; ++j) order.emplace_back(i, j);
    std::vector<int> col(static_cast<std::size_t>(g * g), -1);
    for (std::size_t c = 0; c < order.size(); ++c)
      col[static_cast<std::size_t>(order[c].first * g + order[c].second)] = static_cast<int>(c);
    Matrix<F> qm;
    for (const auto& q : quads) {
      Row<F> row(order.size(), f.zero());
      for (const auto& [i, j, c] : q)
        if (i >= lead) row[static_cast<std::size_t>(col[static_cast<std::size_t>(i * g + j)])] = c;
      qm.push_back(std::move(row));
    }
    auto e = rref(f, std::move(qm));
    BlockPlan<F> plan;
    for (std::size_t r = 0; r < e.rows.size(); ++r) {
      if (e.pivots[r] < yy) continue;
      std::vector<Term<F>> terms;
      for (std::size_t c = 0; c < order.size(); ++c)
        if (!f.is_zero(e.rows[r][c])) terms.emplace_back(order[c].first, order[c].second, e.rows[r][c]);
      plan.combos.push_back(std::move(terms));
    }
    if (static_cast<int>(plan.combos.size()) >= s) {
      plan.solved = s;
      return plan;
    }
  }
  return {};
}

}  // namespace modgon::detail
