#pragma once

// Dense exact linear algebra over any field type exposing zero/one/add/sub/
// mul/inv/neg/is_zero (GaloisField, RationalField).

#include <cstddef>
#include <optional>
#include <vector>

namespace modgon {

template <class F>
using Row = std::vector<typename F::Elem>;
template <class F>
using Matrix = std::vector<Row<F>>;

template <class F>
struct Rref {
  Matrix<F> rows;                 // nonzero rows, pivot entries equal to one
  std::vector<std::size_t> pivots;  // pivot column per row, increasing
};

// row_target -= factor * row_source, starting at column `from`.
template <class F>
void axpy(const F& f, Row<F>& target, const Row<F>& source, const typename F::Elem& factor,
          std::size_t from = 0) {
  for (std::size_t j = from; j < target.size(); ++j) {
    if (f.is_zero(source[j])) continue;
    target[j] = f.sub(target[j], f.mul(factor, source[j]));
  }
}

template <class F>
Rref<F> rref(const F& f, Matrix<F> m) {
  Rref<F> out;
  if (m.empty()) return out;
  const std::size_t cols = m.front().size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < m.size(); ++c) {
    std::size_t piv = r;
    while (piv < m.size() && f.is_zero(m[piv][c])) ++piv;
    if (piv == m.size()) continue;
    std::swap(m[r], m[piv]);
    auto inv = f.inv(m[r][c]);
    for (std::size_t j = c; j < cols; ++j) m[r][j] = f.mul(m[r][j], inv);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == r || f.is_zero(m[i][c])) continue;
      auto factor = m[i][c];
      axpy(f, m[i], m[r], factor, c);
    }
    out.pivots.push_back(c);
    ++r;
  }
  m.resize(r);
  out.rows = std::move(m);
  return out;
}

template <class F>
std::size_t rank(const F& f, Matrix<F> m) {
  if (m.empty()) return 0;
  const std::size_t cols = m.front().size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < m.size(); ++c) {
    std::size_t piv = r;
    while (piv < m.size() && f.is_zero(m[piv][c])) ++piv;
    if (piv == m.size()) continue;
    std::swap(m[r], m[piv]);
    auto inv = f.inv(m[r][c]);
    for (std::size_t i = r + 1; i < m.size(); ++i) {
      if (f.is_zero(m[i][c])) continue;
      auto factor = f.mul(m[i][c], inv);
      axpy(f, m[i], m[r], factor, c);
    }
    ++r;
  }
  return r;
}

/// Basis of {x : m x = 0}, one vector per free column.
template <class F>
Matrix<F> kernel(const F& f, const Matrix<F>& m, std::size_t cols) {
  Matrix<F> out;
  auto e = rref(f, m);
  std::vector<char> is_pivot(cols, 0);
  for (auto p : e.pivots) is_pivot[p] = 1;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    Row<F> v(cols, f.zero());
    v[free] = f.one();
    for (std::size_t i = 0; i < e.rows.size(); ++i) v[e.pivots[i]] = f.neg(e.rows[i][free]);
    out.push_back(std::move(v));
  }
  return out;
}

/// Solution of a x = b with x determined by a's column count, or nullopt if
/// inconsistent. Free variables are set to zero.
template <class F>
std::optional<Row<F>> solve(const F& f, const Matrix<F>& a, const Row<F>& b) {
  const std::size_t cols = a.empty() ? 0 : a.front().size();
  Matrix<F> aug = a;
  for (std::size_t i = 0; i < aug.size(); ++i) aug[i].push_back(b[i]);
  auto e = rref(f, std::move(aug));
  Row<F> x(cols, f.zero());
  for (std::size_t i = 0; i < e.rows.size(); ++i) {
    if (e.pivots[i] == cols) return std::nullopt;
    x[e.pivots[i]] = e.rows[i][cols];
  }
  return x;
}

/// Incrementally built row echelon form with stack discipline: rows can be
/// pushed and the most recent ones popped, for depth-first searches.
template <class F>
class Echelon {
 public:
  Echelon(const F& f, std::size_t cols) : f_(f), cols_(cols) {}

  // Reduces v against stored rows. Returns false (and stores nothing
  // visible) if v lies in their span.
  bool push(Row<F> v) {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const auto p = pivots_[i];
      if (f_.is_zero(v[p])) continue;
      auto factor = v[p];
      axpy(f_, v, rows_[i], factor, p);
    }
    std::size_t p = 0;
    while (p < cols_ && f_.is_zero(v[p])) ++p;
    if (p == cols_) return false;
    auto inv = f_.inv(v[p]);
    for (std::size_t j = p; j < cols_; ++j) v[j] = f_.mul(v[j], inv);
    rows_.push_back(std::move(v));
    pivots_.push_back(p);
    return true;
  }
  std::size_t size() const { return rows_.size(); }
  void truncate(std::size_t n) {
    rows_.resize(n);
    pivots_.resize(n);
  }

 private:
  const F& f_;
  std::size_t cols_;
  Matrix<F> rows_;
  std::vector<std::size_t> pivots_;
};

}  // namespace modgon
