#include "modgon/field.hpp"

#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "modgon/errors.hpp"
#include "modgon/units.hpp"

namespace modgon {

namespace {

// Packs coefficient vectors base p, low degree first.
std::uint32_t pack(const std::vector<std::uint32_t>& c, std::uint32_t p) {
  std::uint32_t v = 0;
  for (std::size_t i = c.size(); i-- > 0;) v = v * p + c[i];
  return v;
}

std::vector<std::uint32_t> unpack(std::uint32_t v, std::uint32_t p, std::uint32_t k) {
  std::vector<std::uint32_t> c(k);
  for (std::uint32_t i = 0; i < k; ++i) {
    c[i] = v % p;
    v /= p;
  }
  return c;
}

}  // namespace

GaloisField::GaloisField(std::uint32_t p, std::uint32_t k) : p_(p), k_(k) {
  if (!is_prime(p) || k == 0) throw InputError("invalid field F_" + std::to_string(p) + "^" + std::to_string(k));
  std::uint64_t q = 1;
  for (std::uint32_t i = 0; i < k; ++i) q *= p;
  if (q > (1u << 22)) throw BudgetExceeded("field of order " + std::to_string(q) + " is too large");
  q_ = static_cast<std::uint32_t>(q);
  m_ = q_ - 1;
  half_ = (p == 2) ? 0 : m_ / 2;

  exp_.assign(m_, 0);
  log_.assign(q_, m_);
  // Try monic polynomials x^k + c_{k-1} x^{k-1} + ... + c_0 in increasing
  // packed order until x has multiplicative order q-1 modulo it.
  for (std::uint32_t tail = 0; tail < q_; ++tail) {
    auto c = unpack(tail, p, k);
    if (k > 1 && c[0] == 0) continue;
    std::fill(log_.begin(), log_.end(), m_);
    std::vector<std::uint32_t> cur(k, 0);
    cur[0] = 1;
    bool ok = true;
    for (std::uint32_t i = 0; i < m_; ++i) {
      std::uint32_t v = pack(cur, p);
      if (log_[v] != m_ || v == 0) {
        ok = false;
        break;
      }
      log_[v] = i;
      exp_[i] = v;
      // cur *= x modulo x^k + sum c_j x^j.
      std::uint32_t top = cur[k - 1];
      for (std::uint32_t j = k - 1; j > 0; --j) cur[j] = cur[j - 1];
      cur[0] = 0;
      // x^k = -sum_j c_j x^j.
      for (std::uint32_t j = 0; j < k; ++j)
        cur[j] = static_cast<std::uint32_t>((cur[j] + static_cast<std::uint64_t>(p - c[j]) * top) % p);
    }
    if (!ok || pack(cur, p) != 1) continue;
    modulus_ = c;
    modulus_.push_back(1);
    break;
  }
  if (modulus_.empty()) throw std::logic_error("no primitive polynomial found");

  zech_.assign(m_, m_);
  for (std::uint32_t n = 0; n < m_; ++n) {
    auto c = unpack(exp_[n], p, k);
    c[0] = (c[0] + 1) % p;
    zech_[n] = log_[pack(c, p)];
  }
}

GaloisField::Elem GaloisField::pow(Elem a, std::uint64_t e) const {
  if (e == 0) return one();
  if (a == m_) return m_;
  return static_cast<Elem>(static_cast<unsigned __int128>(a) * e % m_);
}

GaloisField::Elem GaloisField::from_int(std::int64_t n) const {
  std::int64_t r = n % static_cast<std::int64_t>(p_);
  if (r < 0) r += p_;
  return log_[static_cast<std::uint32_t>(r)];
}

GaloisField::Elem GaloisField::frobenius(Elem a, std::uint32_t j) const {
  if (a == m_) return m_;
  std::uint64_t f = 1;
  for (std::uint32_t i = 0; i < j % k_; ++i) f = f * p_ % m_;
  if (m_ == 1) return 0;
  return static_cast<Elem>(a * f % m_);
}

std::vector<std::uint32_t> GaloisField::coefficients(Elem a) const {
  if (a == m_) return std::vector<std::uint32_t>(k_, 0);
  return unpack(exp_[a], p_, k_);
}

GaloisField::Elem GaloisField::from_coefficients(const std::vector<std::uint32_t>& c) const {
  std::vector<std::uint32_t> r(k_, 0);
  for (std::size_t i = 0; i < c.size() && i < k_; ++i) r[i] = c[i] % p_;
  return log_[pack(r, p_)];
}

std::string GaloisField::name() const {
  std::string s = "F_" + std::to_string(q_);
  if (k_ == 1) return s;
  s += "=F_" + std::to_string(p_) + "[a]/(";
  bool first = true;
  for (std::size_t i = modulus_.size(); i-- > 0;) {
    std::uint32_t c = modulus_[i];
    if (c == 0) continue;
    if (!first) s += "+";
    first = false;
    if (i == 0) {
      s += std::to_string(c);
      continue;
    }
    if (c != 1) s += std::to_string(c);
    s += "a";
    if (i > 1) s += "^" + std::to_string(i);
  }
  return s + ")";
}

std::string GaloisField::format(Elem a) const {
  if (a == m_) return "0";
  if (k_ == 1) return std::to_string(exp_[a]);
  if (a == 0) return "1";
  if (a == 1) return "a";
  return "a^" + std::to_string(a);
}

std::shared_ptr<const GaloisField> galois_field(std::uint32_t p, std::uint32_t k) {
  static std::mutex mu;
  static std::map<std::pair<std::uint32_t, std::uint32_t>, std::shared_ptr<const GaloisField>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{p, k}];
  if (!slot) slot = std::make_shared<const GaloisField>(p, k);
  return slot;
}

std::uint32_t embedding_multiplier(const GaloisField& small, const GaloisField& big) {
  if (small.characteristic() != big.characteristic() || big.degree() % small.degree() != 0)
    throw InputError("no embedding " + small.name() + " -> " + big.name());
  const std::uint32_t ms = small.order() - 1, mb = big.order() - 1;
  if (ms == 0) return 0;
  const std::uint32_t step = mb / ms;
  const auto& f = small.modulus();
  for (std::uint32_t u = 1; u < ms || u == 1; ++u) {
    if (std::gcd(u, ms) != 1) continue;
    std::uint32_t t = step * u;
    // Horner evaluation of f at a_big^t.
    GaloisField::Elem acc = big.zero();
    for (std::size_t i = f.size(); i-- > 0;) {
      acc = big.mul(acc, t % mb);
      acc = big.add(acc, big.from_int(f[i]));
    }
    if (big.is_zero(acc)) return t % mb;
  }
  throw std::logic_error("embedding search failed");
}

}  // namespace modgon
