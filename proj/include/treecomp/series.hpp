// Exact truncated power series over the rationals.
//
// Coefficients c_0..c_N are stored as [z^m] of the function, so for an
// exponential generating function the labeled count of size m is m! * c_m.
// Every operation is exact modulo z^{N+1}.
#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace treecomp {

inline constexpr std::size_t kMaxSeriesOrder = 512;

inline mpz_class factorial(unsigned long n) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), n);
  return f;
}

class TruncatedSeries {
 public:
  /// The zero series of order N (N+1 coefficients).
  explicit TruncatedSeries(std::size_t order) : c_(order + 1, mpq_class(0)) {
    if (order > kMaxSeriesOrder) throw std::invalid_argument("series order exceeds cap");
  }

  /// coef * z^power truncated to `order`.
  static TruncatedSeries monomial(const mpq_class& coef, std::size_t power, std::size_t order) {
    TruncatedSeries s(order);
    if (power <= order) s.c_[power] = coef;
    return s;
  }

  std::size_t order() const noexcept { return c_.size() - 1; }
  const mpq_class& operator[](std::size_t m) const { return c_.at(m); }
  mpq_class& operator[](std::size_t m) { return c_.at(m); }
  std::span<const mpq_class> coefficients() const noexcept { return c_; }

  /// m! [z^m], the labeled count when this is an EGF.
  mpq_class labeled_count(std::size_t m) const { return c_.at(m) * mpq_class(factorial(m)); }

  bool is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const mpq_class& x) { return sgn(x) == 0; });
  }

  TruncatedSeries& operator+=(const TruncatedSeries& o) {
    check_order(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  TruncatedSeries& operator-=(const TruncatedSeries& o) {
    check_order(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  TruncatedSeries& operator*=(const mpq_class& k) {
    for (auto& x : c_) x *= k;
    return *this;
  }
  friend TruncatedSeries operator+(TruncatedSeries a, const TruncatedSeries& b) { return a += b; }
  friend TruncatedSeries operator-(TruncatedSeries a, const TruncatedSeries& b) { return a -= b; }
  friend TruncatedSeries operator*(TruncatedSeries a, const mpq_class& k) { return a *= k; }
  friend TruncatedSeries operator-(TruncatedSeries a) { return a *= mpq_class(-1); }

  friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
    a.check_order(b);
    const auto n = a.order();
    TruncatedSeries r(n);
    // Skip zero coefficients: the series here are often sparse (monomials,
    // series in z^k).
    std::vector<std::size_t> nz;
    for (std::size_t j = 0; j <= n; ++j)
      if (sgn(b.c_[j]) != 0) nz.push_back(j);
    mpq_class t;
    for (std::size_t i = 0; i <= n; ++i) {
      if (sgn(a.c_[i]) == 0) continue;
      for (const auto j : nz) {
        if (i + j > n) break;
        t = a.c_[i] * b.c_[j];
        r.c_[i + j] += t;
      }
    }
    return r;
  }

  friend bool operator==(const TruncatedSeries& a, const TruncatedSeries& b) { return a.c_ == b.c_; }

  TruncatedSeries derivative() const {
    TruncatedSeries r(order());
    for (std::size_t m = 1; m <= order(); ++m) r.c_[m - 1] = c_[m] * static_cast<unsigned long>(m);
    return r;
  }

  /// Termwise integral with zero constant term; the top coefficient is dropped.
  TruncatedSeries integral() const {
    TruncatedSeries r(order());
    for (std::size_t m = 0; m < order(); ++m) r.c_[m + 1] = c_[m] / static_cast<unsigned long>(m + 1);
    return r;
  }

  /// 1/f; requires f(0) != 0.
  TruncatedSeries reciprocal() const {
    if (sgn(c_[0]) == 0) throw std::domain_error("reciprocal: zero constant term");
    const auto n = order();
    TruncatedSeries r(n);
    const mpq_class inv0 = 1 / c_[0];
    r.c_[0] = inv0;
    mpq_class acc;
    for (std::size_t m = 1; m <= n; ++m) {
      acc = 0;
      for (std::size_t j = 1; j <= m; ++j)
        if (sgn(c_[j]) != 0) acc += c_[j] * r.c_[m - j];
      r.c_[m] = -acc * inv0;
    }
    return r;
  }

  /// exp(f); requires f(0) = 0. Uses E' = f' E, i.e. m e_m = sum_j j f_j e_{m-j}.
  TruncatedSeries exp() const {
    require_zero_constant("exp");
    const auto n = order();
    TruncatedSeries e(n);
    e.c_[0] = 1;
    mpq_class acc;
    for (std::size_t m = 1; m <= n; ++m) {
      acc = 0;
      for (std::size_t j = 1; j <= m; ++j)
        if (sgn(c_[j]) != 0) acc += c_[j] * static_cast<unsigned long>(j) * e.c_[m - j];
      e.c_[m] = acc / static_cast<unsigned long>(m);
    }
    return e;
  }

  /// ln(1/(1-f)); requires f(0) = 0. Integrates f'/(1-f).
  TruncatedSeries log_inverse_one_minus() const {
    require_zero_constant("log_inverse_one_minus");
    TruncatedSeries one_minus = -(*this);
    one_minus.c_[0] += 1;
    return (derivative() * one_minus.reciprocal()).integral();
  }

  /// f(g); requires g(0) = 0. Horner scheme.
  TruncatedSeries compose(const TruncatedSeries& g) const {
    check_order(g);
    g.require_zero_constant("compose");
    TruncatedSeries r(order());
    for (std::size_t m = order() + 1; m-- > 0;) {
      r = r * g;
      r.c_[0] += c_[m];
    }
    return r;
  }

 private:
  void check_order(const TruncatedSeries& o) const {
    if (o.order() != order()) throw std::invalid_argument("series order mismatch");
  }
  void require_zero_constant(const char* op) const {
    if (sgn(c_[0]) != 0) throw std::domain_error(std::string(op) + ": nonzero constant term");
  }

  std::vector<mpq_class> c_;
};

}  // namespace treecomp
