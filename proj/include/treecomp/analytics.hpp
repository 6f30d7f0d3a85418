// Generating-function side of the analysis.
//
// For a forbidden shape t of size k with l(t) increasing labelings, the
// class S_t of trees with no fringe subtree of shape t has EGF
//
//   recursive trees   S_t = ln(1 / (1 - G(z))) - P_t(z),   G(z) = int_0^z exp(-P_t)
//   binary trees      S_t' = (1 + S_t)^2 - P_t',  S_t(0) = 0
//
// with P_t(z) = l(t) z^k / k!. The expected number of distinct fringe shapes
// in a uniform tree of size n is sum_t (1 - [z^n]S_t / [z^n]T).
//
// The dominant singularity of S_t is 1 + eps: the root of G(z) = 1 in the
// recursive case and the first root > 1 of the entire function u (with
// S_t = -u'/u) in the binary case.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "treecomp/bigfloat.hpp"
#include "treecomp/enumerator.hpp"
#include "treecomp/series.hpp"
#include "treecomp/shape.hpp"

namespace treecomp {

// ---------------------------------------------------------------------------
// Weights

struct WeightedShape {
  Shape shape;
  std::uint32_t k = 0;
  mpz_class labelings;  // l(t)
  mpq_class w;          // l(t) / k!
};

/// Number of increasing labelings.
///   PlaneBinary: k! / prod(fringe subtree sizes)   (hook length formula)
///   Polya: (k-1)! prod l(t_i) / prod k_i!  / prod m_j!  over the root's
///          children t_i, m_j being multiplicities of identical children.
inline mpz_class labelings(const Shape& shape) {
  const auto k = shape.size();
  if (k == 0) throw std::invalid_argument("labelings: empty shape");
  if (shape.mode() == ShapeMode::PlaneBinary) {
    mpz_class hooks = 1;
    for (const auto s : fringe_sizes(shape)) hooks *= s;
    return factorial(k) / hooks;
  }
  mpz_class num = factorial(k - 1);
  mpz_class den = 1;
  const auto kids = shape.children();
  std::size_t run = 0;
  for (std::size_t i = 0; i < kids.size(); ++i) {
    num *= labelings(kids[i]);
    den *= factorial(kids[i].size());
    // Children are canonically sorted, so identical ones are adjacent.
    run = (i > 0 && kids[i] == kids[i - 1]) ? run + 1 : 1;
    den *= run;
  }
  return num / den;
}

inline WeightedShape weight(const Shape& shape) {
  WeightedShape ws{shape, shape.size(), labelings(shape), {}};
  ws.w = mpq_class(ws.labelings, factorial(ws.k));
  ws.w.canonicalize();
  return ws;
}

// ---------------------------------------------------------------------------
// Series

/// T(z): ln(1/(1-z)) for recursive trees, z/(1-z) for binary trees.
inline TruncatedSeries series_T(Family family, std::size_t order) {
  if (order < 1) throw std::invalid_argument("series_T: order must be >= 1");
  TruncatedSeries t(order);
  for (std::size_t m = 1; m <= order; ++m)
    t[m] = family == Family::Recursive ? mpq_class(1, static_cast<unsigned long>(m)) : mpq_class(1);
  return t;
}

/// S_t for a forbidden shape of size k with l labelings. S_t depends on t
/// only through (k, l).
inline TruncatedSeries series_S(Family family, std::uint32_t k, const mpz_class& l, std::size_t order) {
  if (order < 1) throw std::invalid_argument("series_S: order must be >= 1");
  if (k == 0) throw std::invalid_argument("series_S: k must be >= 1");
  if (family == Family::Recursive) {
    mpq_class pk(l, factorial(k));
    pk.canonicalize();
    const auto p = TruncatedSeries::monomial(pk, k, order);
    const auto g = (-p).exp().integral();
    return g.log_inverse_one_minus() - p;
  }
  // Riccati recurrence on labeled counts a_m = m! [z^m] S_t:
  //   a_{m+1} = sum_i C(m,i) b_i b_{m-i} - l [m = k-1],  b_0 = 1, b_i = a_i.
  std::vector<mpz_class> b(order + 1);
  b[0] = 1;
  mpz_class binom, acc, prod;
  for (std::size_t m = 0; m < order; ++m) {
    acc = 0;
    binom = 1;  // C(m, 0)
    for (std::size_t i = 0; i <= m / 2; ++i) {
      prod = b[i] * b[m - i];
      prod *= binom;
      if (i != m - i) prod *= 2;
      acc += prod;
      binom *= static_cast<unsigned long>(m - i);
      binom /= static_cast<unsigned long>(i + 1);
    }
    if (m + 1 == k) acc -= l;
    b[m + 1] = acc;
  }
  TruncatedSeries s(order);
  mpz_class fact = 1;
  for (std::size_t m = 1; m <= order; ++m) {
    fact *= static_cast<unsigned long>(m);
    s[m] = mpq_class(b[m], fact);
    s[m].canonicalize();
  }
  return s;
}

inline TruncatedSeries series_S_t(Family family, const Shape& shape, std::size_t order) {
  if (shape.mode() != mode_of(family)) throw std::invalid_argument("series_S_t: shape mode does not match family");
  return series_S(family, shape.size(), labelings(shape), order);
}

/// [z^n]S_t / [z^n]T: probability that a uniform tree of size n avoids t.
inline mpq_class coefficient_ratio_check(Family family, const Shape& shape, std::size_t n) {
  const auto s = series_S_t(family, shape, n);
  const auto t = series_T(family, n);
  mpq_class r = s[n] / t[n];
  r.canonicalize();
  return r;
}

inline constexpr std::size_t kMaxExpectedSeriesN = 12;

/// Exact E(X_n) by summing 1 - [z^n]S_t/[z^n]T over all shapes of size <= n.
inline mpq_class expected_size_series(Family family, std::size_t n) {
  detail::guard(n >= 1 && n <= kMaxExpectedSeriesN, "expected_size_series: n must be in 1..12");
  ShapeCatalog catalog(mode_of(family));
  const auto t_n = series_T(family, std::max<std::size_t>(n, 1))[n];
  mpq_class total = 0;
  for (std::uint32_t k = 1; k <= n; ++k) {
    // Group shapes by labeling count: S_t only depends on (k, l).
    std::map<mpz_class, unsigned long> groups;
    for (const auto& t : catalog.of_size(k)) ++groups[labelings(t)];
    for (const auto& [l, count] : groups) {
      const auto s = series_S(family, k, l, n);
      total += mpq_class(count) * (1 - s[n] / t_n);
    }
  }
  total.canonicalize();
  return total;
}

// ---------------------------------------------------------------------------
// u(z) for binary trees: u'' - 2u' + (1 - w k z^{k-1}) u = 0, u(0) = -1, u'(0) = 0.

namespace detail {

/// Coefficients of F and G in u = z e^z F(z^{k+1}) - e^z G(z^{k+1}):
///   f_m = c^m / (m! (m+a)_m),  g_m = c^m / (m! (m-a)_m),  c = w k/(k+1)^2, a = 1/(k+1)
/// where (x)_m = x (x-1) ... (x-m+1) is the falling factorial.
struct UCoefficients {
  std::vector<mpq_class> f, g;
};

inline UCoefficients u_coefficients(std::uint32_t k, const mpq_class& w, std::size_t terms) {
  const mpq_class alpha(1, k + 1);
  mpq_class c = w * k / ((k + 1) * (k + 1));
  c.canonicalize();
  UCoefficients out;
  mpq_class cm = 1, mfact = 1, rise_plus = 1, rise_minus = 1;
  for (std::size_t m = 0; m < terms; ++m) {
    if (m > 0) {
      cm *= c;
      mfact *= static_cast<unsigned long>(m);
      // (m+a)_m = (m+a)(m-1+a)...(1+a) = (1+a)(2+a)...(m+a)
      rise_plus *= mpq_class(static_cast<unsigned long>(m)) + alpha;
      rise_minus *= mpq_class(static_cast<unsigned long>(m)) - alpha;
    }
    out.f.push_back(cm / (mfact * rise_plus));
    out.g.push_back(cm / (mfact * rise_minus));
  }
  return out;
}

inline void require_u_shape(const Shape& shape) {
  if (shape.mode() != ShapeMode::PlaneBinary) throw std::invalid_argument("u: plane binary shapes only");
  if (shape.size() < 2) throw std::invalid_argument("u: shape size must be >= 2");
}

}  // namespace detail

/// u(z) from the explicit falling-factorial series.
inline TruncatedSeries u_series_explicit(std::uint32_t k, const mpq_class& w, std::size_t order) {
  const std::size_t terms = order / (k + 1) + 1;
  const auto uc = detail::u_coefficients(k, w, terms);
  TruncatedSeries inner(order);  // z F(z^{k+1}) - G(z^{k+1})
  for (std::size_t m = 0; m < terms; ++m) {
    const auto e = (k + 1) * m;
    if (e <= order) inner[e] -= uc.g[m];
    if (e + 1 <= order) inner[e + 1] += uc.f[m];
  }
  TruncatedSeries ez(order);
  mpz_class fact = 1;
  for (std::size_t m = 0; m <= order; ++m) {
    if (m > 0) fact *= static_cast<unsigned long>(m);
    ez[m] = mpq_class(1) / fact;
  }
  return ez * inner;
}

/// u(z) from the ODE coefficient recurrence
///   (n+2)(n+1) u_{n+2} = 2(n+1) u_{n+1} - u_n + w k u_{n-k+1}.
inline TruncatedSeries u_series_ode(std::uint32_t k, const mpq_class& w, std::size_t order) {
  TruncatedSeries u(order);
  u[0] = -1;
  if (order >= 1) u[1] = 0;
  const mpq_class wk = w * k;
  for (std::size_t n = 0; n + 2 <= order; ++n) {
    mpq_class rhs = 2 * (n + 1) * u[n + 1] - u[n];
    if (n + 1 >= k) rhs += wk * u[n + 1 - k];
    u[n + 2] = rhs / ((n + 2) * (n + 1));
  }
  return u;
}

inline TruncatedSeries u_series(const Shape& shape, std::size_t order) {
  detail::require_u_shape(shape);
  const auto ws = weight(shape);
  return u_series_explicit(ws.k, ws.w, order);
}

// ---------------------------------------------------------------------------
// Singularities

class RootError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RootResult {
  Real rho;       // 1 + eps at the working precision
  Real epsilon;   // carried separately so tiny eps keeps full relative precision
  Real lo, hi;    // bracket on eps: f(lo) < 0 < f(hi)
  Real residual;  // |target function at rho|
  int iterations = 0;
};

inline constexpr mpfr_prec_t kDefaultRootBits = 256;

namespace detail {

/// Safeguarded Newton on an increasing-through-the-root function of eps,
/// starting from a bracket with f(lo) < 0 < f(hi).
template <class Eval>
RootResult bracketed_newton(Eval&& eval, Real lo, Real hi, mpfr_prec_t bits) {
  const int cap = static_cast<int>(4 * bits + 200);
  Real x = lo + hi;
  x.scale2(-1);
  int it = 0;
  for (; it < cap; ++it) {
    auto [f, df] = eval(x);
    if (f.is_zero()) break;
    if (f.sign() < 0) lo = x;
    else hi = x;
    Real tol = abs(x);
    tol.scale2(-(static_cast<long>(bits) - 4));
    Real step = f / df;
    const bool newton_ok = df.sign() > 0;
    if (newton_ok && abs(step) <= tol) {
      x -= step;
      break;
    }
    if (hi - lo <= tol) {
      x = lo + hi;
      x.scale2(-1);
      break;
    }
    Real next = x - step;
    if (!newton_ok || next <= lo || hi <= next) {
      next = lo + hi;
      next.scale2(-1);
    }
    x = std::move(next);
  }
  if (it == cap) throw RootError("root finder did not reach the requested precision within the iteration cap");
  Real rho(1L, bits);
  rho += x;
  auto [f, df] = eval(x);
  return RootResult{rho, x, lo, hi, abs(f), it};
}

inline void require_above_floor(const Real& hi, mpfr_prec_t bits) {
  // rho = 1 + eps must be distinguishable from 1 at the working precision.
  if (log2_abs(hi) < -static_cast<double>(bits - 8))
    throw RootError("eps below the precision floor; raise the working precision");
}

}  // namespace detail

/// Dominant singularity for recursive trees: the root of
///   G(1+eps) - 1 = eps + sum_{l>=1} (-w)^l (1+eps)^{lk+1} / ((lk+1) l!)
/// in (0, 2w/k).
inline RootResult g_root(std::uint32_t k, const mpq_class& w, mpfr_prec_t bits = kDefaultRootBits,
                         const mpq_class& bracket_scale = 2) {
  if (k < 2) throw std::invalid_argument("g_root: k must be >= 2");
  const mpfr_prec_t wp = bits + 32;
  Real lo(0L, wp);
  Real hi(mpq_class(bracket_scale * w / k), wp);
  detail::require_above_floor(hi, bits);
  // Coefficients (-w)^l / ((lk+1) l!) for l >= 1.
  std::vector<Real> coef;
  std::vector<unsigned long> power;
  {
    mpq_class c = 1;
    const Real first(mpq_class(w / (k + 1)), wp);
    for (unsigned long l = 1; l < 10000; ++l) {
      c *= -w / l;
      Real term(mpq_class(c / (l * k + 1)), wp);
      coef.push_back(term);
      power.push_back(l * k + 1);
      Real rel = abs(term) / first;
      if (log2_abs(rel) < -static_cast<double>(wp + 16)) break;
    }
  }
  auto eval = [&](const Real& eps) {
    Real f = eps;
    Real df(1L, wp);
    for (std::size_t i = 0; i < coef.size(); ++i) {
      f += coef[i] * pow1p(eps, power[i]);
      df += coef[i] * Real(static_cast<long>(power[i]), wp) * pow1p(eps, power[i] - 1);
    }
    return std::pair{f, df};
  };
  if (eval(hi).first.sign() <= 0) throw RootError("g_root: no sign change on the initial bracket");
  return detail::bracketed_newton(eval, lo, hi, wp);
}

inline RootResult g_root(const Shape& shape, mpfr_prec_t bits = kDefaultRootBits) {
  if (shape.mode() != ShapeMode::Polya) throw std::invalid_argument("g_root: Polya shapes only");
  const auto ws = weight(shape);
  return g_root(ws.k, ws.w, bits);
}

/// Dominant singularity for binary trees: the first root > 1 of u, located
/// through u(z) e^{-z} = eps F(z) + sum_{m>=1} (f_m - g_m) z^{(k+1)m},
/// z = 1 + eps, bracketed by [0, c w/k^2] with c doubled until a sign change.
inline RootResult u_root(std::uint32_t k, const mpq_class& w, mpfr_prec_t bits = kDefaultRootBits,
                         const mpq_class& initial_scale = 2) {
  if (k < 2) throw std::invalid_argument("u_root: k must be >= 2");
  const mpfr_prec_t wp = bits + 32;
  std::size_t terms = 8;
  detail::UCoefficients uc;
  // Grow the term count until the tail coefficient is negligible.
  for (;;) {
    uc = detail::u_coefficients(k, w, terms);
    const Real last(mpq_class(uc.g.back()), wp);
    const Real first(mpq_class(uc.g[1] - uc.f[1]), wp);
    if (log2_abs(last) - log2_abs(first) < -static_cast<double>(wp + 16) || terms > 4096) break;
    terms *= 2;
  }
  std::vector<Real> f, d;
  for (std::size_t m = 0; m < terms; ++m) {
    f.emplace_back(uc.f[m], wp);
    d.emplace_back(mpq_class(uc.f[m] - uc.g[m]), wp);
  }
  const unsigned long step = k + 1;
  auto eval = [&](const Real& eps) {
    // H(eps) = eps F + D,   H' = F + eps F' + D'   (derivatives in z).
    Real big_f(0L, wp), big_fp(0L, wp), big_d(0L, wp), big_dp(0L, wp);
    for (std::size_t m = 0; m < terms; ++m) {
      const unsigned long e = step * m;
      const Real zp = pow1p(eps, e);
      big_f += f[m] * zp;
      if (m > 0) {
        big_d += d[m] * zp;
        const Real zpm1 = pow1p(eps, e - 1);
        const Real em(static_cast<long>(e), wp);
        big_fp += f[m] * em * zpm1;
        big_dp += d[m] * em * zpm1;
      }
    }
    Real h = eps * big_f + big_d;
    Real dh = big_f + eps * big_fp + big_dp;
    return std::pair{h, dh};
  };
  Real lo(0L, wp);
  mpq_class scale = initial_scale;
  Real hi(mpq_class(scale * w / (k * k)), wp);
  detail::require_above_floor(hi, bits);
  int expansions = 0;
  while (eval(hi).first.sign() <= 0) {
    if (++expansions > 40) throw RootError("u_root: no sign change found within the expansion cap");
    lo = hi;
    scale *= 2;
    hi = Real(mpq_class(scale * w / (k * k)), wp);
  }
  auto r = detail::bracketed_newton(eval, lo, hi, wp);
  // Residual reported for u itself: |e^{rho} H(eps)|.
  r.residual = r.residual * exp(r.rho);
  return r;
}

inline RootResult u_root(const Shape& shape, mpfr_prec_t bits = kDefaultRootBits) {
  detail::require_u_shape(shape);
  const auto ws = weight(shape);
  return u_root(ws.k, ws.w, bits);
}

/// Three-term expansion of the recursive-tree singularity in powers of w:
///   1 + w/(k+1) + w^2 (3k+1)/((k+1)(4k+2)) + w^3 (29k^3+32k^2+10k+1)/(6 (k+1)^2 (2k+1)(3k+1)).
inline mpq_class g_root_expansion(std::uint32_t k, const mpq_class& w) {
  const mpq_class kk(k);
  mpq_class r = 1 + w / (kk + 1) + w * w * (3 * kk + 1) / ((kk + 1) * (4 * kk + 2)) +
                w * w * w * (29 * kk * kk * kk + 32 * kk * kk + 10 * kk + 1) /
                    (6 * (kk + 1) * (kk + 1) * (2 * kk + 1) * (3 * kk + 1));
  r.canonicalize();
  return r;
}

}  // namespace treecomp
