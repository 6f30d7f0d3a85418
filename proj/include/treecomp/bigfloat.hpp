// Minimal RAII wrapper over an MPFR float with explicit precision.
#pragma once

#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <string>
#include <utility>

#include <gmpxx.h>
#include <mpfr.h>

namespace treecomp {

class Real {
 public:
  explicit Real(mpfr_prec_t bits) {
    mpfr_init2(v_, bits);
    mpfr_set_zero(v_, 1);
  }
  Real(const mpq_class& q, mpfr_prec_t bits) {
    mpfr_init2(v_, bits);
    mpfr_set_q(v_, q.get_mpq_t(), MPFR_RNDN);
  }
  Real(long x, mpfr_prec_t bits) {
    mpfr_init2(v_, bits);
    mpfr_set_si(v_, x, MPFR_RNDN);
  }
  Real(const Real& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  Real(Real&& o) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, o.v_);
  }
  Real& operator=(const Real& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  Real& operator=(Real&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~Real() { mpfr_clear(v_); }

  mpfr_prec_t precision() const noexcept { return mpfr_get_prec(v_); }
  mpfr_ptr get() noexcept { return v_; }
  mpfr_srcptr get() const noexcept { return v_; }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  int sign() const { return mpfr_sgn(v_); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }

  /// Scientific notation with `digits` significant digits.
  std::string to_string(int digits = 40) const {
    char* buf = nullptr;
    mpfr_asprintf(&buf, "%.*Re", digits - 1, v_);
    std::string s(buf);
    mpfr_free_str(buf);
    return s;
  }

  Real& operator+=(const Real& o) { return apply(mpfr_add, o); }
  Real& operator-=(const Real& o) { return apply(mpfr_sub, o); }
  Real& operator*=(const Real& o) { return apply(mpfr_mul, o); }
  Real& operator/=(const Real& o) { return apply(mpfr_div, o); }

  friend Real operator+(Real a, const Real& b) { return a += b; }
  friend Real operator-(Real a, const Real& b) { return a -= b; }
  friend Real operator*(Real a, const Real& b) { return a *= b; }
  friend Real operator/(Real a, const Real& b) { return a /= b; }
  friend Real operator-(Real a) {
    mpfr_neg(a.v_, a.v_, MPFR_RNDN);
    return a;
  }

  friend bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
  friend bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.v_, b.v_) != 0; }
  friend bool operator<=(const Real& a, const Real& b) { return mpfr_lessequal_p(a.v_, b.v_) != 0; }
  friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }

  friend Real abs(Real a) {
    mpfr_abs(a.v_, a.v_, MPFR_RNDN);
    return a;
  }
  friend Real exp(Real a) {
    mpfr_exp(a.v_, a.v_, MPFR_RNDN);
    return a;
  }
  friend Real log1p(Real a) {
    mpfr_log1p(a.v_, a.v_, MPFR_RNDN);
    return a;
  }
  friend Real expm1(Real a) {
    mpfr_expm1(a.v_, a.v_, MPFR_RNDN);
    return a;
  }
  /// log2|a|, for order-of-magnitude checks.
  friend double log2_abs(const Real& a) {
    long e = 0;
    const double m = mpfr_get_d_2exp(&e, a.v_, MPFR_RNDN);
    return std::log2(m < 0 ? -m : m) + static_cast<double>(e);
  }

  /// (1+eps)^power computed as exp(power * log1p(eps)), so that 1+eps is
  /// never rounded even when eps is far below the working precision.
  friend Real pow1p(const Real& eps, unsigned long power) {
    Real r = log1p(eps);
    mpfr_mul_ui(r.v_, r.v_, power, MPFR_RNDN);
    mpfr_exp(r.v_, r.v_, MPFR_RNDN);
    return r;
  }

  /// Multiplies by 2^e.
  Real& scale2(long e) {
    mpfr_mul_2si(v_, v_, e, MPFR_RNDN);
    return *this;
  }

 private:
  Real& apply(int (*op)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t), const Real& o) {
    if (mpfr_get_prec(o.v_) > mpfr_get_prec(v_)) mpfr_prec_round(v_, mpfr_get_prec(o.v_), MPFR_RNDN);
    op(v_, v_, o.v_, MPFR_RNDN);
    return *this;
  }

  mpfr_t v_;
};

}  // namespace treecomp
