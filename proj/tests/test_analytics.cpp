#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "treecomp/analytics.hpp"
#include "treecomp/enumerator.hpp"
#include "treecomp/sampler.hpp"

using namespace treecomp;

namespace {

mpq_class inv_fact(unsigned long m) { return mpq_class(1) / mpq_class(factorial(m)); }

/// Exact evaluation of a truncated series at a rational point.
mpq_class evaluate(const TruncatedSeries& s, const mpq_class& z) {
  mpq_class acc = 0;
  for (std::size_t m = s.order() + 1; m-- > 0;) acc = acc * z + s[m];
  return acc;
}

/// Fraction of the uniform family of size n that avoids `t` as a fringe shape.
mpq_class avoidance_bruteforce(Family f, const Shape& t, std::size_t n) {
  unsigned long avoid = 0, total = 0;
  auto visit = [&](const LabeledTree& tree) {
    bool hit = false;
    for (std::uint32_t v = 0; v < tree.size() && !hit; ++v) hit = shape_of(tree, v) == t;
    avoid += !hit;
    ++total;
  };
  if (f == Family::Recursive) for_each_recursive(n, visit);
  else for_each_bst(n, visit);
  mpq_class r(avoid, total);
  r.canonicalize();
  return r;
}

}  // namespace

TEST(Series, ElementaryExpansions) {
  constexpr std::size_t N = 30;
  const auto z = TruncatedSeries::monomial(1, 1, N);
  const auto e = z.exp();
  for (unsigned long m = 0; m <= N; ++m) EXPECT_EQ(e[m], inv_fact(m));
  const auto lg = z.log_inverse_one_minus();
  EXPECT_EQ(lg[0], 0);
  for (unsigned long m = 1; m <= N; ++m) EXPECT_EQ(lg[m], mpq_class(1, m));
  auto one_minus_z = -z;
  one_minus_z[0] += 1;
  const auto geo = one_minus_z.reciprocal();
  for (std::size_t m = 0; m <= N; ++m) EXPECT_EQ(geo[m], 1);
  // (exp - 1) o ln(1/(1-z)) = z/(1-z).
  auto em1 = e;
  em1[0] = 0;
  const auto c = em1.compose(lg);
  EXPECT_EQ(c[0], 0);
  for (std::size_t m = 1; m <= N; ++m) EXPECT_EQ(c[m], 1);
  EXPECT_EQ(e.derivative().integral()[N], e[N]);
  for (std::size_t m = 1; m < N; ++m) EXPECT_EQ(e.derivative().integral()[m], e[m]);
  EXPECT_EQ((e * geo)[2], mpq_class(5, 2));
  EXPECT_EQ(e.labeled_count(5), 1);
}

TEST(Series, Errors) {
  EXPECT_THROW(TruncatedSeries(kMaxSeriesOrder + 1), std::invalid_argument);
  const auto one = TruncatedSeries::monomial(1, 0, 5);
  EXPECT_THROW(one.exp(), std::domain_error);
  EXPECT_THROW(one.log_inverse_one_minus(), std::domain_error);
  EXPECT_THROW(TruncatedSeries(5).reciprocal(), std::domain_error);
  EXPECT_THROW(one + TruncatedSeries(6), std::invalid_argument);
  EXPECT_THROW(one.compose(one), std::domain_error);
}

TEST(Weight, Examples) {
  EXPECT_EQ(weight(path_shape(ShapeMode::PlaneBinary, 3, 0)).w, mpq_class(1, 6));
  EXPECT_EQ(weight(cherry_shape(ShapeMode::PlaneBinary)).w, mpq_class(1, 3));
  std::multiset<mpq_class> ws;
  mpq_class sum = 0;
  for (const auto& s : enumerate_shapes(ShapeMode::Polya, 4)) {
    ws.insert(weight(s).w);
    sum += weight(s).w;
  }
  EXPECT_EQ(ws, (std::multiset<mpq_class>{mpq_class(1, 24), mpq_class(1, 24), mpq_class(1, 24), mpq_class(1, 8)}));
  EXPECT_EQ(sum, mpq_class(1, 4));
  // Plane binary weights are reciprocal products of fringe sizes.
  for (const auto& s : enumerate_shapes(ShapeMode::PlaneBinary, 7)) {
    mpz_class prod = 1;
    for (const auto f : fringe_sizes(s)) prod *= f;
    ASSERT_EQ(weight(s).w, mpq_class(1) / mpq_class(prod));
  }
}

TEST(SeriesT, Coefficients) {
  const auto r = series_T(Family::Recursive, 8), b = series_T(Family::Bst, 8);
  EXPECT_EQ(r[5], mpq_class(1, 5));
  EXPECT_EQ(r.labeled_count(5), 24);
  EXPECT_EQ(b[3], 1);
  EXPECT_EQ(b.labeled_count(3), 6);
  EXPECT_EQ(r[0], 0);
  EXPECT_EQ(b[0], 0);
}

TEST(SeriesS, Examples) {
  const auto p2 = path_shape(ShapeMode::Polya, 2);
  EXPECT_EQ(series_S_t(Family::Recursive, p2, 6).labeled_count(3), 1);
  EXPECT_EQ(series_S_t(Family::Bst, cherry_shape(ShapeMode::PlaneBinary), 6).labeled_count(3), 4);
  EXPECT_TRUE(series_S_t(Family::Recursive, Shape::leaf(ShapeMode::Polya), 50).is_zero());
  EXPECT_TRUE(series_S_t(Family::Bst, Shape::leaf(ShapeMode::PlaneBinary), 50).is_zero());
  EXPECT_THROW(series_S_t(Family::Bst, p2, 5), std::invalid_argument);
}

TEST(SeriesS, MatchesExhaustiveAvoidance) {
  for (const auto f : {Family::Recursive, Family::Bst}) {
    const auto mode = mode_of(f);
    for (std::uint32_t k = 1; k <= 4; ++k)
      for (const auto& t : enumerate_shapes(mode, k))
        for (std::size_t n = 1; n <= 7; ++n)
          ASSERT_EQ(coefficient_ratio_check(f, t, n), avoidance_bruteforce(f, t, n))
              << t.encoding() << " n=" << n;
  }
}

TEST(SeriesS, CoefficientsBetweenZeroAndT) {
  for (const auto f : {Family::Recursive, Family::Bst}) {
    const auto t = series_T(f, 40);
    for (std::uint32_t k = 2; k <= 5; ++k)
      for (const auto& shape : enumerate_shapes(mode_of(f), k)) {
        const auto s = series_S_t(f, shape, 40);
        for (std::size_t m = 0; m <= 40; ++m) {
          ASSERT_GE(s[m], 0);
          ASSERT_LE(s[m], t[m]);
        }
      }
  }
}

TEST(RatioCheck, Examples) {
  EXPECT_EQ(coefficient_ratio_check(Family::Recursive, path_shape(ShapeMode::Polya, 2), 3), mpq_class(1, 2));
  EXPECT_EQ(coefficient_ratio_check(Family::Bst, cherry_shape(ShapeMode::PlaneBinary), 3), mpq_class(2, 3));
  for (std::size_t n = 1; n <= 10; ++n)
    EXPECT_EQ(coefficient_ratio_check(Family::Bst, Shape::leaf(ShapeMode::PlaneBinary), n), 0);
}

TEST(ExpectedSeries, ExamplesAndGuard) {
  EXPECT_EQ(expected_size_series(Family::Recursive, 2), 2);
  EXPECT_EQ(expected_size_series(Family::Recursive, 3), mpq_class(5, 2));
  EXPECT_EQ(expected_size_series(Family::Bst, 3), mpq_class(8, 3));
  EXPECT_THROW(expected_size_series(Family::Bst, 13), GuardError);
  EXPECT_THROW(expected_size_series(Family::Bst, 0), GuardError);
}

TEST(USeries, InitialValuesAndOdeResidual) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto k = 2 + s % 7;
    const auto shape = shape_of(sample_bst(k, s));
    const auto u = u_series(shape, 120);
    ASSERT_EQ(u[0], -1);
    ASSERT_EQ(u[1], 0);
    const auto ws = weight(shape);
    // u'' - 2u' + u - w k z^{k-1} u, exact through order 118.
    const auto d1 = u.derivative(), d2 = d1.derivative();
    const auto r = d2 - d1 * mpq_class(2) + u - TruncatedSeries::monomial(ws.w * k, k - 1, 120) * u;
    for (std::size_t m = 0; m + 2 <= 120; ++m) ASSERT_EQ(r[m], 0) << "k=" << k << " m=" << m;
  }
  EXPECT_THROW(u_series(Shape::leaf(ShapeMode::PlaneBinary), 10), std::invalid_argument);
  EXPECT_THROW(u_series(path_shape(ShapeMode::Polya, 3), 10), std::invalid_argument);
}

TEST(GRoot, K2Example) {
  // G(z) = int_0^z exp(-v^2/2) dv; G(1.5) - G(1) > 1/6 and the root is below 1.5.
  auto g = [](double z) { return std::sqrt(M_PI / 2) * std::erf(z / std::sqrt(2.0)); };
  EXPECT_GT(g(1.5) - g(1.0), 1.0 / 6);
  const auto r = g_root(2, mpq_class(1, 2));
  const double eps = r.epsilon.to_double();
  EXPECT_GT(eps, 0);
  EXPECT_LT(eps, 0.5);
  EXPECT_NEAR(g(1 + eps), 1.0, 1e-14);
  EXPECT_LT(log2_abs(r.residual), -100);
}

TEST(GRoot, MatchesThreeTermExpansion) {
  for (std::uint32_t k : {6u, 8u, 12u}) {
    const auto shape = path_shape(ShapeMode::Polya, k);
    const auto w = weight(shape).w;
    const auto r = g_root(shape);
    const auto wp = r.epsilon.precision();
    const Real predicted(mpq_class(g_root_expansion(k, w) - 1), wp);
    // Truncation leaves an O(w^4) term, so the relative error is Theta(w^3):
    // small enough to confirm the third coefficient, large enough to be real.
    const double rel = (abs(r.epsilon - predicted) / r.epsilon).to_double();
    const double w3 = std::pow(w.get_d(), 3);
    EXPECT_LT(rel, 2 * w3) << "k=" << k;
    EXPECT_GT(rel, 0.1 * w3) << "k=" << k;
  }
  EXPECT_EQ(g_root_expansion(2, 0), 1);
}

TEST(GRoot, StableUnderBracketPerturbation) {
  for (std::uint32_t k : {3u, 5u}) {
    for (const auto& s : enumerate_shapes(ShapeMode::Polya, k)) {
      const auto w = weight(s).w;
      const auto a = g_root(k, w, 256, 2), b = g_root(k, w, 256, mpq_class(7, 3));
      const double rel = log2_abs(a.epsilon - b.epsilon) - log2_abs(a.epsilon);
      EXPECT_LT(rel, -250) << s.encoding();
      EXPECT_TRUE(a.lo <= a.epsilon && a.epsilon <= a.hi);
    }
  }
}

TEST(GRoot, ErrorsAndPrecisionFloor) {
  EXPECT_THROW(g_root(1, 1), std::invalid_argument);
  EXPECT_THROW(g_root(Shape::leaf(ShapeMode::PlaneBinary)), std::invalid_argument);
  // w = 1/64! puts eps near 2^-300: below the 256-bit floor, fine at 512 bits.
  const auto path64 = path_shape(ShapeMode::Polya, 64);
  EXPECT_THROW(g_root(path64, 256), RootError);
  const auto r = g_root(path64, 512);
  const double norm = (r.epsilon * Real(mpq_class(64 / weight(path64).w), 600)).to_double();
  EXPECT_NEAR(norm, 64.0 / 65, 1e-3);
}

TEST(URoot, CherryK3) {
  const auto cherry = cherry_shape(ShapeMode::PlaneBinary);
  const auto r = u_root(cherry);
  // Inside (0, 2w/k^2) with w = 1/3, i.e. the documented constant c = 1.
  EXPECT_GT(r.epsilon.to_double(), 0);
  EXPECT_LT(r.epsilon.to_double(), 2.0 / 27);
  EXPECT_TRUE(r.residual.is_zero() || log2_abs(r.residual) < -100);
  // Independent sign change of the exact series.
  const auto u = u_series(cherry, 90);
  const double eps = r.epsilon.to_double();
  EXPECT_LT(evaluate(u, mpq_class(1 + eps * (1 - 1e-9))), 0);
  EXPECT_GT(evaluate(u, mpq_class(1 + eps * (1 + 1e-9))), 0);
}

TEST(URoot, SmallestRootAboveOne) {
  // u(1 + x) < 0 on a grid below the root for every k = 4 shape.
  for (const auto& s : enumerate_shapes(ShapeMode::PlaneBinary, 4)) {
    const auto u = u_series(s, 90);
    const double eps = u_root(s).epsilon.to_double();
    for (int i = 0; i < 20; ++i) ASSERT_LT(evaluate(u, mpq_class(1 + eps * i / 20.0)), 0) << s.encoding();
  }
}

TEST(URoot, MaxWeightK7NearFiniteKPrediction) {
  // eps k^2/(2w) approaches 1 like k^2/((k+1)(k+2)); at k = 7 that is 49/72.
  ShapeCatalog cat(ShapeMode::PlaneBinary);
  Shape best;
  mpq_class bw = 0;
  for (const auto& s : cat.of_size(7))
    if (weight(s).w > bw) {
      bw = weight(s).w;
      best = s;
    }
  EXPECT_EQ(bw, mpq_class(1, 63));
  const auto r = u_root(best);
  const double norm = r.epsilon.to_double() * 49 / (2 * bw.get_d());
  EXPECT_NEAR(norm, 49.0 / 72, 0.01);
}

TEST(URoot, Errors) {
  EXPECT_THROW(u_root(1, 1), std::invalid_argument);
  EXPECT_THROW(u_root(Shape::leaf(ShapeMode::PlaneBinary)), std::invalid_argument);
  EXPECT_THROW(u_root(path_shape(ShapeMode::Polya, 3)), std::invalid_argument);
  // Right path of size 60: w = 1/60!, eps far below a 128-bit floor.
  EXPECT_THROW(u_root(path_shape(ShapeMode::PlaneBinary, 60, 1), 128), RootError);
}
