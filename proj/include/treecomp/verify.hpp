// Acceptance checks, shared by `treecomp verify` and the acceptance test.
// Each check recomputes its claim from scratch and reports pass/fail with a
// one-line detail.
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "treecomp/analytics.hpp"
#include "treecomp/cbst.hpp"
#include "treecomp/enumerator.hpp"
#include "treecomp/experiments.hpp"
#include "treecomp/pilot_bands.hpp"
#include "treecomp/sampler.hpp"

namespace treecomp {

/// Master seed of the statistical checks; distinct from kPilotSeed so the
/// bands are tested on fresh draws.
inline constexpr std::uint64_t kVerifySeed = 0x7ee5eedULL;

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

struct VerifyOptions {
  unsigned jobs = 0;
  std::uint64_t seed = kVerifySeed;
};

namespace verify_detail {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail.str("");
      else detail << "; ";
      detail << "FAILED " << what;
      pass = false;
    }
  }
};

inline std::string str(const mpq_class& q) { return q.get_str(); }

inline std::string num(double x, int digits = 4) {
  std::ostringstream os;
  os << std::setprecision(digits) << x;
  return os.str();
}

// 1. Exact E(X_n): series sum vs exhaustive enumeration.
inline Outcome expected_size_oracle() {
  Outcome o;
  for (const auto f : {Family::Recursive, Family::Bst})
    for (std::size_t n = 1; n <= 8; ++n) {
      const auto a = expected_size_series(f, n), b = expected_size_bruteforce(f, n);
      o.require(a == b, std::string(family_name(f)) + " n=" + std::to_string(n) + ": " + str(a) + " vs " + str(b));
    }
  const auto r3 = expected_size_series(Family::Recursive, 3), b3 = expected_size_series(Family::Bst, 3);
  o.require(r3 == mpq_class(5, 2), "recursive n=3 is " + str(r3));
  o.require(b3 == mpq_class(8, 3), "bst n=3 is " + str(b3));
  if (o.pass)
    o.detail << "series = enumeration for n=1..8, both families; E(X_3) = " << str(r3) << " (recursive), " << str(b3)
             << " (bst); E(X_8) = " << str(expected_size_series(Family::Recursive, 8)) << ", "
             << str(expected_size_series(Family::Bst, 8));
  return o;
}

// 2. Labeling counts vs brute force; sum of Polya labelings.
inline Outcome labeling_oracle() {
  Outcome o;
  std::size_t checked = 0;
  for (const auto m : {ShapeMode::Polya, ShapeMode::PlaneBinary}) {
    ShapeCatalog cat(m);
    for (std::uint32_t k = 1; k <= 8; ++k)
      for (const auto& s : cat.of_size(k)) {
        const auto l = labelings(s);
        o.require(l == labelings_bruteforce(s), "l(" + s.encoding() + ") = " + l.get_str());
        ++checked;
      }
  }
  ShapeCatalog polya(ShapeMode::Polya);
  for (std::uint32_t k = 1; k <= 9; ++k) {
    mpz_class sum = 0;
    for (const auto& s : polya.of_size(k)) sum += labelings(s);
    o.require(sum == factorial(k - 1), "sum l over Polya k=" + std::to_string(k) + " is " + sum.get_str());
  }
  if (o.pass) o.detail << checked << " shapes (k<=8, both modes) match brute force; sum l = (k-1)! for k<=9";
  return o;
}

// 3. Weight sums.
inline Outcome weight_sum_oracle() {
  Outcome o;
  for (const auto m : {ShapeMode::Polya, ShapeMode::PlaneBinary}) {
    ShapeCatalog cat(m);
    for (std::uint32_t k = 1; k <= 10; ++k) {
      mpq_class sum = 0;
      for (const auto& s : cat.of_size(k)) sum += weight(s).w;
      const mpq_class want = m == ShapeMode::Polya ? mpq_class(1, k) : mpq_class(1);
      o.require(sum == want, std::string(mode_name(m)) + " k=" + std::to_string(k) + " sum w = " + str(sum));
    }
  }
  if (o.pass) o.detail << "sum w = 1/k (Polya) and 1 (plane binary) exactly for k=1..10";
  return o;
}

// 4. Maximal binary weights and the 1/2^{k-2} bound.
inline Outcome max_weight_oracle() {
  Outcome o;
  const mpq_class table[] = {1, mpq_class(1, 2), mpq_class(1, 3), mpq_class(1, 8), mpq_class(1, 15), mpq_class(1, 36),
                             mpq_class(1, 63)};
  std::size_t checked = 0;
  for (const auto m : {ShapeMode::PlaneBinary, ShapeMode::Polya}) {
    ShapeCatalog cat(m);
    for (std::uint32_t k = 1; k <= 12; ++k) {
      mpq_class mx = 0;
      mpq_class bound(4);
      bound /= mpz_class(1) << k;  // 1 / 2^{k-2}
      for (const auto& s : cat.of_size(k)) {
        const auto w = weight(s).w;
        mx = std::max(mx, w);
        ++checked;
        if (w > bound) o.require(false, std::string(mode_name(m)) + " " + s.encoding() + " w=" + str(w));
      }
      if (m == ShapeMode::PlaneBinary && k <= 7)
        o.require(mx == table[k - 1], "max binary weight k=" + std::to_string(k) + " is " + str(mx));
    }
  }
  if (o.pass)
    o.detail << "max binary w for k=1..7 = 1,1/2,1/3,1/8,1/15,1/36,1/63; w <= 1/2^(k-2) on all " << checked
             << " shapes k<=12 (both modes)";
  return o;
}

// 5. u(z): explicit series vs ODE recurrence.
inline Outcome u_series_oracle(std::uint64_t seed) {
  Outcome o;
  Xoshiro256 rng(derive_seed(seed, 5));
  for (int i = 0; i < 50; ++i) {
    const auto k = 2 + rng.uniform_below(9);  // 2..10
    const auto shape = shape_of(sample_bst(k, rng.next()));
    const auto ws = weight(shape);
    const auto a = u_series_explicit(ws.k, ws.w, 200);
    const auto b = u_series_ode(ws.k, ws.w, 200);
    o.require(a == b, "shape " + shape.encoding());
    o.require(a[0] == -1 && a[1] == 0, "initial values for " + shape.encoding());
  }
  if (o.pass) o.detail << "50 random binary shapes k=2..10: explicit = ODE to order 200, u(0)=-1, u'(0)=0";
  return o;
}

// 6. Avoiding the leaf is impossible.
inline Outcome leaf_series_oracle() {
  Outcome o;
  for (const auto f : {Family::Recursive, Family::Bst})
    o.require(series_S_t(f, Shape::leaf(mode_of(f)), 200).is_zero(), std::string(family_name(f)) + " S_leaf != 0");
  if (o.pass) o.detail << "S_leaf = 0 to order 200, both families";
  return o;
}

// 7. Coefficient ratio of S_t vs the located singularity.
inline Outcome coefficient_ratio_oracle() {
  Outcome o;
  double worst = 0;
  for (const auto& shape : enumerate_shapes(ShapeMode::PlaneBinary, 4)) {
    const auto s = series_S_t(Family::Bst, shape, 401);
    const double ratio = mpq_class(s[401] / s[400]).get_d();
    const auto root = u_root(shape);
    const double inv_rho = 1 / (1 + root.epsilon.to_double());
    const double rel = std::abs(ratio / inv_rho - 1);
    worst = std::max(worst, rel);
    o.require(rel < 0.01, shape.encoding() + " ratio " + num(ratio, 8) + " vs 1/rho " + num(inv_rho, 8));
  }
  if (o.pass) o.detail << "all 14 shapes k=4: |ratio*rho - 1| <= " << num(worst, 3) << " at n=400";
  return o;
}

// 8. Polya roots: the crude bound and residuals.
inline Outcome polya_bound_oracle() {
  Outcome o;
  ShapeCatalog cat(ShapeMode::Polya);
  std::size_t count = 0;
  double worst_res = -1e9, worst_norm = 0;
  for (std::uint32_t k = 2; k <= 8; ++k)
    for (const auto& s : cat.of_size(k)) {
      const auto ws = weight(s);
      const auto r = g_root(s);
      const auto wp = r.epsilon.precision();
      o.require(r.epsilon < Real(mpq_class(2 * ws.w / k), wp), "eps >= 2w/k for " + s.encoding());
      const double res = r.residual.is_zero() ? -1e9 : log2_abs(r.residual) * std::log10(2.0);
      o.require(res < -30, "residual 1e" + num(res, 3) + " for " + s.encoding());
      worst_res = std::max(worst_res, res);
      worst_norm = std::max(worst_norm, (r.epsilon * Real(mpq_class(k / ws.w), wp)).to_double() / 2);
      ++count;
    }
  if (o.pass)
    o.detail << count << " Polya shapes k=2..8: max eps/(2w/k) = " << num(worst_norm) << ", max |G(rho)-1| ~ 1e"
             << num(worst_res, 3);
  return o;
}

// 9. Normalized epsilon trends.
inline Outcome epsilon_trend_oracle() {
  Outcome o;
  LemmaConfig polya{ShapeMode::Polya, 8, 32, ShapeSelection::Path};
  const auto rows = run_lemma_sweep(polya, 1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    o.require(rows[i].error.empty(), "path k=" + std::to_string(rows[i].k) + ": " + rows[i].error);
    if (i > 0) o.require(rows[i].normalized > rows[i - 1].normalized, "not monotone at k=" + std::to_string(rows[i].k));
    o.require(rows[i].normalized < 1, "path k=" + std::to_string(rows[i].k) + " overshoots 1");
  }
  const double at32 = rows.back().normalized;
  o.require(at32 >= 0.85 && at32 <= 1.15, "eps k/w at k=32 is " + num(at32));
  LemmaConfig plane{ShapeMode::PlaneBinary, 8, 12, ShapeSelection::MaxWeight};
  std::ostringstream bin;
  for (const auto& r : run_lemma_sweep(plane, 1)) {
    o.require(r.error.empty() && r.normalized >= 0.7 && r.normalized <= 1.3,
              "binary k=" + std::to_string(r.k) + " eps k^2/(2w) = " + num(r.normalized) + r.error);
    bin << (bin.tellp() ? "," : "") << num(r.normalized, 3);
  }
  if (o.pass)
    o.detail << "Polya paths k=8..32: eps k/w rises " << num(rows.front().normalized) << " -> " << num(at32)
             << "; binary max-weight k=8..12: eps k^2/(2w) = " << bin.str();
  return o;
}

// 10. Golden compressed BST.
inline Outcome cbst_golden_oracle() {
  Outcome o;
  const std::vector<std::int64_t> seq{4, 8, 6, 2, 9, 1, 3, 7, 5};
  const auto bst = LabeledTree::bst_from_sequence(seq);
  const auto c = CompactedBst::build(bst);
  std::vector<std::pair<std::int64_t, std::uint64_t>> retained;
  for (const auto& r : c.retained()) retained.emplace_back(r.value, r.size);
  std::sort(retained.begin(), retained.end());
  o.require(retained == std::vector<std::pair<std::int64_t, std::uint64_t>>{{1, 1}, {2, 3}, {4, 9}, {8, 5}},
            "retained (value,size) pairs");
  std::vector<std::vector<std::int64_t>> lists;
  for (const auto& r : c.redirects()) lists.emplace_back(c.labels(r).begin(), c.labels(r).end());
  o.require(lists == std::vector<std::vector<std::int64_t>>{{6, 5, 7}, {9}, {3}}, "redirect lists");
  std::vector<std::uint64_t> trace;
  const auto s = c.search(7, &trace);
  o.require(s.found && s.comparisons == 4, "search(7) found=" + std::to_string(s.found) +
                                               " comparisons=" + std::to_string(s.comparisons));
  o.require(trace == std::vector<std::uint64_t>{0, 2}, "search(7) list indices (want 0 then 2)");
  o.require(s.additions >= 1, "search(7) additions");
  o.require(c.unfold() == bst, "unfold differs from the source BST");
  if (o.pass)
    o.detail << "retained {4:9, 2:3, 8:5, 1:1}; lists [6,5,7],[9],[3]; search(7): comparisons=4 additions="
             << s.additions << " via i=0 -> i=2; unfold exact";
  return o;
}

// 11. Randomized equivalence with plain BST search.
inline Outcome cbst_random_oracle(std::uint64_t seed, unsigned jobs) {
  Outcome o;
  constexpr std::size_t kTrees = 10000, kQueries = 100;
  struct Tally {
    std::uint64_t found_mismatch = 0, cmp_mismatch = 0, adds_exceed = 0, unfold_fail = 0, queries = 0, found = 0;
  };
  std::vector<Tally> tallies(kTrees);
  parallel_for(kTrees, jobs, [&](std::size_t i) {
    Xoshiro256 rng(derive_seed(seed, 11'000'000 + i));
    const auto n = 1 + rng.uniform_below(512);
    // Even keys 2..2n; odd queries are guaranteed misses between keys.
    auto perm = sample_permutation(n, rng.next());
    for (auto& x : perm) x *= 2;
    const auto bst = LabeledTree::bst_from_sequence(perm);
    const auto c = CompactedBst::build(bst);
    auto& t = tallies[i];
    t.unfold_fail += !(c.unfold() == bst);
    for (std::size_t q = 0; q < kQueries; ++q) {
      const auto key = static_cast<std::int64_t>(rng.uniform_below(2 * n + 1)) + 1;
      const auto a = bst_search(bst, key), b = c.search(key);
      t.found_mismatch += a.found != b.found;
      t.cmp_mismatch += a.comparisons != b.comparisons;
      t.adds_exceed += b.additions > b.comparisons;
      t.found += b.found;
      ++t.queries;
    }
  });
  Tally sum;
  for (const auto& t : tallies) {
    sum.found_mismatch += t.found_mismatch;
    sum.cmp_mismatch += t.cmp_mismatch;
    sum.adds_exceed += t.adds_exceed;
    sum.unfold_fail += t.unfold_fail;
    sum.queries += t.queries;
    sum.found += t.found;
  }
  o.require(sum.found_mismatch == 0, std::to_string(sum.found_mismatch) + " found-status mismatches");
  o.require(sum.cmp_mismatch == 0, std::to_string(sum.cmp_mismatch) + " comparison-count mismatches");
  o.require(sum.adds_exceed == 0, std::to_string(sum.adds_exceed) + " queries with additions > comparisons");
  o.require(sum.unfold_fail == 0, std::to_string(sum.unfold_fail) + " unfold mismatches");
  if (o.pass)
    o.detail << kTrees << " BSTs (n<=512) x " << kQueries << " queries (" << sum.found
             << " hits): found and comparisons identical, additions <= comparisons, unfold exact";
  return o;
}

// 12. 200-trial means inside the frozen pilot bands.
inline Outcome band_check(std::uint64_t seed, unsigned jobs) {
  Outcome o;
  std::ostringstream ok;
  for (const auto& b : kPilotBands) {
    const auto rec = run_scaling(b.family, {b.n}, kBandTrials, seed, jobs);
    const double mean = mean_by_size(rec).at(b.n);
    const std::string tag = std::string(family_name(b.family)) + " n=" + std::to_string(b.n);
    o.require(b.sample_consistent, tag + ": reference sample " + num(b.reference_sample) + " is " +
                                       num(std::abs(b.reference_sample - b.pilot_mean) / b.pilot_sd, 3) +
                                       " sd from the pilot mean " + num(b.pilot_mean) + ", no band can contain it");
    o.require(mean >= b.lo && mean <= b.hi,
              tag + ": mean " + num(mean) + " outside [" + num(b.lo) + ", " + num(b.hi) + "]");
    ok << (ok.tellp() ? "; " : "") << tag << " mean " << num(mean) << " in [" << num(b.lo) << ", " << num(b.hi)
       << "] (reference " << num(b.reference_sample) << ")";
  }
  o.detail << (o.pass ? "" : "; all bands: ") << ok.str();
  return o;
}

// 13. n / ln n scaling and exact small-n sanity bounds.
inline Outcome scaling_check(std::uint64_t seed, unsigned jobs) {
  Outcome o;
  std::vector<std::uint64_t> sizes;
  for (int e = 10; e <= 17; ++e) sizes.push_back(std::uint64_t{1} << e);
  std::ostringstream ok;
  for (const auto f : {Family::Recursive, Family::Bst}) {
    const auto fit = fit_nlogn(run_scaling(f, sizes, 20, seed, jobs));
    o.require(fit.r2 >= 0.95, std::string(family_name(f)) + " R^2 = " + num(fit.r2, 6));
    ok << family_name(f) << " alpha=" << num(fit.alpha) << " R^2=" << num(fit.r2, 6) << "; ";
  }
  for (const auto f : {Family::Recursive, Family::Bst})
    for (std::size_t n = 1; n <= kMaxExpectedSeriesN; ++n) {
      const auto e = expected_size_series(f, n);
      const mpq_class floor = n >= 2 ? 2 : 1;
      o.require(e >= floor && e <= static_cast<unsigned long>(n),
                std::string(family_name(f)) + " E(X_" + std::to_string(n) + ") = " + str(e));
    }
  if (o.pass)
    o.detail << ok.str() << "exact E(X_n) in [2, n] for n=2..12, E(X_12) = "
             << num(expected_size_series(Family::Recursive, 12).get_d()) << " / "
             << num(expected_size_series(Family::Bst, 12).get_d());
  return o;
}

// 14. Footprint ratio curve.
inline Outcome footprint_check(std::uint64_t seed, unsigned jobs) {
  Outcome o;
  Fig5Config cfg;
  cfg.seed = seed;
  const auto records = run_fig5(cfg, jobs);
  for (const auto& r : records) {
    o.require(r.cmp_plain == r.cmp_compact, "comparisons differ at n=" + std::to_string(r.n));
    o.require(!r.adds_exceed && !r.found_mismatch, "Proposition property broken at n=" + std::to_string(r.n));
  }
  const auto means = mean_ratio_by_size(records);
  std::vector<double> ns, rs;
  for (const auto& [n, r] : means) {
    ns.push_back(static_cast<double>(n));
    rs.push_back(r);
  }
  // Trend: means over blocks of 10 consecutive sizes must strictly decrease.
  std::vector<double> blocks;
  for (std::size_t i = 0; i + 10 <= rs.size(); i += 10)
    blocks.push_back(std::accumulate(rs.begin() + static_cast<std::ptrdiff_t>(i),
                                     rs.begin() + static_cast<std::ptrdiff_t>(i + 10), 0.0) /
                     10);
  for (std::size_t i = 1; i < blocks.size(); ++i)
    o.require(blocks[i] < blocks[i - 1], "block mean ratio rises at block " + std::to_string(i));
  const double last = means.rbegin()->second;
  o.require(last < 0.6, "ratio at n=20000 is " + num(last));
  const auto fit = fit_inverse_log(ns, rs);
  o.require(fit.r2_uncentered >= 0.9, "alpha/ln x R^2 = " + num(fit.r2_uncentered));
  if (o.pass)
    o.detail << "ratio " << num(rs.front()) << " (n=250) -> " << num(last) << " (n=20000), block means decreasing; "
             << "alpha=" << num(fit.alpha) << " R^2=" << num(fit.r2_uncentered)
             << " (no-intercept; centered R^2=" << num(fit.r2) << ")";
  return o;
}

}  // namespace verify_detail

struct Criterion {
  int id;
  const char* name;
  const char* suite;
  std::function<verify_detail::Outcome(const VerifyOptions&)> run;
};

inline const std::vector<Criterion>& criteria() {
  using namespace verify_detail;
  static const std::vector<Criterion> all{
      {1, "expected size: series = enumeration", "oracles", [](auto&) { return expected_size_oracle(); }},
      {2, "labeling counts = brute force", "oracles", [](auto&) { return labeling_oracle(); }},
      {3, "weight sums", "oracles", [](auto&) { return weight_sum_oracle(); }},
      {4, "maximal binary weights and 1/2^(k-2) bound", "oracles", [](auto&) { return max_weight_oracle(); }},
      {5, "u(z): explicit series = ODE recurrence", "series", [](auto& o) { return u_series_oracle(o.seed); }},
      {6, "leaf avoidance series vanishes", "series", [](auto&) { return leaf_series_oracle(); }},
      {7, "S_t coefficient ratio vs 1/rho", "series", [](auto&) { return coefficient_ratio_oracle(); }},
      {8, "Polya roots: eps < 2w/k, residual < 1e-30", "lemmas", [](auto&) { return polya_bound_oracle(); }},
      {9, "normalized eps trends", "lemmas", [](auto&) { return epsilon_trend_oracle(); }},
      {10, "compressed BST golden example", "cbst", [](auto&) { return cbst_golden_oracle(); }},
      {11, "compressed BST randomized equivalence", "cbst",
       [](auto& o) { return cbst_random_oracle(o.seed, o.jobs); }},
      {12, "200-trial means inside pilot bands", "statistics", [](auto& o) { return band_check(o.seed, o.jobs); }},
      {13, "n/ln n scaling and exact bounds", "statistics", [](auto& o) { return scaling_check(o.seed, o.jobs); }},
      {14, "footprint ratio curve", "statistics", [](auto& o) { return footprint_check(o.seed, o.jobs); }},
  };
  return all;
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"all", "oracles", "series", "lemmas", "cbst", "statistics"};
  return names;
}

/// Runs one criterion, converting exceptions into failures.
inline CriterionResult run_criterion(const Criterion& c, const VerifyOptions& opt) {
  CriterionResult r{c.id, c.name};
  const auto t0 = std::chrono::steady_clock::now();
  try {
    auto o = c.run(opt);
    r.pass = o.pass;
    r.detail = o.detail.str();
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

/// Runs a suite, printing one line per criterion as it completes.
inline std::vector<CriterionResult> run_suite(const std::string& suite, const VerifyOptions& opt, std::ostream& os) {
  std::vector<CriterionResult> out;
  for (const auto& c : criteria()) {
    if (suite != "all" && suite != c.suite) continue;
    out.push_back(run_criterion(c, opt));
    const auto& r = out.back();
    os << "[" << (r.pass ? "PASS" : "FAIL") << "] criterion " << std::setw(2) << r.id << " " << r.name << " ("
       << std::fixed << std::setprecision(1) << r.seconds << "s): " << std::defaultfloat << r.detail << std::endl;
  }
  return out;
}

}  // namespace treecomp
