// Batch studies with CSV output: compaction scaling, compressed-BST
// footprint/search curves, trend fits and root sweeps over shapes.
//
// Every trial draws its seed from (master seed, n, trial) only, and records
// are stored by task index, so output does not depend on the worker count.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <gmpxx.h>

#include "treecomp/analytics.hpp"
#include "treecomp/cbst.hpp"
#include "treecomp/dag.hpp"
#include "treecomp/enumerator.hpp"
#include "treecomp/rng.hpp"
#include "treecomp/sampler.hpp"

namespace treecomp {

inline const char* family_name(Family f) { return f == Family::Recursive ? "recursive" : "bst"; }
inline const char* mode_name(ShapeMode m) { return m == ShapeMode::Polya ? "polya" : "plane"; }

/// Runs task(i) for i in [0, count) on `jobs` threads (0 = hardware).
/// The first exception thrown by any task is rethrown.
inline void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& task) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(count, 1)));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const auto i = next.fetch_add(1);
        if (i >= count || failed.load()) return;
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

/// Seed of trial `trial` at size n.
inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t n, std::uint64_t trial) {
  return derive_seed(derive_seed(master, n), trial);
}

namespace detail {
inline std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Scaling

struct ScalingRecord {
  Family family;
  std::uint64_t n = 0;
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  std::uint64_t x_compact = 0;
  double ratio = 0;   // X / n
  double x_norm = 0;  // X ln(n) / n
};

inline std::vector<ScalingRecord> run_scaling(Family family, const std::vector<std::uint64_t>& sizes,
                                              std::uint64_t trials, std::uint64_t seed, unsigned jobs = 0) {
  if (trials == 0) throw std::invalid_argument("run_scaling: trials must be >= 1");
  for (const auto n : sizes)
    if (n == 0) throw std::invalid_argument("run_scaling: sizes must be >= 1");
  std::vector<ScalingRecord> out(sizes.size() * trials);
  parallel_for(out.size(), jobs, [&](std::size_t i) {
    const auto n = sizes[i / trials];
    const auto trial = i % trials;
    const auto s = trial_seed(seed, n, trial);
    const auto x = compact(sample({family, n, s})).size();
    const auto dn = static_cast<double>(n);
    out[i] = {family, n, trial, s, x, static_cast<double>(x) / dn, static_cast<double>(x) * std::log(dn) / dn};
  });
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return std::tie(a.n, a.trial) < std::tie(b.n, b.trial); });
  return out;
}

inline void write_scaling_csv(std::ostream& os, const std::vector<ScalingRecord>& records) {
  os << "family,n,trial,seed,x_compact,ratio,x_norm\n";
  for (const auto& r : records)
    os << family_name(r.family) << ',' << r.n << ',' << r.trial << ',' << r.seed << ',' << r.x_compact << ','
       << detail::fmt_double(r.ratio) << ',' << detail::fmt_double(r.x_norm) << '\n';
}

/// Mean X per size, sizes ascending.
inline std::map<std::uint64_t, double> mean_by_size(const std::vector<ScalingRecord>& records) {
  std::map<std::uint64_t, std::pair<double, std::uint64_t>> acc;
  for (const auto& r : records) {
    auto& [sum, cnt] = acc[r.n];
    sum += static_cast<double>(r.x_compact);
    ++cnt;
  }
  std::map<std::uint64_t, double> out;
  for (const auto& [n, a] : acc) out[n] = a.first / static_cast<double>(a.second);
  return out;
}

class FitError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct FitResult {
  double alpha = 0;
  double r2 = 0;             // 1 - SS_res / SS_tot, SS_tot about the mean of y
  double r2_uncentered = 0;  // 1 - SS_res / sum y^2 (no-intercept convention)
};

/// Least squares of y against alpha * x (through the origin).
inline FitResult fit_through_origin(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.empty()) throw FitError("fit: need matching, non-empty samples");
  double sxy = 0, sxx = 0, sy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += x[i] * y[i];
    sxx += x[i] * x[i];
    sy += y[i];
    syy += y[i] * y[i];
  }
  if (sxx == 0) throw FitError("fit: degenerate regressor");
  FitResult f;
  f.alpha = sxy / sxx;
  double ss_res = 0;
  for (std::size_t i = 0; i < x.size(); ++i) ss_res += (y[i] - f.alpha * x[i]) * (y[i] - f.alpha * x[i]);
  const double mean = sy / static_cast<double>(y.size());
  const double ss_tot = syy - static_cast<double>(y.size()) * mean * mean;
  f.r2 = ss_tot > 0 ? 1 - ss_res / ss_tot : (ss_res == 0 ? 1.0 : 0.0);
  f.r2_uncentered = syy > 0 ? 1 - ss_res / syy : 1.0;
  return f;
}

/// Fits mean X against alpha * n / ln n. Needs >= 5 distinct sizes, all
/// >= 2, spanning at least two octaves (max/min >= 4).
inline FitResult fit_nlogn(const std::vector<ScalingRecord>& records) {
  const auto means = mean_by_size(records);
  if (means.size() < 5) throw FitError("fit_nlogn: need at least 5 distinct sizes");
  if (means.begin()->first < 2) throw FitError("fit_nlogn: sizes must be >= 2");
  if (means.rbegin()->first < 4 * means.begin()->first) throw FitError("fit_nlogn: sizes must span two octaves");
  std::vector<double> x, y;
  for (const auto& [n, m] : means) {
    const auto dn = static_cast<double>(n);
    x.push_back(dn / std::log(dn));
    y.push_back(m);
  }
  return fit_through_origin(x, y);
}

/// Fits ratio against alpha / ln n.
inline FitResult fit_inverse_log(const std::vector<double>& n, const std::vector<double>& ratio) {
  std::vector<double> x;
  for (const auto v : n) {
    if (v <= 1) throw FitError("fit_inverse_log: sizes must be > 1");
    x.push_back(1 / std::log(v));
  }
  return fit_through_origin(x, ratio);
}

// ---------------------------------------------------------------------------
// Acceptance bands for 200-trial means, calibrated by a large pilot run.

struct PilotBand {
  Family family;
  std::uint64_t n = 0;
  std::uint64_t pilot_trials = 0;
  double pilot_mean = 0;
  double pilot_sd = 0;
  double reference_sample = 0;
  double lo = 0;
  double hi = 0;
  bool sample_consistent = false;  // reference sample within 4 sd of the pilot mean
};

inline constexpr std::uint64_t kBandTrials = 200;

/// Band = pilot mean +- 6 standard errors of a kBandTrials-trial mean,
/// stretched to contain the single reference draw when that draw is a
/// plausible sample of the distribution (within 4 sd). An implausible draw
/// is left outside, and the band is marked inconsistent.
inline PilotBand calibrate_band(const std::vector<ScalingRecord>& pilot, double reference_sample) {
  if (pilot.size() < 2) throw std::invalid_argument("calibrate_band: need at least two pilot trials");
  PilotBand b{pilot.front().family, pilot.front().n, pilot.size()};
  double sum = 0, sq = 0;
  for (const auto& r : pilot) {
    if (r.n != b.n || r.family != b.family) throw std::invalid_argument("calibrate_band: mixed pilot records");
    sum += static_cast<double>(r.x_compact);
  }
  b.pilot_mean = sum / static_cast<double>(pilot.size());
  for (const auto& r : pilot) sq += (static_cast<double>(r.x_compact) - b.pilot_mean) * (static_cast<double>(r.x_compact) - b.pilot_mean);
  b.pilot_sd = std::sqrt(sq / static_cast<double>(pilot.size() - 1));
  b.reference_sample = reference_sample;
  const double half = 6 * b.pilot_sd / std::sqrt(static_cast<double>(kBandTrials));
  b.lo = b.pilot_mean - half;
  b.hi = b.pilot_mean + half;
  b.sample_consistent = std::abs(reference_sample - b.pilot_mean) <= 4 * b.pilot_sd;
  if (b.sample_consistent) {
    b.lo = std::min(b.lo, reference_sample);
    b.hi = std::max(b.hi, reference_sample);
  }
  return b;
}

struct ReferenceSample {
  Family family;
  std::uint64_t n;
  double x;
};

/// Single-run compacted sizes that the acceptance bands are checked against.
inline constexpr ReferenceSample kReferenceSamples[] = {
    {Family::Recursive, 500, 250},
    {Family::Bst, 500, 172},
    {Family::Recursive, 5000, 663},
    {Family::Bst, 5000, 1361},
};

inline std::vector<PilotBand> run_pilot(std::uint64_t trials, std::uint64_t seed, unsigned jobs = 0) {
  std::vector<PilotBand> bands;
  for (const auto& s : kReferenceSamples) bands.push_back(calibrate_band(run_scaling(s.family, {s.n}, trials, seed, jobs), s.x));
  return bands;
}

/// C++ source of the frozen band table.
inline void write_pilot_header(std::ostream& os, const std::vector<PilotBand>& bands, std::uint64_t seed) {
  os << "// Generated by `treecomp experiment pilot`; do not edit by hand.\n"
     << "#pragma once\n\n#include \"treecomp/experiments.hpp\"\n\nnamespace treecomp {\n\n"
     << "inline constexpr std::uint64_t kPilotSeed = " << seed << "ULL;\n\n"
     << "// family, n, pilot trials, mean, sd, reference sample, lo, hi, sample consistent\n"
     << "inline const PilotBand kPilotBands[] = {\n";
  for (const auto& b : bands)
    os << "    {Family::" << (b.family == Family::Recursive ? "Recursive" : "Bst") << ", " << b.n << ", "
       << b.pilot_trials << ", " << detail::fmt_double(b.pilot_mean) << ", " << detail::fmt_double(b.pilot_sd)
       << ", " << detail::fmt_double(b.reference_sample) << ", " << detail::fmt_double(b.lo) << ", "
       << detail::fmt_double(b.hi) << ", " << (b.sample_consistent ? "true" : "false") << "},\n";
  os << "};\n\n}  // namespace treecomp\n";
}

// ---------------------------------------------------------------------------
// Compressed BST footprint and search cost

struct Fig5Record {
  std::uint64_t n = 0;
  std::uint64_t trial = 0;
  std::uint64_t bytes_plain = 0;
  std::uint64_t bytes_compact = 0;
  std::uint64_t queries = 0;
  std::uint64_t cmp_plain = 0;    // totals over all queries
  std::uint64_t cmp_compact = 0;
  std::uint64_t adds = 0;
  bool found_mismatch = false;    // any query whose found-status differed
  bool adds_exceed = false;       // any query with additions > comparisons

  double ratio() const { return static_cast<double>(bytes_compact) / static_cast<double>(bytes_plain); }
};

struct Fig5Config {
  std::uint64_t first = 250;
  std::uint64_t last = 20000;
  std::uint64_t step = 250;
  std::uint64_t trials = 30;
  std::uint64_t queries = 1000;
  std::uint64_t seed = 0;
};

inline std::vector<std::uint64_t> fig5_sizes(const Fig5Config& cfg) {
  if (cfg.step == 0 || cfg.first == 0 || cfg.last < cfg.first) throw std::invalid_argument("fig5: bad size range");
  std::vector<std::uint64_t> sizes;
  for (auto n = cfg.first; n <= cfg.last; n += cfg.step) sizes.push_back(n);
  return sizes;
}

inline Fig5Record fig5_trial(std::uint64_t n, std::uint64_t trial, std::uint64_t seed, std::uint64_t queries) {
  const auto bst = sample_bst(n, seed);
  const auto cbst = CompactedBst::build(bst);
  Fig5Record r{n, trial, footprint(bst), footprint(cbst), queries};
  // Present keys: the BST holds exactly 1..n.
  Xoshiro256 rng(derive_seed(seed, 0x5eedULL));
  for (std::uint64_t q = 0; q < queries; ++q) {
    const auto key = static_cast<std::int64_t>(rng.uniform_below(n)) + 1;
    const auto a = bst_search(bst, key);
    const auto b = cbst.search(key);
    r.cmp_plain += a.comparisons;
    r.cmp_compact += b.comparisons;
    r.adds += b.additions;
    r.found_mismatch |= a.found != b.found;
    r.adds_exceed |= b.additions > b.comparisons;
  }
  return r;
}

inline std::vector<Fig5Record> run_fig5(const Fig5Config& cfg, unsigned jobs = 0) {
  const auto sizes = fig5_sizes(cfg);
  std::vector<Fig5Record> out(sizes.size() * cfg.trials);
  parallel_for(out.size(), jobs, [&](std::size_t i) {
    const auto n = sizes[i / cfg.trials];
    const auto trial = i % cfg.trials;
    out[i] = fig5_trial(n, trial, trial_seed(cfg.seed, n, trial), cfg.queries);
  });
  return out;
}

/// Per-record means over queries for the cost columns.
inline void write_fig5_csv(std::ostream& os, const std::vector<Fig5Record>& records) {
  os << "n,trial,bytes_plain,bytes_compact,ratio,cmp_plain,cmp_compact,adds\n";
  for (const auto& r : records) {
    const auto q = static_cast<double>(std::max<std::uint64_t>(r.queries, 1));
    os << r.n << ',' << r.trial << ',' << r.bytes_plain << ',' << r.bytes_compact << ','
       << detail::fmt_double(r.ratio()) << ',' << detail::fmt_double(static_cast<double>(r.cmp_plain) / q) << ','
       << detail::fmt_double(static_cast<double>(r.cmp_compact) / q) << ','
       << detail::fmt_double(static_cast<double>(r.adds) / q) << '\n';
  }
}

/// Mean footprint ratio per size, sizes ascending.
inline std::map<std::uint64_t, double> mean_ratio_by_size(const std::vector<Fig5Record>& records) {
  std::map<std::uint64_t, std::pair<double, std::uint64_t>> acc;
  for (const auto& r : records) {
    acc[r.n].first += r.ratio();
    ++acc[r.n].second;
  }
  std::map<std::uint64_t, double> out;
  for (const auto& [n, a] : acc) out[n] = a.first / static_cast<double>(a.second);
  return out;
}

// ---------------------------------------------------------------------------
// Root sweeps

enum class ShapeSelection { All, MaxWeight, Path };

struct LemmaRecord {
  ShapeMode mode;
  std::uint32_t k = 0;
  std::string shape_sig;
  mpq_class w;
  std::string epsilon;      // decimal, or "error"
  double normalized = NAN;  // eps k / w (Polya) or eps k^2 / (2w) (PlaneBinary)
  bool bound_ok = false;    // eps < 2w/k (Polya) or eps < 1/k^2 (PlaneBinary)
  std::string error;        // root-finder failure, empty on success
};

struct LemmaConfig {
  ShapeMode mode = ShapeMode::Polya;
  std::uint32_t k_min = 2;
  std::uint32_t k_max = 8;
  ShapeSelection selection = ShapeSelection::All;
  mpfr_prec_t bits = kDefaultRootBits;
};

inline std::vector<Shape> select_shapes(ShapeMode mode, std::uint32_t k, ShapeSelection sel) {
  if (sel == ShapeSelection::Path) return {path_shape(mode, k)};
  auto all = enumerate_shapes(mode, k);
  if (sel == ShapeSelection::All) return all;
  // First shape of maximal weight in catalog order.
  Shape best = all.front();
  mpq_class bw = weight(best).w;
  for (const auto& s : all) {
    const auto w = weight(s).w;
    if (w > bw) {
      bw = w;
      best = s;
    }
  }
  return {best};
}

inline LemmaRecord lemma_row(const Shape& shape, mpfr_prec_t bits) {
  const auto ws = weight(shape);
  LemmaRecord r{shape.mode(), ws.k, shape.encoding(), ws.w};
  try {
    const auto root = shape.mode() == ShapeMode::Polya ? g_root(shape, bits) : u_root(shape, bits);
    const auto wp = root.epsilon.precision();
    r.epsilon = root.epsilon.to_string(30);
    if (shape.mode() == ShapeMode::Polya) {
      r.normalized = (root.epsilon * Real(mpq_class(ws.k / ws.w), wp)).to_double();
      r.bound_ok = root.epsilon < Real(mpq_class(2 * ws.w / ws.k), wp);
    } else {
      const mpq_class k2(static_cast<unsigned long>(ws.k) * ws.k);
      r.normalized = (root.epsilon * Real(mpq_class(k2 / (2 * ws.w)), wp)).to_double();
      r.bound_ok = root.epsilon < Real(mpq_class(1 / k2), wp);
    }
  } catch (const std::exception& e) {
    r.epsilon = "error";
    r.error = e.what();
  }
  return r;
}

inline std::vector<LemmaRecord> run_lemma_sweep(const LemmaConfig& cfg, unsigned jobs = 0) {
  if (cfg.k_min < 1 || cfg.k_max < cfg.k_min) throw std::invalid_argument("lemma sweep: bad k range");
  std::vector<Shape> shapes;
  for (auto k = cfg.k_min; k <= cfg.k_max; ++k)
    for (auto& s : select_shapes(cfg.mode, k, cfg.selection)) shapes.push_back(std::move(s));
  std::vector<LemmaRecord> out(shapes.size());
  parallel_for(shapes.size(), jobs, [&](std::size_t i) { out[i] = lemma_row(shapes[i], cfg.bits); });
  return out;
}

inline void write_lemma_csv(std::ostream& os, const std::vector<LemmaRecord>& records) {
  os << "mode,k,shape_sig,w_num,w_den,epsilon,normalized,bound_ok\n";
  for (const auto& r : records)
    os << mode_name(r.mode) << ',' << r.k << ',' << r.shape_sig << ',' << r.w.get_num() << ',' << r.w.get_den() << ','
       << r.epsilon << ',' << (r.error.empty() ? detail::fmt_double(r.normalized) : "nan") << ','
       << (r.bound_ok ? "true" : "false") << '\n';
}

}  // namespace treecomp
