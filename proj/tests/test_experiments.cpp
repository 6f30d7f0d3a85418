#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "treecomp/experiments.hpp"
#include "treecomp/pilot_bands.hpp"

using namespace treecomp;

namespace {

template <class R, class W>
std::string csv(const std::vector<R>& recs, W write) {
  std::ostringstream os;
  write(os, recs);
  return os.str();
}

}  // namespace

TEST(Experiments, ScalingDeterministicAcrossJobs) {
  const std::vector<std::uint64_t> sizes{1, 7, 100, 1000};
  for (const auto fam : {Family::Recursive, Family::Bst}) {
    const auto a = csv(run_scaling(fam, sizes, 5, 99, 1), write_scaling_csv);
    const auto b = csv(run_scaling(fam, sizes, 5, 99, 4), write_scaling_csv);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, csv(run_scaling(fam, sizes, 5, 100, 4), write_scaling_csv));
  }
}

TEST(Experiments, ScalingRecordsAndHeader) {
  const auto recs = run_scaling(Family::Bst, {1, 2, 50}, 3, 7, 2);
  ASSERT_EQ(recs.size(), 9u);
  EXPECT_EQ(recs[0].x_compact, 1u);  // n = 1
  EXPECT_EQ(recs[3].x_compact, 2u);  // n = 2 is a path of two shapes
  for (std::size_t i = 0; i < recs.size(); ++i) {
    EXPECT_EQ(recs[i].trial, i % 3);
    EXPECT_EQ(recs[i].seed, trial_seed(7, recs[i].n, recs[i].trial));
    EXPECT_LE(recs[i].x_compact, recs[i].n);
  }
  const auto text = csv(recs, write_scaling_csv);
  EXPECT_EQ(text.substr(0, text.find('\n')), "family,n,trial,seed,x_compact,ratio,x_norm");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 10);
  EXPECT_THROW(run_scaling(Family::Bst, {0}, 1, 0), std::invalid_argument);
  EXPECT_THROW(run_scaling(Family::Bst, {5}, 0, 0), std::invalid_argument);
}

TEST(Experiments, FitRecoversSyntheticAlpha) {
  std::vector<ScalingRecord> recs;
  for (std::uint64_t n = 16; n <= 4096; n *= 2) {
    const auto x = static_cast<std::uint64_t>(std::llround(3 * n / std::log(static_cast<double>(n))));
    recs.push_back({Family::Bst, n, 0, 0, x});
  }
  const auto f = fit_nlogn(recs);
  EXPECT_NEAR(f.alpha, 3, 1e-3);
  EXPECT_GT(f.r2, 0.99999);
  EXPECT_GT(f.r2_uncentered, 0.99999);

  const auto exact = fit_through_origin({1, 2, 3}, {2, 4, 6});
  EXPECT_DOUBLE_EQ(exact.alpha, 2);
  EXPECT_DOUBLE_EQ(exact.r2, 1);

  std::vector<double> ns, rs;
  for (double n = 100; n < 1e6; n *= 3) {
    ns.push_back(n);
    rs.push_back(1.5 / std::log(n));
  }
  EXPECT_NEAR(fit_inverse_log(ns, rs).alpha, 1.5, 1e-12);
}

TEST(Experiments, FitErrors) {
  std::vector<ScalingRecord> few;
  for (std::uint64_t n : {16, 32, 64, 128}) few.push_back({Family::Bst, n, 0, 0, n / 2});
  EXPECT_THROW(fit_nlogn(few), FitError);
  few.push_back({Family::Bst, 1, 0, 0, 1});
  EXPECT_THROW(fit_nlogn(few), FitError);  // size 1 has ln n = 0
  std::vector<ScalingRecord> narrow;
  for (std::uint64_t n : {100, 110, 120, 130, 140}) narrow.push_back({Family::Bst, n, 0, 0, n / 2});
  EXPECT_THROW(fit_nlogn(narrow), FitError);
  EXPECT_THROW(fit_through_origin({}, {}), FitError);
  EXPECT_THROW(fit_through_origin({0, 0}, {1, 2}), FitError);
  EXPECT_THROW(fit_inverse_log({1, 10}, {1, 1}), FitError);
}

TEST(Experiments, Fig5DeterministicAndConsistent) {
  Fig5Config cfg{50, 200, 50, 3, 100, 11};
  const auto a = run_fig5(cfg, 1);
  const auto b = run_fig5(cfg, 4);
  EXPECT_EQ(csv(a, write_fig5_csv), csv(b, write_fig5_csv));
  ASSERT_EQ(a.size(), 12u);
  for (const auto& r : a) {
    EXPECT_FALSE(r.found_mismatch);
    EXPECT_FALSE(r.adds_exceed);
    EXPECT_EQ(r.cmp_plain, r.cmp_compact);
    EXPECT_LT(r.bytes_compact, r.bytes_plain);
  }
  const auto text = csv(a, write_fig5_csv);
  EXPECT_EQ(text.substr(0, text.find('\n')), "n,trial,bytes_plain,bytes_compact,ratio,cmp_plain,cmp_compact,adds");
  EXPECT_EQ(mean_ratio_by_size(a).size(), 4u);
  EXPECT_THROW(fig5_sizes({10, 5, 1}), std::invalid_argument);
  EXPECT_THROW(fig5_sizes({10, 50, 0}), std::invalid_argument);
}

TEST(Experiments, LemmaSweepPolya) {
  const auto recs = run_lemma_sweep({ShapeMode::Polya, 2, 6, ShapeSelection::All, 256}, 2);
  // Rooted unlabeled trees of sizes 2..6: 1 + 2 + 4 + 9 + 20.
  EXPECT_EQ(recs.size(), 36u);
  for (const auto& r : recs) {
    EXPECT_TRUE(r.error.empty()) << r.shape_sig << ": " << r.error;
    EXPECT_TRUE(r.bound_ok) << r.shape_sig;
    EXPECT_GT(r.normalized, 0);
    EXPECT_LT(r.normalized, 2);
  }
  const auto text = csv(recs, write_lemma_csv);
  EXPECT_EQ(text.substr(0, text.find('\n')), "mode,k,shape_sig,w_num,w_den,epsilon,normalized,bound_ok");
}

TEST(Experiments, LemmaSweepRecordsErrors) {
  const auto recs = run_lemma_sweep({ShapeMode::PlaneBinary, 1, 3, ShapeSelection::MaxWeight, 256});
  ASSERT_EQ(recs.size(), 3u);
  EXPECT_EQ(recs[0].epsilon, "error");  // a single leaf has no root
  EXPECT_FALSE(recs[0].bound_ok);
  EXPECT_NE(csv(recs, write_lemma_csv).find(",error,nan,false"), std::string::npos);
  for (std::size_t i = 1; i < recs.size(); ++i) EXPECT_TRUE(recs[i].bound_ok);
  EXPECT_THROW(run_lemma_sweep({ShapeMode::Polya, 5, 4}), std::invalid_argument);
}

TEST(Experiments, PilotReproducesFrozenBands) {
  const auto bands = run_pilot(kPilotBands[0].pilot_trials, kPilotSeed, 0);
  ASSERT_EQ(bands.size(), std::size(kPilotBands));
  for (std::size_t i = 0; i < bands.size(); ++i) {
    EXPECT_EQ(bands[i].family, kPilotBands[i].family);
    EXPECT_EQ(bands[i].n, kPilotBands[i].n);
    EXPECT_DOUBLE_EQ(bands[i].pilot_mean, kPilotBands[i].pilot_mean);
    EXPECT_DOUBLE_EQ(bands[i].pilot_sd, kPilotBands[i].pilot_sd);
    EXPECT_DOUBLE_EQ(bands[i].lo, kPilotBands[i].lo);
    EXPECT_DOUBLE_EQ(bands[i].hi, kPilotBands[i].hi);
    EXPECT_EQ(bands[i].sample_consistent, kPilotBands[i].sample_consistent);
  }
  std::ostringstream os;
  write_pilot_header(os, bands, kPilotSeed);
  EXPECT_NE(os.str().find("kPilotSeed = 20240601ULL"), std::string::npos);
}

TEST(Experiments, CalibrateBand) {
  std::vector<ScalingRecord> p;
  for (std::uint64_t i = 0; i < 100; ++i) p.push_back({Family::Bst, 10, i, 0, 50 + i % 2 * 2});  // mean 51, sd ~1
  const auto near = calibrate_band(p, 53);
  EXPECT_TRUE(near.sample_consistent);
  EXPECT_DOUBLE_EQ(near.hi, 53);
  const auto far = calibrate_band(p, 80);
  EXPECT_FALSE(far.sample_consistent);
  EXPECT_LT(far.hi, 52);
  p.push_back({Family::Recursive, 10});
  EXPECT_THROW(calibrate_band(p, 51), std::invalid_argument);
}
