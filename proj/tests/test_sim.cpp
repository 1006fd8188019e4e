#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "symdisc/errors.hpp"
#include "symdisc/optical.hpp"
#include "symdisc/povm.hpp"
#include "symdisc/sim.hpp"
#include "test_util.hpp"

using namespace symdisc;

namespace {

constexpr double kPi = std::numbers::pi;

const AngleVector kReference{{kPi / 3.0, 0.3 * kPi, kPi / 4.0}};
const AngleVector kPermuted{{0.2 * kPi, 0.3 * kPi, 0.45 * kPi}};

// Detector rails (D0..D3 then M0..M2) for one photon through the leaky
// network at extinction 1000, frozen from an independent evaluation.
constexpr double kLeakyReference1[7] = {
    0.000285863411415793,   0.9839114695839637,    0.0003636640054722428,
    8.785898669856183e-05,  0.005530994147877787,  0.009330394699318387,
    0.0004897551652539662};
constexpr double kLeakyPermuted3[7] = {
    0.0009300071259367424,  0.00037277881187201817, 0.00033710003646766223,
    0.020655206619260024,   0.6476862609000097,     0.11608644945626093,
    0.21393219705019342};

SimConfig base_config(long long trials, std::uint64_t seed) {
  SimConfig cfg;
  cfg.trials = trials;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("per-trial stream is keyed by seed and trial index") {
  TrialRng a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  bool same = true, diff_trial = false, diff_seed = false;
  for (int i = 0; i < 5; ++i) {
    const std::uint64_t va = a.next_u64();
    same = same && va == b.next_u64();
    diff_trial = diff_trial || va != c.next_u64();
    diff_seed = diff_seed || va != d.next_u64();
  }
  CHECK(same);
  CHECK(diff_trial);
  CHECK(diff_seed);
}

TEST_CASE("uniform and gaussian draws have the right shape") {
  TrialRng rng(5, 5);
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double g = rng.gaussian();
    sum += g;
    sum2 += g * g;
  }
  const double mean = sum / 20000.0;
  const double var = sum2 / 20000.0 - mean * mean;
  CHECK(std::abs(mean) < 0.04);
  CHECK(std::abs(var - 1.0) < 0.06);
}

TEST_CASE("config validation rejects out-of-range settings") {
  const SimConfig good = base_config(10, 1);
  CHECK_NOTHROW(validate_config(good, 4));

  SimConfig bad = good;
  bad.trials = 0;
  CHECK_THROWS_AS(validate_config(bad, 4), InvalidConfig);

  bad = good;
  bad.source = {1.0, 1.0, 1.0};
  CHECK_THROWS_AS(validate_config(bad, 4), InvalidConfig);

  bad = good;
  bad.source = {1.0, -0.5, 1.0, 1.0};
  CHECK_THROWS_AS(validate_config(bad, 4), InvalidConfig);

  bad = good;
  bad.source = {0.0, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(validate_config(bad, 4), InvalidConfig);

  bad = good;
  bad.pbs_extinction = 0.5;
  CHECK_THROWS_AS(validate_config(bad, 4), InvalidConfig);

  bad = good;
  bad.phase_noise_sigma = -0.1;
  CHECK_THROWS_AS(validate_config(bad, 4), InvalidConfig);

  bad = good;
  bad.detector_efficiency = 0.0;
  CHECK_THROWS_AS(validate_config(bad, 4), InvalidConfig);

  bad = good;
  bad.detector_efficiency = 1.5;
  CHECK_THROWS_AS(validate_config(bad, 4), InvalidConfig);

  bad = good;
  bad.heralding_efficiency = 0.0;
  CHECK_THROWS_AS(validate_config(bad, 4), InvalidConfig);

  bad = good;
  bad.heralding_efficiency = 1.0001;
  CHECK_THROWS_AS(validate_config(bad, 4), InvalidConfig);

  bad = good;
  bad.threads = -1;
  CHECK_THROWS_AS(validate_config(bad, 4), InvalidConfig);
}

TEST_CASE("noiseless trial distribution matches the ideal network") {
  const CoefficientVector c = coefficients_from_angles(kReference);
  const double p_d = optimal_probability(c);
  SimConfig cfg = base_config(1, 0);
  TrialRng rng(0, 0);
  const auto probs = trial_click_distribution(compile_full(kReference, 1), cfg, rng);
  REQUIRE(probs.size() == 7);
  CHECK(std::abs(probs[1] - p_d) < 1e-12);
  for (int k : {0, 2, 3}) CHECK(probs[k] == 0.0);  // clamped roundoff zeros
  double total = 0.0;
  for (double p : probs) total += p;
  CHECK(std::abs(total - 1.0) < 1e-15);
}

TEST_CASE("leaky trial distributions match frozen rails") {
  SimConfig cfg = base_config(1, 0);
  cfg.pbs_extinction = 1000.0;

  TrialRng rng(0, 0);
  const auto ref = trial_click_distribution(compile_full(kReference, 1), cfg, rng);
  REQUIRE(ref.size() == 7);
  for (int i = 0; i < 7; ++i) CHECK(std::abs(ref[i] - kLeakyReference1[i]) < 1e-12);

  const auto perm = trial_click_distribution(compile_full(kPermuted, 3), cfg, rng);
  REQUIRE(perm.size() == 7);
  for (int i = 0; i < 7; ++i) CHECK(std::abs(perm[i] - kLeakyPermuted3[i]) < 1e-12);
}

TEST_CASE("monte carlo frequencies match the leaky rails") {
  const long long trials = 200000;

  SUBCASE("reference family, second member") {
    SimConfig cfg = base_config(trials, 1234);
    cfg.pbs_extinction = 1000.0;
    cfg.source = {0.0, 1.0, 0.0, 0.0};
    const SimReport rep = run_trials(cfg, kReference);
    CHECK(rep.discarded_count == 0);
    CHECK(rep.prepared_counts[1] == trials);
    for (int k = 0; k < 4; ++k) {
      const double p = kLeakyReference1[k];
      const double sigma = std::sqrt(p * (1.0 - p) / trials);
      const double freq = static_cast<double>(rep.confusion[1][k]) / trials;
      CHECK(std::abs(freq - p) < 5.0 * sigma + 1e-12);
    }
    const double p_inc = kLeakyReference1[4] + kLeakyReference1[5] + kLeakyReference1[6];
    const double sigma_inc = std::sqrt(p_inc * (1.0 - p_inc) / trials);
    const double freq_inc = static_cast<double>(rep.inconclusive_count) / trials;
    CHECK(std::abs(freq_inc - p_inc) < 5.0 * sigma_inc);
  }

  SUBCASE("relabeled family, last member") {
    SimConfig cfg = base_config(trials, 4321);
    cfg.pbs_extinction = 1000.0;
    cfg.source = {0.0, 0.0, 0.0, 1.0};
    const SimReport rep = run_trials(cfg, kPermuted);
    for (int k = 0; k < 4; ++k) {
      const double p = kLeakyPermuted3[k];
      const double sigma = std::sqrt(p * (1.0 - p) / trials);
      const double freq = static_cast<double>(rep.confusion[3][k]) / trials;
      CHECK(std::abs(freq - p) < 5.0 * sigma + 1e-12);
    }
  }
}

TEST_CASE("ideal run has a diagonal confusion matrix") {
  SimConfig cfg = base_config(100000, 2026);
  const SimReport rep = run_trials(cfg, kReference);
  CHECK(rep.discarded_count == 0);
  for (int l = 0; l < 4; ++l)
    for (int k = 0; k < 4; ++k)
      if (l != k) CHECK(rep.confusion[l][k] == 0);
  CHECK(rep.correct_rate == rep.conclusive_rate);

  const double p_d = rep.analytic_p_d;
  CHECK(std::abs(p_d - optimal_probability(coefficients_from_angles(kReference))) == 0.0);
  const double sigma = std::sqrt(p_d * (1.0 - p_d) / static_cast<double>(cfg.trials));
  CHECK(std::abs(rep.conclusive_rate - p_d) < 4.0 * sigma);
  CHECK(rep.wilson_low <= rep.conclusive_rate);
  CHECK(rep.conclusive_rate <= rep.wilson_high);
}

TEST_CASE("parallel generation is bit-identical to the serial reference") {
  SimConfig cfg = base_config(20000, 99);
  cfg.pbs_extinction = 1000.0;
  cfg.phase_noise_sigma = 0.1;
  cfg.detector_efficiency = 0.9;
  cfg.heralding_efficiency = 0.95;

  const auto serial = generate_trials_serial(cfg, kReference);
  cfg.threads = 0;
  const auto parallel = generate_trials(cfg, kReference);
  CHECK(serial == parallel);
  cfg.threads = 3;
  const auto three = generate_trials(cfg, kReference);
  CHECK(serial == three);

  const double p_d = optimal_probability(coefficients_from_angles(kReference));
  CHECK(summarize(serial, 4, p_d) == summarize(parallel, 4, p_d));
}

TEST_CASE("phase noise leaves the outcome split untouched at fixed seed") {
  SimConfig cfg = base_config(30000, 7);
  cfg.pbs_extinction = 1000.0;
  cfg.detector_efficiency = 0.9;
  cfg.heralding_efficiency = 0.95;

  std::vector<SimReport> reports;
  std::vector<std::vector<TrialRecord>> runs;
  for (double sigma : {0.0, 0.2, 0.5}) {
    cfg.phase_noise_sigma = sigma;
    runs.push_back(generate_trials(cfg, kReference));
    reports.push_back(summarize(runs.back(), 4, 0.0));
  }
  for (std::size_t i = 1; i < reports.size(); ++i) {
    CHECK(reports[i].conclusive_count == reports[0].conclusive_count);
    CHECK(reports[i].inconclusive_count == reports[0].inconclusive_count);
    CHECK(reports[i].discarded_count == reports[0].discarded_count);
    long long moved = 0;
    for (std::size_t t = 0; t < runs[0].size(); ++t)
      if (runs[i][t].outcome != runs[0][t].outcome ||
          runs[i][t].prepared != runs[0][t].prepared)
        ++moved;
    CHECK(moved == 0);
  }
  // The same conclusive trials land on the wrong detectors more often.
  CHECK(reports[1].correct_rate < reports[0].correct_rate);
  CHECK(reports[2].correct_rate < reports[1].correct_rate);
}

TEST_CASE("higher extinction suppresses cross clicks") {
  SimConfig cfg = base_config(100000, 55);
  auto off_diagonal = [](const SimReport& rep) {
    long long total = 0;
    for (int l = 0; l < rep.dim; ++l)
      for (int k = 0; k < rep.dim; ++k)
        if (l != k) total += rep.confusion[l][k];
    return total;
  };

  cfg.pbs_extinction = 1000.0;
  const long long low = off_diagonal(run_trials(cfg, kReference));
  cfg.pbs_extinction = 100000.0;
  const long long high = off_diagonal(run_trials(cfg, kReference));
  CHECK(low > 0);
  CHECK(high < low);
}

TEST_CASE("noisy single-trial unitary stays unitary") {
  SimConfig cfg = base_config(1, 0);
  cfg.pbs_extinction = 1000.0;
  cfg.phase_noise_sigma = 0.3;
  TrialRng rng(5, 0);
  const Matrix u = imperfect_netlist(compile_full(kReference, 0), cfg, rng);
  CHECK(unitarity_residual(u) < 1e-10);
}

TEST_CASE("noise-free single-trial unitary equals the ideal simulation") {
  const OpticalNetlist net = compile_full(kReference, 2);
  SimConfig cfg = base_config(1, 0);
  TrialRng rng(1, 1);
  const Matrix noisy = imperfect_netlist(net, cfg, rng);
  const Matrix ideal = simulate_netlist(net);
  double diff = 0.0;
  for (int i = 0; i < noisy.rows(); ++i)
    for (int j = 0; j < noisy.cols(); ++j) diff += std::norm(noisy.at(i, j) - ideal.at(i, j));
  CHECK(diff == 0.0);
}

TEST_CASE("summary is invariant under record order") {
  SimConfig cfg = base_config(5000, 11);
  cfg.detector_efficiency = 0.8;
  const auto records = generate_trials(cfg, kReference);
  auto shuffled = records;
  std::mt19937 urbg(3);
  std::shuffle(shuffled.begin(), shuffled.end(), urbg);
  CHECK(summarize(records, 4, 0.5) == summarize(shuffled, 4, 0.5));
}

TEST_CASE("wilson interval matches frozen values") {
  std::vector<TrialRecord> records;
  for (int i = 0; i < 75; ++i)
    records.push_back(TrialRecord{0, 0, TrialOutcome::Conclusive});
  for (int i = 0; i < 25; ++i)
    records.push_back(TrialRecord{0, -1, TrialOutcome::Inconclusive});
  const SimReport rep = summarize(records, 2, 0.75);
  CHECK(rep.conclusive_rate == 0.75);
  CHECK(rep.correct_rate == 0.75);
  CHECK(std::abs(rep.wilson_low - 0.656955364519384) < 1e-12);
  CHECK(std::abs(rep.wilson_high - 0.8245478863771232) < 1e-12);

  std::vector<TrialRecord> two = {TrialRecord{0, 0, TrialOutcome::Conclusive},
                                  TrialRecord{1, -1, TrialOutcome::Inconclusive}};
  const SimReport small = summarize(two, 2, 0.5);
  CHECK(std::abs(small.wilson_low - 0.09453120573423074) < 1e-12);
  CHECK(std::abs(small.wilson_high - 0.9054687942657693) < 1e-12);
}

TEST_CASE("summary edge cases") {
  CHECK_THROWS_AS(summarize({}, 4, 0.5), EmptyRecords);

  std::vector<TrialRecord> bad_prepared = {TrialRecord{7, 0, TrialOutcome::Conclusive}};
  CHECK_THROWS_AS(summarize(bad_prepared, 4, 0.5), InvalidConfig);

  std::vector<TrialRecord> bad_detected = {TrialRecord{0, -1, TrialOutcome::Conclusive}};
  CHECK_THROWS_AS(summarize(bad_detected, 4, 0.5), InvalidConfig);

  std::vector<TrialRecord> all_discarded(10, TrialRecord{0, -1, TrialOutcome::Discarded});
  const SimReport rep = summarize(all_discarded, 4, 0.5);
  CHECK(rep.discarded_count == 10);
  CHECK(rep.conclusive_rate == 0.0);
  CHECK(rep.wilson_low == 0.0);
  CHECK(rep.wilson_high == 1.0);
  CHECK(rep.correct_rate == 0.0);
}

TEST_CASE("correct rate counts only diagonal clicks") {
  std::vector<TrialRecord> records = {
      TrialRecord{0, 0, TrialOutcome::Conclusive},
      TrialRecord{0, 1, TrialOutcome::Conclusive},
      TrialRecord{1, 1, TrialOutcome::Conclusive},
      TrialRecord{1, -1, TrialOutcome::Inconclusive},
  };
  const SimReport rep = summarize(records, 2, 0.9);
  CHECK(rep.conclusive_rate == 0.75);
  CHECK(rep.correct_rate == 0.5);
  CHECK(rep.confusion[0][1] == 1);
  CHECK(rep.analytic_p_d == 0.9);
}
