#pragma once

#include <cstdint>
#include <limits>

#include "symdisc/optical.hpp"

namespace symdisc {

struct SimConfig {
  long long trials = 0;
  std::uint64_t seed = 0;
  std::vector<double> source;  // preparation weights per index; empty = uniform
  double pbs_extinction = std::numeric_limits<double>::infinity();
  double phase_noise_sigma = 0.0;   // radians, per splitter arm, per trial
  double detector_efficiency = 1.0;
  double heralding_efficiency = 1.0;
  int threads = 0;  // 0 = all available, 1 = serial reference path
};

void validate_config(const SimConfig& config, int dim);

enum class TrialOutcome : std::uint8_t { Conclusive, Inconclusive, Discarded };

struct TrialRecord {
  std::uint16_t prepared = 0;
  std::int16_t detected = -1;  // conclusive detector index, -1 otherwise
  TrialOutcome outcome = TrialOutcome::Discarded;

  bool operator==(const TrialRecord&) const = default;
};

struct SimReport {
  int dim = 0;
  long long trials = 0;
  std::vector<long long> prepared_counts;
  std::vector<long long> inconclusive_by_prepared;
  std::vector<long long> discarded_by_prepared;
  std::vector<std::vector<long long>> confusion;  // conclusive clicks only
  long long conclusive_count = 0;
  long long inconclusive_count = 0;
  long long discarded_count = 0;
  double conclusive_rate = 0.0;  // among detected (non-discarded) trials
  double wilson_low = 0.0;       // 95% interval for conclusive_rate
  double wilson_high = 1.0;
  double correct_rate = 0.0;  // correctly identified fraction of detected trials
  double analytic_p_d = 0.0;

  bool operator==(const SimReport&) const = default;
};

/// Per-trial splitmix64 stream keyed by (seed, trial index): any trial can be
/// generated independently of all others, so scheduling cannot change results.
class TrialRng {
 public:
  TrialRng(std::uint64_t seed, std::uint64_t trial);
  std::uint64_t next_u64();
  double uniform();   // [0, 1)
  double gaussian();  // standard normal (Box-Muller)

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Reference single-thread trial generator.
std::vector<TrialRecord> generate_trials_serial(const SimConfig& config,
                                                const AngleVector& angles);

/// OpenMP trial generator; bit-identical to the serial reference.
std::vector<TrialRecord> generate_trials(const SimConfig& config,
                                         const AngleVector& angles);

/// Order-independent aggregation of trial records.
SimReport summarize(std::span<const TrialRecord> records, int dim,
                    double analytic_p_d);

SimReport run_trials(const SimConfig& config, const AngleVector& angles);

/// Full-mode unitary of one noisy trial: leaky PBS couplers plus Gaussian
/// phases on every splitter arm drawn from the given stream.
Matrix imperfect_netlist(const OpticalNetlist& netlist, const SimConfig& config,
                         TrialRng& rng);

/// Click distribution of one trial over the N conclusive detectors followed
/// by the N-1 monitors; sums to 1. Entries below the roundoff floor are
/// clamped to exact zero.
std::vector<double> trial_click_distribution(const OpticalNetlist& netlist,
                                             const SimConfig& config, TrialRng& rng);

}  // namespace symdisc
