#include "symdisc/sim.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "symdisc/errors.hpp"

namespace symdisc {

namespace {

// Probabilities below this are roundoff of exact zeros (ideal amplitudes sit
// at ~1e-16, i.e. ~1e-32 in probability); physical leakage is far above it.
constexpr double kProbabilityFloor = 1e-24;

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct TrialContext {
  SimConfig config;
  int dim = 0;
  double leak = 0.0;
  std::vector<OpticalNetlist> netlists;  // one per prepared index
  std::vector<double> source_cdf;
};

TrialContext make_context(const SimConfig& config, const AngleVector& angles) {
  TrialContext ctx;
  ctx.config = config;
  ctx.dim = angles.dim();
  ctx.leak = std::isinf(config.pbs_extinction) ? 0.0 : 1.0 / config.pbs_extinction;
  ctx.netlists.reserve(ctx.dim);
  for (int l = 0; l < ctx.dim; ++l) ctx.netlists.push_back(compile_full(angles, l));

  std::vector<double> weights = config.source;
  if (weights.empty()) weights.assign(ctx.dim, 1.0);
  double total = 0.0;
  for (double w : weights) total += w;
  ctx.source_cdf.resize(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i] / total;
    ctx.source_cdf[i] = acc;
  }
  ctx.source_cdf.back() = 1.0;
  return ctx;
}

int sample_cdf(const std::vector<double>& cdf, double u) {
  for (std::size_t i = 0; i < cdf.size(); ++i)
    if (u < cdf[i]) return static_cast<int>(i);
  return static_cast<int>(cdf.size()) - 1;
}

void propagate(const OpticalNetlist& netlist, const SimConfig& config, double leak,
               TrialRng& rng, std::span<cplx> amp) {
  std::fill(amp.begin(), amp.end(), cplx{});
  amp[mode_index(0, Pol::H)] = 1.0;
  const bool noisy = config.phase_noise_sigma > 0.0;
  for (const OpticalElement& e : netlist.elements) {
    if (noisy && e.kind == ElementKind::Bs) {
      const double arm[2] = {config.phase_noise_sigma * rng.gaussian(),
                             config.phase_noise_sigma * rng.gaussian()};
      apply_element(e, amp, leak, arm);
    } else {
      apply_element(e, amp, leak, nullptr);
    }
  }
}

/// Click distribution over 2N-1 slots: conclusive detectors then monitors.
void click_distribution(const OpticalNetlist& netlist, std::span<const cplx> amp,
                        std::span<double> probs) {
  const int n = netlist.dim.n;
  for (int j = 0; j < n; ++j)
    probs[j] = std::norm(amp[mode_index(j, Pol::V)]) +
               std::norm(amp[mode_index(j, Pol::H)]);
  for (int p = 0; p + 1 < n; ++p)
    probs[n + p] = std::norm(amp[mode_index(n + p, Pol::V)]) +
                   std::norm(amp[mode_index(n + p, Pol::H)]);
  double total = 0.0;
  for (double& x : probs) {
    if (x < kProbabilityFloor) x = 0.0;
    total += x;
  }
  for (double& x : probs) x /= total;
}

TrialRecord run_one(const TrialContext& ctx, long long trial) {
  TrialRng rng(ctx.config.seed, static_cast<std::uint64_t>(trial));
  TrialRecord rec;
  rec.prepared = static_cast<std::uint16_t>(sample_cdf(ctx.source_cdf, rng.uniform()));
  if (rng.uniform() >= ctx.config.heralding_efficiency) {
    rec.outcome = TrialOutcome::Discarded;
    return rec;
  }

  // Category draws precede the noise draws: splitter phase noise cannot move
  // probability out of the conclusive block, so with these two uniforms fixed
  // the conclusive/inconclusive/discarded split of a trial is independent of
  // phase_noise_sigma at fixed seed.
  const double u_detect = rng.uniform();
  if (rng.uniform() >= ctx.config.detector_efficiency) {
    rec.outcome = TrialOutcome::Discarded;
    return rec;
  }

  const OpticalNetlist& net = ctx.netlists[rec.prepared];
  std::array<cplx, 128> buffer;
  std::vector<cplx> heap;
  std::span<cplx> amp;
  const int modes = net.total_modes();
  if (modes <= static_cast<int>(buffer.size())) {
    amp = std::span<cplx>(buffer.data(), modes);
  } else {
    heap.resize(modes);
    amp = heap;
  }
  propagate(net, ctx.config, ctx.leak, rng, amp);

  std::array<double, 63> pbuffer;
  std::vector<double> pheap;
  std::span<double> probs;
  const int slots = 2 * ctx.dim - 1;
  if (slots <= static_cast<int>(pbuffer.size())) {
    probs = std::span<double>(pbuffer.data(), slots);
  } else {
    pheap.resize(static_cast<std::size_t>(slots));
    probs = pheap;
  }
  click_distribution(net, amp, probs);

  double acc = 0.0;
  int slot = 2 * ctx.dim - 2;
  for (int i = 0; i < static_cast<int>(probs.size()); ++i) {
    acc += probs[i];
    if (u_detect < acc) {
      slot = i;
      break;
    }
  }
  if (slot < ctx.dim) {
    rec.outcome = TrialOutcome::Conclusive;
    rec.detected = static_cast<std::int16_t>(slot);
  } else {
    rec.outcome = TrialOutcome::Inconclusive;
  }
  return rec;
}

double wilson_half_width(double phat, double n, double z, double denom) {
  return z * std::sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n)) / denom;
}

}  // namespace

void validate_config(const SimConfig& config, int dim) {
  if (dim < 2) throw InvalidConfig("dimension must be at least 2");
  if (config.trials < 1) throw InvalidConfig("trial count must be at least 1");
  if (!config.source.empty()) {
    if (static_cast<int>(config.source.size()) != dim)
      throw InvalidConfig("source distribution must list one weight per state");
    double total = 0.0;
    for (double w : config.source) {
      if (!(w >= 0.0)) throw InvalidConfig("source weights must be nonnegative");
      total += w;
    }
    if (!(total > 0.0)) throw InvalidConfig("source weights must not all be zero");
  }
  if (!(config.pbs_extinction >= 1.0))
    throw InvalidConfig("extinction ratio must be at least 1");
  if (!(config.phase_noise_sigma >= 0.0))
    throw InvalidConfig("phase noise sigma must be nonnegative");
  if (!(config.detector_efficiency > 0.0) || config.detector_efficiency > 1.0)
    throw InvalidConfig("detector efficiency must lie in (0, 1]");
  if (!(config.heralding_efficiency > 0.0) || config.heralding_efficiency > 1.0)
    throw InvalidConfig("heralding efficiency must lie in (0, 1]");
  if (config.threads < 0) throw InvalidConfig("thread count must be nonnegative");
}

TrialRng::TrialRng(std::uint64_t seed, std::uint64_t trial)
    : state_(mix64(mix64(seed) ^ mix64(trial + 0x632be59bd9b4e019ULL))) {}

std::uint64_t TrialRng::next_u64() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double TrialRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double TrialRng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

std::vector<TrialRecord> generate_trials_serial(const SimConfig& config,
                                                const AngleVector& angles) {
  validate_config(config, angles.dim());
  const TrialContext ctx = make_context(config, angles);
  std::vector<TrialRecord> records(static_cast<std::size_t>(config.trials));
  for (long long t = 0; t < config.trials; ++t)
    records[static_cast<std::size_t>(t)] = run_one(ctx, t);
  return records;
}

std::vector<TrialRecord> generate_trials(const SimConfig& config,
                                         const AngleVector& angles) {
  validate_config(config, angles.dim());
  if (config.threads == 1) return generate_trials_serial(config, angles);
  const TrialContext ctx = make_context(config, angles);
  std::vector<TrialRecord> records(static_cast<std::size_t>(config.trials));
  const long long n = config.trials;
#ifdef _OPENMP
  const int requested = config.threads > 0 ? config.threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(requested)
  for (long long t = 0; t < n; ++t)
    records[static_cast<std::size_t>(t)] = run_one(ctx, t);
#else
  for (long long t = 0; t < n; ++t)
    records[static_cast<std::size_t>(t)] = run_one(ctx, t);
#endif
  return records;
}

SimReport summarize(std::span<const TrialRecord> records, int dim,
                    double analytic_p_d) {
  if (records.empty()) throw EmptyRecords("no trial records to summarize");
  if (dim < 2) throw InvalidConfig("dimension must be at least 2");

  SimReport rep;
  rep.dim = dim;
  rep.trials = static_cast<long long>(records.size());
  rep.prepared_counts.assign(dim, 0);
  rep.inconclusive_by_prepared.assign(dim, 0);
  rep.discarded_by_prepared.assign(dim, 0);
  rep.confusion.assign(dim, std::vector<long long>(dim, 0));
  rep.analytic_p_d = analytic_p_d;

  for (const TrialRecord& r : records) {
    if (r.prepared >= static_cast<std::uint16_t>(dim))
      throw InvalidConfig("record prepared index outside 0..N-1");
    ++rep.prepared_counts[r.prepared];
    switch (r.outcome) {
      case TrialOutcome::Conclusive:
        if (r.detected < 0 || r.detected >= dim)
          throw InvalidConfig("conclusive record without a valid detector index");
        ++rep.conclusive_count;
        ++rep.confusion[r.prepared][static_cast<std::size_t>(r.detected)];
        break;
      case TrialOutcome::Inconclusive:
        ++rep.inconclusive_count;
        ++rep.inconclusive_by_prepared[r.prepared];
        break;
      case TrialOutcome::Discarded:
        ++rep.discarded_count;
        ++rep.discarded_by_prepared[r.prepared];
        break;
    }
  }

  const long long detected = rep.conclusive_count + rep.inconclusive_count;
  if (detected > 0) {
    const double n = static_cast<double>(detected);
    const double phat = static_cast<double>(rep.conclusive_count) / n;
    rep.conclusive_rate = phat;
    constexpr double z = 1.959963984540054;  // 97.5% normal quantile
    const double denom = 1.0 + z * z / n;
    const double center = (phat + z * z / (2.0 * n)) / denom;
    const double half = wilson_half_width(phat, n, z, denom);
    rep.wilson_low = std::max(0.0, center - half);
    rep.wilson_high = std::min(1.0, center + half);
    long long correct = 0;
    for (int l = 0; l < dim; ++l) correct += rep.confusion[l][l];
    rep.correct_rate = static_cast<double>(correct) / n;
  }
  return rep;
}

SimReport run_trials(const SimConfig& config, const AngleVector& angles) {
  const std::vector<TrialRecord> records = generate_trials(config, angles);
  const CoefficientVector c = coefficients_from_angles(angles);
  return summarize(records, angles.dim(), optimal_probability(c));
}

Matrix imperfect_netlist(const OpticalNetlist& netlist, const SimConfig& config,
                         TrialRng& rng) {
  validate_netlist(netlist);
  const double leak =
      std::isinf(config.pbs_extinction) ? 0.0 : 1.0 / config.pbs_extinction;
  const int modes = netlist.total_modes();

  // Draw each splitter's arm phases once, then replay them per basis column.
  std::vector<std::array<double, 2>> arm_phases;
  for (const OpticalElement& e : netlist.elements)
    if (e.kind == ElementKind::Bs && config.phase_noise_sigma > 0.0)
      arm_phases.push_back({config.phase_noise_sigma * rng.gaussian(),
                            config.phase_noise_sigma * rng.gaussian()});

  Matrix u(modes, modes);
  std::vector<cplx> column(modes);
  for (int j = 0; j < modes; ++j) {
    std::fill(column.begin(), column.end(), cplx{});
    column[j] = 1.0;
    std::size_t bs_index = 0;
    for (const OpticalElement& e : netlist.elements) {
      if (e.kind == ElementKind::Bs && config.phase_noise_sigma > 0.0) {
        apply_element(e, column, leak, arm_phases[bs_index++].data());
      } else {
        apply_element(e, column, leak, nullptr);
      }
    }
    for (int i = 0; i < modes; ++i) u.at(i, j) = column[i];
  }
  return u;
}

std::vector<double> trial_click_distribution(const OpticalNetlist& netlist,
                                             const SimConfig& config, TrialRng& rng) {
  validate_netlist(netlist);
  const double leak =
      std::isinf(config.pbs_extinction) ? 0.0 : 1.0 / config.pbs_extinction;
  std::vector<cplx> amp(netlist.total_modes());
  propagate(netlist, config, leak, rng, amp);
  std::vector<double> probs(2 * netlist.dim.n - 1);
  click_distribution(netlist, amp, probs);
  return probs;
}

}  // namespace symdisc
