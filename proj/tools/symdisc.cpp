#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "symdisc/errors.hpp"
#include "symdisc/io.hpp"

namespace {

using namespace symdisc;

/// Command-line level mistakes that are not domain errors; exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Radian expression with a `pi` literal: factors are numbers or pi, joined
/// by * and /; a number directly followed by pi multiplies (0.3pi).
double parse_pi_expression(const std::string& raw) {
  std::string text;
  for (std::size_t i = 0; i < raw.size();) {
    if (raw.compare(i, 2, "\xcf\x80") == 0) {
      text += "pi";
      i += 2;
    } else if (raw[i] == ' ' || raw[i] == '\t') {
      ++i;
    } else {
      text += raw[i];
      ++i;
    }
  }
  if (text.empty()) throw UsageError("empty numeric expression");

  std::size_t pos = 0;
  double sign = 1.0;
  if (text[pos] == '+' || text[pos] == '-') {
    if (text[pos] == '-') sign = -1.0;
    ++pos;
  }
  auto factor = [&]() -> double {
    if (text.compare(pos, 2, "pi") == 0) {
      pos += 2;
      return std::numbers::pi;
    }
    double v = 0.0;
    auto [p, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), v);
    if (ec != std::errc{} || p == text.data() + pos)
      throw UsageError("bad numeric expression '" + raw + "'");
    pos = static_cast<std::size_t>(p - text.data());
    if (text.compare(pos, 2, "pi") == 0) {
      pos += 2;
      v *= std::numbers::pi;
    }
    return v;
  };
  double value = factor();
  while (pos < text.size()) {
    char op = text[pos];
    if (op != '*' && op != '/')
      throw UsageError("bad numeric expression '" + raw + "'");
    ++pos;
    double f = factor();
    if (op == '*') {
      value *= f;
    } else {
      if (f == 0.0) throw UsageError("division by zero in '" + raw + "'");
      value /= f;
    }
  }
  return sign * value;
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    auto end = comma == std::string::npos ? text.size() : comma;
    out.push_back(parse_pi_expression(text.substr(start, end - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

struct FamilyFlags {
  int dim = 0;
  std::string angles;
  std::string coeffs;
};

void add_family_flags(CLI::App* sub, FamilyFlags& f, bool required) {
  sub->add_option("--dim", f.dim,
                  "family dimension N; checked against --angles/--coeffs, used "
                  "alone it selects a generic strictly-decreasing test family");
  auto* g = sub->add_option_group("family", "fiducial-state specification");
  g->add_option("--angles", f.angles,
                "comma-separated splitting angles theta_1..theta_{N-1}, each in "
                "(0, pi/2); pi expressions allowed, e.g. pi/3,0.3pi,pi/4");
  g->add_option("--coeffs", f.coeffs,
                "comma-separated fiducial amplitudes c_0..c_{N-1}, positive with "
                "unit 2-norm");
  if (required)
    g->require_option(1);
  else
    g->require_option(0, 1);
}

/// Generic strictly-decreasing family used when only --dim is given, so that
/// every conditional rotation appears and the smallest amplitude sits last.
AngleVector canonical_angles(int n) {
  if (n < 2) throw InvalidConfig("dimension must be at least 2");
  std::vector<double> w(static_cast<std::size_t>(n));
  double total = 0.0;
  for (int k = 0; k < n; ++k) {
    w[k] = 2.0 * n - k;
    total += w[k];
  }
  std::vector<double> c(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) c[k] = std::sqrt(w[k] / total);
  return angles_from_coefficients(CoefficientVector::from_values(std::move(c)));
}

AngleVector resolve_angles(const FamilyFlags& f, bool allow_dim_only) {
  if (!f.angles.empty()) {
    AngleVector a{parse_number_list(f.angles)};
    if (f.dim > 0 && a.dim() != f.dim)
      throw DimensionMismatch("--dim " + std::to_string(f.dim) + " needs " +
                              std::to_string(f.dim - 1) + " angles, got " +
                              std::to_string(a.dim() - 1));
    validate_angles(a);
    return a;
  }
  if (!f.coeffs.empty()) {
    std::vector<double> values = parse_number_list(f.coeffs);
    if (f.dim > 0 && static_cast<int>(values.size()) != f.dim)
      throw DimensionMismatch("--dim " + std::to_string(f.dim) + " needs " +
                              std::to_string(f.dim) + " amplitudes, got " +
                              std::to_string(values.size()));
    return angles_from_coefficients(CoefficientVector::from_values(std::move(values)));
  }
  if (allow_dim_only && f.dim > 0) return canonical_angles(f.dim);
  throw UsageError(allow_dim_only ? "give --angles, --coeffs, or --dim"
                                  : "give --angles or --coeffs");
}

std::filesystem::path resolve_out_path(const std::string& out) {
  std::filesystem::path p(out);
  if (p.is_relative())
    if (const char* dir = std::getenv("SYMDISC_OUT_DIR"))
      if (*dir != '\0') p = std::filesystem::path(dir) / p;
  return p;
}

void emit_document(const std::string& content, const std::string& out) {
  if (out.empty()) {
    std::fwrite(content.data(), 1, content.size(), stdout);
    return;
  }
  write_file_atomic(resolve_out_path(out), content);
}

std::string join_doubles(std::span<const double> v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) s += ' ';
    s += format_double(v[i]);
  }
  return s;
}

void kv(std::string& out, std::string_view label, const std::string& value) {
  out += label;
  for (std::size_t i = label.size(); i < 23; ++i) out += ' ';
  out += value;
  out += '\n';
}

// ---------------------------------------------------------------- discriminate

struct DiscriminateFlags {
  FamilyFlags family;
  std::string format = "text";
  std::string out;
};

int run_discriminate(const DiscriminateFlags& flags) {
  AngleVector angles = resolve_angles(flags.family, false);
  CoefficientVector c = coefficients_from_angles(angles);
  SymmetricFamily family = build_family(c);
  Povm povm = make_povm(c);
  double residual = verify_completeness(povm);
  int n = c.dim();

  std::vector<double> a_s(static_cast<std::size_t>(n));
  std::vector<double> a_i(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    a_s[k] = povm.success_op.at(k, k).real();
    a_i[k] = povm.failure_op.at(k, k).real();
  }
  std::vector<ProtocolOutcome> outcomes;
  for (int l = 0; l < n; ++l) outcomes.push_back(apply_protocol(c, l));

  std::string doc;
  if (flags.format == "json") {
    ordered_json j;
    j["schema_version"] = 1;
    j["dim"] = n;
    j["angles"] = angles.thetas;
    j["coefficients"] = c.c;
    j["q"] = family.q;
    j["min_coefficient"] = min_coefficient(c);
    j["min_index"] = min_coefficient_index(c);
    j["p_d"] = povm.p_success;
    j["a_s_diagonal"] = a_s;
    j["a_i_diagonal"] = a_i;
    j["completeness_residual"] = residual;
    ordered_json states = ordered_json::array();
    for (const ProtocolOutcome& o : outcomes) {
      ordered_json js;
      js["prepared"] = o.input_index;
      js["p_conclusive"] = o.p_conclusive;
      js["clicks"] = o.fourier_click_distribution;
      states.push_back(std::move(js));
    }
    j["states"] = std::move(states);
    doc = j.dump(2) + "\n";
  } else {
    kv(doc, "dim", std::to_string(n));
    kv(doc, "angles", join_doubles(angles.thetas));
    kv(doc, "coefficients", join_doubles(c.c));
    kv(doc, "q", format_double(family.q));
    kv(doc, "min coefficient",
       format_double(min_coefficient(c)) + " (index " +
           std::to_string(min_coefficient_index(c)) + ")");
    kv(doc, "p_d", format_double(povm.p_success));
    kv(doc, "A_s diagonal", join_doubles(a_s));
    kv(doc, "A_i diagonal", join_doubles(a_i));
    kv(doc, "completeness residual", format_double(residual));
    for (const ProtocolOutcome& o : outcomes)
      kv(doc, "state " + std::to_string(o.input_index),
         "conclusive " + format_double(o.p_conclusive) + "  clicks " +
             join_doubles(o.fourier_click_distribution));
  }
  emit_document(doc, flags.out);
  return 0;
}

// --------------------------------------------------------------------- compile

struct CompileFlags {
  FamilyFlags family;
  int state = 0;
  std::string format = "netlist-text";
  std::string out;
  bool check_counts = false;
};

std::string count_table(const ComponentCount& counts) {
  std::string t = "component count\n";
  auto row = [&t](const char* name, int v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%-9s %d\n", name, v);
    t += buf;
  };
  row("HWP", counts.hwp);
  row("PBS", counts.pbs);
  row("BS", counts.bs);
  row("PS", counts.ps);
  row("MIRROR", counts.mirrors);
  return t;
}

int run_check_counts() {
  struct Expected {
    int n, hwp, pbs, bs;
  };
  constexpr Expected table[] = {{4, 7, 6, 4}, {8, 15, 14, 12}, {16, 31, 30, 32}};
  bool all_ok = true;
  for (const Expected& e : table) {
    ComponentCount counts = count_components(compile_full(canonical_angles(e.n), 0));
    bool ok = counts.hwp == e.hwp && counts.pbs == e.pbs && counts.bs == e.bs;
    all_ok = all_ok && ok;
    if (ok) {
      std::printf("N=%-2d HWP=%-2d PBS=%-2d BS=%-2d ok\n", e.n, counts.hwp,
                  counts.pbs, counts.bs);
    } else {
      std::printf("N=%-2d HWP=%-2d PBS=%-2d BS=%-2d MISMATCH expected HWP=%d PBS=%d BS=%d\n",
                  e.n, counts.hwp, counts.pbs, counts.bs, e.hwp, e.pbs, e.bs);
    }
  }
  return all_ok ? 0 : 5;
}

int run_compile(const CompileFlags& flags) {
  if (flags.check_counts) return run_check_counts();

  AngleVector angles = resolve_angles(flags.family, true);
  OpticalNetlist netlist = compile_full(angles, flags.state);
  std::string table = count_table(count_components(netlist));

  if (flags.out.empty()) {
    std::string doc = flags.format == "json" ? netlist_to_json(netlist).dump(2) + "\n"
                                             : netlist_to_text(netlist);
    std::fwrite(doc.data(), 1, doc.size(), stdout);
    std::fputs(table.c_str(), stderr);
    return 0;
  }
  auto base = resolve_out_path(flags.out).string();
  write_file_atomic(base + ".txt", netlist_to_text(netlist));
  write_file_atomic(base + ".json", netlist_to_json(netlist).dump(2) + "\n");
  std::fputs(table.c_str(), stdout);
  return 0;
}

// -------------------------------------------------------------------- simulate

struct SimulateFlags {
  FamilyFlags family;
  long long trials = 100000;
  std::uint64_t seed = 0;
  std::string source;
  double extinction = std::numeric_limits<double>::infinity();
  double phase_noise = 0.0;
  double detector_efficiency = 1.0;
  double heralding_efficiency = 1.0;
  int threads = 0;
  std::string format = "json";
  std::string out;
};

void add_noise_flags(CLI::App* sub, SimulateFlags& f) {
  sub->add_option("--seed", f.seed, "RNG seed; every output is a pure function of flags and seed");
  sub->add_option("--extinction", f.extinction,
                  "polarizing splitter extinction ratio (>= 1; inf = ideal)");
  sub->add_option("--phase-noise", f.phase_noise,
                  "std deviation (radians) of per-trial phases on splitter arms");
  sub->add_option("--detector-efficiency", f.detector_efficiency,
                  "click probability for a photon reaching a detector, in (0,1]");
  sub->add_option("--heralding-efficiency", f.heralding_efficiency,
                  "probability a trial's photon enters the network, in (0,1]");
  sub->add_option("--threads", f.threads, "worker threads; 0 = all cores, 1 = serial");
}

SimConfig sim_config_from(const SimulateFlags& f) {
  SimConfig cfg;
  cfg.trials = f.trials;
  cfg.seed = f.seed;
  if (!f.source.empty()) cfg.source = parse_number_list(f.source);
  cfg.pbs_extinction = f.extinction;
  cfg.phase_noise_sigma = f.phase_noise;
  cfg.detector_efficiency = f.detector_efficiency;
  cfg.heralding_efficiency = f.heralding_efficiency;
  cfg.threads = f.threads;
  return cfg;
}

int run_simulate(const SimulateFlags& flags) {
  AngleVector angles = resolve_angles(flags.family, false);
  SimConfig cfg = sim_config_from(flags);
  SimReport report = run_trials(cfg, angles);
  std::string doc = flags.format == "csv"
                        ? report_to_csv(report)
                        : report_to_json(report, cfg, angles).dump(2) + "\n";
  emit_document(doc, flags.out);
  return 0;
}

// ----------------------------------------------------------------------- sweep

struct SweepFlags {
  SimulateFlags sim;  // trials = 0 means analytic-only rows
  std::string values;
  int index = 0;
  std::string out;
};

int run_sweep(const SweepFlags& flags) {
  AngleVector base = resolve_angles(flags.sim.family, true);
  if (flags.index < 0 || flags.index >= base.dim() - 1)
    throw UsageError("--index must name one of the " +
                     std::to_string(base.dim() - 1) + " angles");
  std::vector<double> values = parse_number_list(flags.values);
  if (flags.sim.trials > 0) Dimension::of(base.dim()).log2();

  std::string csv =
      "theta,valid,p_d,conclusive_rate,wilson_low,wilson_high,correct_rate\n";
  for (double v : values) {
    csv += format_double(v);
    AngleVector a = base;
    a.thetas[static_cast<std::size_t>(flags.index)] = v;
    try {
      validate_angles(a);
      double p_d = optimal_probability(coefficients_from_angles(a));
      csv += ",1," + format_double(p_d);
      if (flags.sim.trials > 0) {
        SimConfig cfg = sim_config_from(flags.sim);
        SimReport report = run_trials(cfg, a);
        csv += ',' + format_double(report.conclusive_rate);
        csv += ',' + format_double(report.wilson_low);
        csv += ',' + format_double(report.wilson_high);
        csv += ',' + format_double(report.correct_rate);
      } else {
        csv += ",,,,";
      }
    } catch (const std::invalid_argument&) {
      csv += ",0,,,,,";
    }
    csv += '\n';
  }
  emit_document(csv, flags.out);
  return 0;
}

// ---------------------------------------------------------------------- verify

struct VerifyFlags {
  int dim = 0;
  std::uint64_t seed = 20260818;
  bool inject_fourier_error = false;
};

AngleVector random_angles(int n, TrialRng& rng) {
  std::vector<double> t(static_cast<std::size_t>(n - 1));
  for (double& v : t)
    v = 0.15 + (std::numbers::pi / 2 - 0.3) * rng.uniform();
  return AngleVector{std::move(t)};
}

std::string detailf(const char* fmt, ...) {
  char buf[256];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return buf;
}

int run_verify(const VerifyFlags& flags) {
  std::vector<int> analytic_dims = {2, 3, 4, 8};
  std::vector<int> optical_dims = {2, 4, 8};
  if (flags.dim >= 2) {
    if (std::find(analytic_dims.begin(), analytic_dims.end(), flags.dim) ==
        analytic_dims.end())
      analytic_dims.push_back(flags.dim);
    if (Dimension::of(flags.dim).is_power_of_two() &&
        std::find(optical_dims.begin(), optical_dims.end(), flags.dim) ==
            optical_dims.end())
      optical_dims.push_back(flags.dim);
  }
  const std::uint64_t seed = flags.seed;

  struct Check {
    const char* name;
    std::function<std::string()> run;
  };
  std::vector<Check> checks;

  checks.push_back({"reciprocal-biorthogonality", [&] {
    for (int n : analytic_dims) {
      TrialRng rng(seed, 1000 + static_cast<std::uint64_t>(n));
      for (int rep = 0; rep < 5; ++rep) {
        SymmetricFamily fam =
            build_family(coefficients_from_angles(random_angles(n, rng)));
        double expect = n / std::sqrt(fam.q);
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            cplx ip = inner(fam.reciprocals[k], fam.states[l]);
            double diff = std::abs(ip - (k == l ? cplx(expect) : cplx(0.0)));
            if (diff >= 1e-10)
              return detailf("N=%d draw %d overlap (%d,%d) off by %.3g", n, rep,
                             k, l, diff);
          }
      }
    }
    return std::string();
  }});

  checks.push_back({"povm-completeness", [&] {
    for (int n : analytic_dims) {
      TrialRng rng(seed, 2000 + static_cast<std::uint64_t>(n));
      for (int rep = 0; rep < 5; ++rep) {
        CoefficientVector c = coefficients_from_angles(random_angles(n, rng));
        double residual = verify_completeness(make_povm(c));
        if (residual >= 1e-10)
          return detailf("N=%d draw %d residual %.3g", n, rep, residual);
      }
    }
    return std::string();
  }});

  checks.push_back({"conditional-unitarity", [&] {
    for (int n : analytic_dims) {
      TrialRng rng(seed, 3000 + static_cast<std::uint64_t>(n));
      for (int rep = 0; rep < 5; ++rep) {
        CoefficientVector c = coefficients_from_angles(random_angles(n, rng));
        double residual = unitarity_residual(conditional_unitary(c).matrix);
        if (residual >= 1e-10)
          return detailf("N=%d draw %d residual %.3g", n, rep, residual);
      }
    }
    return std::string();
  }});

  checks.push_back({"optimal-bound", [&] {
    for (int n : analytic_dims) {
      TrialRng rng(seed, 4000 + static_cast<std::uint64_t>(n));
      for (int rep = 0; rep < 5; ++rep) {
        SymmetricFamily fam =
            build_family(coefficients_from_angles(random_angles(n, rng)));
        double p_d = optimal_probability(fam.coefficients);
        detection_operators(fam, p_d);
        bool rejected = false;
        try {
          detection_operators(fam, p_d + 0.01);
        } catch (const ProbabilityOutOfRange&) {
          rejected = true;
        }
        if (!rejected)
          return detailf("N=%d draw %d accepted p_D + 0.01", n, rep);
      }
    }
    return std::string();
  }});

  checks.push_back({"two-state-limit", [&] {
    for (int i = 1; i <= 15; ++i) {
      double theta = 0.05 * static_cast<double>(i);
      CoefficientVector c = coefficients_from_angles(AngleVector{{theta}});
      SymmetricFamily fam = build_family(c);
      double p_d = optimal_probability(c);
      double pair_bound = two_state_bound(fam.states[0], fam.states[1]);
      double oracle = 1.0 - std::cos(2.0 * theta);
      if (std::abs(p_d - pair_bound) >= 1e-12 || std::abs(p_d - oracle) >= 1e-12)
        return detailf("theta=%.2f p_D=%.15g pair=%.15g oracle=%.15g", theta,
                       p_d, pair_bound, oracle);
    }
    return std::string();
  }});

  checks.push_back({"fourier-unitarity", [&] {
    for (int n : {2, 3, 4, 8, 16}) {
      Dimension dim = Dimension::of(n);
      Matrix product = fourier(dim) * inverse_fourier(dim);
      double residual = frobenius_norm(product - Matrix::identity(n));
      if (residual >= 1e-12) return detailf("N=%d residual %.3g", n, residual);
    }
    return std::string();
  }});

  checks.push_back({"fourier-network", [&] {
    for (int n : optical_dims) {
      Dimension dim = Dimension::of(n);
      Matrix u = simulate_elements(compile_fourier_inverse(dim), 2 * n);
      Matrix ref = inverse_fourier(dim);
      if (flags.inject_fourier_error) ref.at(1, 0) += 1e-3;
      double worst = 0.0;
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s)
          worst = std::max(worst, std::abs(u.at(2 * r, 2 * s) - ref.at(r, s)));
      if (worst >= 1e-12)
        return detailf("N=%d max entry deviation %.3g", n, worst);
    }
    return std::string();
  }});

  checks.push_back({"component-counts", [&] {
    struct Expected {
      int n, hwp, pbs, bs;
    };
    constexpr Expected table[] = {{4, 7, 6, 4}, {8, 15, 14, 12}, {16, 31, 30, 32}};
    for (const Expected& e : table) {
      ComponentCount counts =
          count_components(compile_full(canonical_angles(e.n), 0));
      if (counts.hwp != e.hwp || counts.pbs != e.pbs || counts.bs != e.bs)
        return detailf("N=%d got HWP=%d PBS=%d BS=%d want %d/%d/%d", e.n,
                       counts.hwp, counts.pbs, counts.bs, e.hwp, e.pbs, e.bs);
    }
    return std::string();
  }});

  checks.push_back({"netlist-equivalence", [&] {
    for (int n : optical_dims) {
      TrialRng rng(seed, 5000 + static_cast<std::uint64_t>(n));
      int reps = n <= 4 ? 5 : 3;
      for (int rep = 0; rep < reps; ++rep) {
        AngleVector a = random_angles(n, rng);
        OpticalNetlist net = compile_full(a, rep % n);
        double residual =
            protocol_equivalence_residual(net, coefficients_from_angles(a));
        if (residual >= 1e-8)
          return detailf("N=%d draw %d residual %.3g", n, rep, residual);
      }
    }
    return std::string();
  }});

  checks.push_back({"click-distribution", [&] {
    for (int n : optical_dims) {
      TrialRng rng(seed, 6000 + static_cast<std::uint64_t>(n));
      AngleVector a = random_angles(n, rng);
      double p_d = optimal_probability(coefficients_from_angles(a));
      for (int l : {0, n - 1}) {
        ClickProbabilities cp = click_probabilities(compile_full(a, l));
        if (std::abs(cp.conclusive[static_cast<std::size_t>(l)] - p_d) >= 1e-10)
          return detailf("N=%d l=%d conclusive off by %.3g", n, l,
                         std::abs(cp.conclusive[static_cast<std::size_t>(l)] - p_d));
        for (int k = 0; k < n; ++k)
          if (k != l && cp.conclusive[static_cast<std::size_t>(k)] >= 1e-18)
            return detailf("N=%d l=%d cross-talk %.3g at detector %d", n, l,
                           cp.conclusive[static_cast<std::size_t>(k)], k);
        double monitor = 0.0;
        for (double m : cp.monitor) monitor += m;
        if (std::abs(monitor + p_d - 1.0) >= 1e-10)
          return detailf("N=%d l=%d monitor total off by %.3g", n, l,
                         std::abs(monitor + p_d - 1.0));
      }
    }
    return std::string();
  }});

  checks.push_back({"simulation-determinism", [&] {
    SimConfig cfg;
    cfg.trials = 2000;
    cfg.seed = seed;
    cfg.pbs_extinction = 1e4;
    cfg.phase_noise_sigma = 0.01;
    cfg.detector_efficiency = 0.9;
    cfg.heralding_efficiency = 0.95;
    AngleVector a = canonical_angles(4);
    cfg.threads = 1;
    std::vector<TrialRecord> serial = generate_trials_serial(cfg, a);
    cfg.threads = 2;
    std::vector<TrialRecord> parallel = generate_trials(cfg, a);
    if (serial != parallel)
      return std::string("parallel records differ from the serial reference");
    return std::string();
  }});

  bool all_ok = true;
  for (const Check& check : checks) {
    std::string detail;
    try {
      detail = check.run();
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    if (detail.empty()) {
      std::printf("PASS %s\n", check.name);
    } else {
      std::printf("FAIL %s (%s)\n", check.name, detail.c_str());
      all_ok = false;
    }
  }
  return all_ok ? 0 : 5;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Optimal unambiguous discrimination of N symmetric pure states:\n"
      "analytic protocol, polarization-optics network compiler, and a\n"
      "Monte-Carlo model of the network with realistic imperfections."};
  app.footer(
      "Exit codes: 0 success, 2 usage, 3 domain error, 4 dimension error,\n"
      "5 check failure, 6 I/O error.\n"
      "Relative --out paths resolve under $SYMDISC_OUT_DIR when it is set.");
  app.require_subcommand(1);

  DiscriminateFlags disc;
  auto* cmd_disc = app.add_subcommand(
      "discriminate", "analytic protocol quantities for one family");
  add_family_flags(cmd_disc, disc.family, true);
  cmd_disc->add_option("--format", disc.format, "output format")
      ->check(CLI::IsMember({"text", "json"}));
  cmd_disc->add_option("--out", disc.out, "output file (atomic write)");

  CompileFlags comp;
  auto* cmd_comp =
      app.add_subcommand("compile", "compile the optical network for one family");
  add_family_flags(cmd_comp, comp.family, false);
  cmd_comp->add_option("--state", comp.state, "prepared family index l");
  cmd_comp->add_option("--format", comp.format, "stdout netlist format")
      ->check(CLI::IsMember({"netlist-text", "json"}));
  cmd_comp->add_option(
      "--out", comp.out,
      "output base path; writes <base>.txt and <base>.json, counts to stdout");
  cmd_comp->add_flag("--check-counts", comp.check_counts,
                     "check component counts for N in {4,8,16}; exit 5 on mismatch");

  SimulateFlags sim;
  auto* cmd_sim =
      app.add_subcommand("simulate", "Monte-Carlo run of the compiled network");
  add_family_flags(cmd_sim, sim.family, true);
  cmd_sim->add_option("--trials", sim.trials, "number of trials (> 0)")
      ->check(CLI::PositiveNumber);
  cmd_sim->add_option("--source", sim.source,
                      "comma-separated preparation weights (default uniform)");
  add_noise_flags(cmd_sim, sim);
  cmd_sim->add_option("--format", sim.format, "output format")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd_sim->add_option("--out", sim.out, "output file (atomic write)");

  SweepFlags sweep;
  sweep.sim.trials = 0;
  auto* cmd_sweep = app.add_subcommand(
      "sweep", "CSV over a grid of one splitting angle; analytic p_D per row");
  add_family_flags(cmd_sweep, sweep.sim.family, false);
  cmd_sweep->add_option("--values", sweep.values, "comma-separated grid of angle values")
      ->required();
  cmd_sweep->add_option("--index", sweep.index, "which angle the grid replaces (0-based)");
  cmd_sweep
      ->add_option("--trials", sweep.sim.trials,
                   "trials per grid point; 0 = analytic columns only")
      ->check(CLI::NonNegativeNumber);
  add_noise_flags(cmd_sweep, sweep.sim);
  cmd_sweep->add_option("--out", sweep.out, "output file (atomic write)");

  VerifyFlags verify;
  auto* cmd_verify =
      app.add_subcommand("verify", "run the invariant battery; exit 0 iff all pass");
  cmd_verify->add_option("--dim", verify.dim, "extra dimension to include in the battery");
  cmd_verify->add_option("--seed", verify.seed, "seed for the random draws");
  cmd_verify
      ->add_flag("--inject-fourier-error", verify.inject_fourier_error,
                 "perturb the Fourier reference to exercise failure reporting")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*cmd_disc) return run_discriminate(disc);
    if (*cmd_comp) return run_compile(comp);
    if (*cmd_sim) return run_simulate(sim);
    if (*cmd_sweep) return run_sweep(sweep);
    if (*cmd_verify) return run_verify(verify);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const DimensionNotPowerOfTwo& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const DimensionMismatch& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 6;
  } catch (const std::runtime_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 6;
  }
  return 0;
}
