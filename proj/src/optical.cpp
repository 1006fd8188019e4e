#include "symdisc/optical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "symdisc/errors.hpp"

namespace symdisc {

namespace {

constexpr double kPi = std::numbers::pi;

/// Wraps into (-pi, pi].
double wrap_phase(double phi) {
  phi = std::fmod(phi, 2.0 * kPi);
  if (phi <= -kPi) phi += 2.0 * kPi;
  if (phi > kPi) phi -= 2.0 * kPi;
  return phi;
}

int bit_reverse(int value, int bits) {
  int r = 0;
  for (int b = 0; b < bits; ++b)
    if (value & (1 << b)) r |= 1 << (bits - 1 - b);
  return r;
}

/// Identity permutation unless the smallest coefficient sits away from the
/// last path; then the involution swapping it with the last path.
std::vector<int> min_last_permutation(const CoefficientVector& c) {
  const int n = c.dim();
  std::vector<int> perm(n);
  for (int j = 0; j < n; ++j) perm[j] = j;
  const int m = min_coefficient_index(c);
  const double cmin = std::abs(c.c[m]);
  if (std::abs(c.c[n - 1]) <= cmin * (1.0 + 1e-12)) return perm;  // already last
  std::swap(perm[m], perm[n - 1]);
  return perm;
}

std::vector<OpticalElement> compile_preparation_impl(const AngleVector& angles,
                                                     int prepared_index,
                                                     std::span<const int> perm) {
  validate_angles(angles);
  const int n = angles.dim();
  Dimension::of(n).log2();
  if (prepared_index < 0 || prepared_index >= n)
    throw InvalidConfig("prepared index outside 0..N-1");

  std::vector<OpticalElement> out;
  // The input photon is H at path 0. Each HWP rotates by pi/2 - theta_i, the
  // PBS keeps the V portion on the current path (logical |i-1>) and hands the
  // H remainder to the next path. The terminal HWP turns the leftover H into V.
  for (int i = 1; i < n; ++i) {
    out.push_back(OpticalElement::hwp(Stage::I, i - 1, kPi / 2.0 - angles.thetas[i - 1]));
    out.push_back(OpticalElement::pbs(Stage::I, i - 1, i));
  }
  out.push_back(OpticalElement::hwp(Stage::I, n - 1, kPi / 2.0));

  if (prepared_index > 0) {
    for (int path = 0; path < n; ++path) {
      const int logical = perm.empty() ? path : perm[path];
      const double phi =
          wrap_phase(2.0 * kPi * prepared_index * logical / n);
      if (std::abs(phi) < 1e-15) continue;
      out.push_back(OpticalElement::ps(Stage::I, path, Pol::V, phi));
    }
  }
  return out;
}

std::vector<OpticalElement> compile_conditional_impl(const CoefficientVector& c) {
  const int n = c.dim();
  const double cmin = min_coefficient(c);
  if (std::abs(c.c[n - 1]) > cmin * (1.0 + 1e-12))
    throw InvalidConfig("conditional stage requires the smallest amplitude on the last path");

  std::vector<OpticalElement> out;
  for (int path = 0; path < n; ++path) {
    const double ratio = std::min(1.0, cmin / std::abs(c.c[path]));
    if (ratio >= 1.0 - 1e-12) continue;  // amplitude already minimal
    out.push_back(OpticalElement::hwp(Stage::II, path, std::acos(ratio)));
  }
  return out;
}

}  // namespace

OpticalElement OpticalElement::hwp(Stage s, int path, double angle) {
  OpticalElement e;
  e.kind = ElementKind::Hwp;
  e.stage = s;
  e.path_a = path;
  e.param = angle;
  return e;
}

OpticalElement OpticalElement::pbs(Stage s, int a, int b) {
  OpticalElement e;
  e.kind = ElementKind::Pbs;
  e.stage = s;
  e.path_a = a;
  e.path_b = b;
  return e;
}

OpticalElement OpticalElement::ps(Stage s, int path, Pol pol, double phase) {
  OpticalElement e;
  e.kind = ElementKind::Ps;
  e.stage = s;
  e.path_a = path;
  e.pol = pol;
  e.param = phase;
  return e;
}

OpticalElement OpticalElement::bs(Stage s, int a, int b) {
  OpticalElement e;
  e.kind = ElementKind::Bs;
  e.stage = s;
  e.path_a = a;
  e.path_b = b;
  return e;
}

OpticalElement OpticalElement::mirror(Stage s, int a, int b) {
  OpticalElement e;
  e.kind = ElementKind::Mirror;
  e.stage = s;
  e.path_a = a;
  e.path_b = b;
  return e;
}

OpticalElement OpticalElement::detector(Stage s, int path, std::string label) {
  OpticalElement e;
  e.kind = ElementKind::Detector;
  e.stage = s;
  e.path_a = path;
  e.label = std::move(label);
  return e;
}

int mode_index(int path, Pol pol) { return 2 * path + (pol == Pol::V ? 0 : 1); }

std::string to_string(Stage s) {
  switch (s) {
    case Stage::I: return "I";
    case Stage::II: return "II";
    case Stage::III: return "III";
    case Stage::IV: return "IV";
  }
  return "?";
}

std::string to_string(ElementKind k) {
  switch (k) {
    case ElementKind::Hwp: return "HWP";
    case ElementKind::Pbs: return "PBS";
    case ElementKind::Ps: return "PS";
    case ElementKind::Bs: return "BS";
    case ElementKind::Mirror: return "MIRROR";
    case ElementKind::Detector: return "DETECTOR";
  }
  return "?";
}

std::vector<OpticalElement> compile_preparation(const AngleVector& angles,
                                                int prepared_index) {
  return compile_preparation_impl(angles, prepared_index, {});
}

std::vector<OpticalElement> compile_conditional(const AngleVector& angles) {
  validate_angles(angles);
  Dimension::of(angles.dim()).log2();
  return compile_conditional_impl(coefficients_from_angles(angles));
}

std::vector<OpticalElement> compile_projection(Dimension dim) {
  const int n = Dimension::of(dim.n).n;
  dim.log2();
  std::vector<OpticalElement> out;
  for (int path = 0; path + 1 < n; ++path)
    out.push_back(OpticalElement::pbs(Stage::III, path, n + path));
  return out;
}

std::vector<OpticalElement> compile_fourier_inverse(Dimension dim) {
  const int n = dim.n;
  const int bits = Dimension::of(n).log2();

  std::vector<OpticalElement> out;
  // Input reordering of the decimation-in-time butterfly, as path crossings.
  for (int r = 0; r < n; ++r) {
    const int s = bit_reverse(r, bits);
    if (s > r) out.push_back(OpticalElement::mirror(Stage::IV, r, s));
  }
  // Combiners: a 50:50 splitter sandwiched between -pi/2 shifts equals the
  // (x+wy, x-wy)/sqrt 2 butterfly once the twiddle w is merged into the
  // leading shift.
  for (int len = 2; len <= n; len *= 2) {
    for (int start = 0; start < n; start += len) {
      for (int t = 0; t < len / 2; ++t) {
        const int a = start + t;
        const int b = start + t + len / 2;
        const double twiddle = -2.0 * kPi * t / len;
        out.push_back(OpticalElement::ps(Stage::IV, b, Pol::V,
                                         wrap_phase(twiddle - kPi / 2.0)));
        out.push_back(OpticalElement::bs(Stage::IV, a, b));
        out.push_back(OpticalElement::ps(Stage::IV, b, Pol::V, -kPi / 2.0));
      }
    }
  }
  return out;
}

OpticalNetlist compile_full(const AngleVector& angles, int prepared_index) {
  validate_angles(angles);
  const int n = angles.dim();
  Dimension dim = Dimension::of(n);
  dim.log2();
  if (prepared_index < 0 || prepared_index >= n)
    throw InvalidConfig("prepared index outside 0..N-1");

  const CoefficientVector c = coefficients_from_angles(angles);
  const std::vector<int> perm = min_last_permutation(c);
  bool identity = true;
  for (int j = 0; j < n; ++j) identity = identity && perm[j] == j;

  std::vector<double> d(n);
  for (int k = 0; k < n; ++k) d[k] = c.c[perm[k]];
  const CoefficientVector dc{d};
  const AngleVector prep_angles = identity ? angles : angles_from_coefficients(dc);

  OpticalNetlist net;
  net.dim = dim;
  net.prepared_index = prepared_index;
  net.logical_to_path = perm;

  for (OpticalElement& e : compile_preparation_impl(prep_angles, prepared_index, perm))
    net.elements.push_back(std::move(e));
  for (OpticalElement& e : compile_conditional_impl(dc))
    net.elements.push_back(std::move(e));
  for (OpticalElement& e : compile_projection(dim)) net.elements.push_back(std::move(e));

  // Undo the path relabeling before the Fourier stage so detector j means
  // logical j again.
  if (!identity) {
    const int m = min_coefficient_index(c);
    net.elements.push_back(OpticalElement::mirror(Stage::IV, m, n - 1));
  }
  for (OpticalElement& e : compile_fourier_inverse(dim)) net.elements.push_back(std::move(e));

  for (int j = 0; j < n; ++j)
    net.elements.push_back(
        OpticalElement::detector(Stage::IV, j, "D" + std::to_string(j)));
  for (int p = 0; p + 1 < n; ++p)
    net.elements.push_back(
        OpticalElement::detector(Stage::IV, n + p, "M" + std::to_string(p)));
  return net;
}

ComponentCount count_components(const OpticalNetlist& netlist) {
  ComponentCount count;
  for (const OpticalElement& e : netlist.elements) {
    switch (e.kind) {
      case ElementKind::Hwp: ++count.hwp; break;
      case ElementKind::Pbs: ++count.pbs; break;
      case ElementKind::Bs: ++count.bs; break;
      case ElementKind::Ps: ++count.ps; break;
      case ElementKind::Mirror: ++count.mirrors; break;
      case ElementKind::Detector: break;
    }
  }
  return count;
}

void apply_element(const OpticalElement& e, std::span<cplx> amplitudes,
                   double pbs_leak, const double* bs_arm_phases) {
  switch (e.kind) {
    case ElementKind::Hwp: {
      const double co = std::cos(e.param);
      const double si = std::sin(e.param);
      cplx& h = amplitudes[mode_index(e.path_a, Pol::H)];
      cplx& v = amplitudes[mode_index(e.path_a, Pol::V)];
      const cplx h0 = h, v0 = v;
      h = co * h0 - si * v0;
      v = si * h0 + co * v0;
      return;
    }
    case ElementKind::Pbs: {
      cplx& ha = amplitudes[mode_index(e.path_a, Pol::H)];
      cplx& hb = amplitudes[mode_index(e.path_b, Pol::H)];
      cplx& va = amplitudes[mode_index(e.path_a, Pol::V)];
      cplx& vb = amplitudes[mode_index(e.path_b, Pol::V)];
      if (pbs_leak <= 0.0) {
        std::swap(ha, hb);
        return;
      }
      const double keep = std::sqrt(1.0 - pbs_leak);
      const cplx leak(0.0, std::sqrt(pbs_leak));
      const cplx ha0 = ha, hb0 = hb, va0 = va, vb0 = vb;
      ha = keep * hb0 + leak * ha0;  // H crosses; the leak stays
      hb = keep * ha0 + leak * hb0;
      va = keep * va0 + leak * vb0;  // V stays; the leak crosses
      vb = keep * vb0 + leak * va0;
      return;
    }
    case ElementKind::Ps: {
      amplitudes[mode_index(e.path_a, e.pol)] *= std::polar(1.0, e.param);
      return;
    }
    case ElementKind::Bs: {
      static constexpr double kInvSqrt2 = 0.7071067811865475244;
      cplx pa(1.0, 0.0), pb(1.0, 0.0);
      if (bs_arm_phases != nullptr) {
        pa = std::polar(1.0, bs_arm_phases[0]);
        pb = std::polar(1.0, bs_arm_phases[1]);
      }
      for (Pol pol : {Pol::V, Pol::H}) {
        cplx& x = amplitudes[mode_index(e.path_a, pol)];
        cplx& y = amplitudes[mode_index(e.path_b, pol)];
        const cplx x0 = x * pa, y0 = y * pb;
        x = kInvSqrt2 * (x0 + cplx(0.0, 1.0) * y0);
        y = kInvSqrt2 * (cplx(0.0, 1.0) * x0 + y0);
      }
      return;
    }
    case ElementKind::Mirror: {
      std::swap(amplitudes[mode_index(e.path_a, Pol::H)],
                amplitudes[mode_index(e.path_b, Pol::H)]);
      std::swap(amplitudes[mode_index(e.path_a, Pol::V)],
                amplitudes[mode_index(e.path_b, Pol::V)]);
      return;
    }
    case ElementKind::Detector:
      return;
  }
}

Matrix simulate_elements(std::span<const OpticalElement> elements, int total_modes) {
  Matrix u(total_modes, total_modes);
  std::vector<cplx> column(total_modes);
  for (int j = 0; j < total_modes; ++j) {
    std::fill(column.begin(), column.end(), cplx{});
    column[j] = 1.0;
    for (const OpticalElement& e : elements) apply_element(e, column);
    for (int i = 0; i < total_modes; ++i) u.at(i, j) = column[i];
  }
  return u;
}

void validate_netlist(const OpticalNetlist& netlist) {
  Dimension::of(netlist.dim.n).log2();
  const int paths = netlist.total_paths();
  if (netlist.prepared_index < 0 || netlist.prepared_index >= netlist.dim.n)
    throw MalformedNetlist("prepared index outside 0..N-1");

  if (static_cast<int>(netlist.logical_to_path.size()) != netlist.dim.n)
    throw MalformedNetlist("path relabeling must list every logical index");
  std::vector<int> inverse(netlist.dim.n, -1);
  for (int j = 0; j < netlist.dim.n; ++j) {
    const int p = netlist.logical_to_path[j];
    if (p < 0 || p >= netlist.dim.n || inverse[p] != -1)
      throw MalformedNetlist("path relabeling is not a permutation of 0..N-1");
    inverse[p] = j;
  }
  for (int j = 0; j < netlist.dim.n; ++j)
    if (netlist.logical_to_path[netlist.logical_to_path[j]] != j)
      throw MalformedNetlist("path relabeling must be an involution");

  Stage prev = Stage::I;
  std::set<std::string> labels;
  for (const OpticalElement& e : netlist.elements) {
    if (static_cast<int>(e.stage) < static_cast<int>(prev))
      throw MalformedNetlist("elements out of stage order");
    prev = e.stage;
    if (e.path_a < 0 || e.path_a >= paths)
      throw MalformedNetlist("element references path outside the netlist");
    const bool two_port = e.kind == ElementKind::Pbs || e.kind == ElementKind::Bs ||
                          e.kind == ElementKind::Mirror;
    if (two_port) {
      if (e.path_b < 0 || e.path_b >= paths)
        throw MalformedNetlist("element references path outside the netlist");
      if (e.path_b == e.path_a)
        throw MalformedNetlist("two-port element must couple distinct paths");
    }
    if (e.kind == ElementKind::Detector) {
      if (e.label.empty()) throw MalformedNetlist("detector needs a label");
      if (!labels.insert(e.label).second)
        throw MalformedNetlist("duplicate detector label " + e.label);
    }
  }
}

Matrix simulate_netlist(const OpticalNetlist& netlist) {
  validate_netlist(netlist);
  return simulate_elements(netlist.elements, netlist.total_modes());
}

ClickProbabilities click_probabilities(const OpticalNetlist& netlist) {
  validate_netlist(netlist);
  const int n = netlist.dim.n;
  std::vector<cplx> amp(netlist.total_modes());
  amp[mode_index(0, Pol::H)] = 1.0;
  for (const OpticalElement& e : netlist.elements) apply_element(e, amp);

  ClickProbabilities cp;
  cp.conclusive.resize(n);
  cp.monitor.resize(n - 1);
  for (int j = 0; j < n; ++j)
    cp.conclusive[j] = std::norm(amp[mode_index(j, Pol::V)]) +
                       std::norm(amp[mode_index(j, Pol::H)]);
  for (int p = 0; p + 1 < n; ++p)
    cp.monitor[p] = std::norm(amp[mode_index(n + p, Pol::V)]) +
                    std::norm(amp[mode_index(n + p, Pol::H)]);
  return cp;
}

Matrix abstract_protocol_map(const CoefficientVector& c,
                             std::span<const int> logical_to_path) {
  const int n = c.dim();
  if (static_cast<int>(logical_to_path.size()) != n)
    throw DimensionMismatch("path relabeling must list every logical index");

  const Matrix finv = inverse_fourier(Dimension{n});
  const Matrix s = success_operator(c);
  const Matrix f = failure_operator(c);

  Matrix map(2 * n - 1, n);
  for (int r = 0; r < n; ++r)
    for (int l = 0; l < n; ++l) map.at(r, l) = finv.at(r, l) * s.at(l, l);
  // Failure rows ordered by monitor path p = 0..N-2; logical index of path p
  // is logical_to_path[p] (an involution). The dropped last-path row is the
  // all-zero failure row of the minimal amplitude.
  for (int p = 0; p + 1 < n; ++p) {
    const int logical = logical_to_path[p];
    map.at(n + p, logical) = f.at(logical, logical);
  }
  return map;
}

Matrix netlist_protocol_map(const OpticalNetlist& netlist) {
  validate_netlist(netlist);
  const int n = netlist.dim.n;
  std::vector<OpticalElement> tail;
  for (const OpticalElement& e : netlist.elements)
    if (e.stage != Stage::I) tail.push_back(e);

  Matrix map(2 * n - 1, n);
  std::vector<cplx> amp(netlist.total_modes());
  for (int l = 0; l < n; ++l) {
    std::fill(amp.begin(), amp.end(), cplx{});
    amp[mode_index(netlist.logical_to_path[l], Pol::V)] = 1.0;  // |l> (x) |0>_a
    for (const OpticalElement& e : tail) apply_element(e, amp);
    for (int r = 0; r < n; ++r) map.at(r, l) = amp[mode_index(r, Pol::V)];
    for (int p = 0; p + 1 < n; ++p)
      map.at(n + p, l) = amp[mode_index(n + p, Pol::H)];
  }
  return map;
}

double verify_equivalence(const Matrix& realized, const Matrix& reference) {
  if (realized.rows() != reference.rows() || realized.cols() != reference.cols())
    throw DimensionMismatch("maps being compared have different shapes");
  const int m = realized.rows(), n = realized.cols();

  auto residual = [&](const std::vector<cplx>& dout, const std::vector<cplx>& din) {
    double s = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j)
        s += std::norm(dout[i] * realized.at(i, j) * din[j] - reference.at(i, j));
    return std::sqrt(s);
  };

  // Alternating phase fit: optimal d_i (e_j fixed) is the phase aligning row i
  // of D_out A D_in with row i of B, and symmetrically for the columns.
  auto fit_from = [&](std::vector<cplx> din) {
    std::vector<cplx> dout(m, cplx(1.0, 0.0));
    double best = residual(dout, din);
    for (int iter = 0; iter < 200; ++iter) {
      for (int i = 0; i < m; ++i) {
        cplx z{};
        for (int j = 0; j < n; ++j)
          z += std::conj(reference.at(i, j)) * realized.at(i, j) * din[j];
        if (std::abs(z) > 1e-300) dout[i] = std::conj(z) / std::abs(z);
      }
      for (int j = 0; j < n; ++j) {
        cplx z{};
        for (int i = 0; i < m; ++i)
          z += std::conj(reference.at(i, j)) * dout[i] * realized.at(i, j);
        if (std::abs(z) > 1e-300) din[j] = std::conj(z) / std::abs(z);
      }
      const double r = residual(dout, din);
      if (best - r < 1e-16) return std::min(best, r);
      best = r;
    }
    return best;
  };

  double best = fit_from(std::vector<cplx>(n, cplx(1.0, 0.0)));
  std::uint64_t s = 0x2545f4914f6cdd1dULL;
  auto next_phase = [&s]() {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    return 2.0 * kPi * (static_cast<double>(s >> 11) * 0x1.0p-53);
  };
  for (int start = 0; start < 4 && best > 1e-12; ++start) {
    std::vector<cplx> din(n);
    for (cplx& x : din) x = std::polar(1.0, next_phase());
    best = std::min(best, fit_from(std::move(din)));
  }
  return best;
}

double protocol_equivalence_residual(const OpticalNetlist& netlist,
                                     const CoefficientVector& c) {
  return verify_equivalence(netlist_protocol_map(netlist),
                            abstract_protocol_map(c, netlist.logical_to_path));
}

}  // namespace symdisc
