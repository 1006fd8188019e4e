#pragma once

#include <cstdint>
#include <string>

#include "symdisc/povm.hpp"

namespace symdisc {

enum class Pol : std::uint8_t { V = 0, H = 1 };
enum class Stage : std::uint8_t { I = 0, II = 1, III = 2, IV = 3 };
enum class ElementKind : std::uint8_t { Hwp, Pbs, Ps, Bs, Mirror, Detector };

/// One placed element. Meaningful fields per kind:
///   Hwp      path_a, param (rotation angle, radians)
///   Pbs      path_a, path_b   (H crosses between the paths, V stays)
///   Ps       path_a, pol, param (phase, radians, applied to that one mode)
///   Bs       path_a, path_b   (50:50, (x,y) -> ((x+iy), (ix+y))/sqrt 2)
///   Mirror   path_a, path_b   (lossless path crossing, no phase)
///   Detector path_a, label    (terminal tag; no action on the state)
struct OpticalElement {
  ElementKind kind{};
  Stage stage{};
  int path_a = -1;
  int path_b = -1;
  Pol pol = Pol::V;
  double param = 0.0;
  std::string label;

  static OpticalElement hwp(Stage s, int path, double angle);
  static OpticalElement pbs(Stage s, int a, int b);
  static OpticalElement ps(Stage s, int path, Pol pol, double phase);
  static OpticalElement bs(Stage s, int a, int b);
  static OpticalElement mirror(Stage s, int a, int b);
  static OpticalElement detector(Stage s, int path, std::string label);

  bool operator==(const OpticalElement&) const = default;
};

struct ComponentCount {
  int hwp = 0;
  int pbs = 0;
  int bs = 0;
  int ps = 0;
  int mirrors = 0;

  bool operator==(const ComponentCount&) const = default;
};

/// Paths 0..N-1 carry the protocol; the projection stage feeds monitor paths
/// N+p (one per path p < N-1). Mode index = 2*path + (V ? 0 : 1); the photon
/// enters the network at (path 0, H).
struct OpticalNetlist {
  Dimension dim;
  int prepared_index = 0;
  std::vector<int> logical_to_path;  // involution; non-identity only when the
                                     // smallest coefficient was not last
  std::vector<OpticalElement> elements;

  int total_paths() const { return 2 * dim.n - 1; }
  int total_modes() const { return 2 * total_paths(); }

  bool operator==(const OpticalNetlist&) const = default;
};

int mode_index(int path, Pol pol);

std::string to_string(Stage s);
std::string to_string(ElementKind k);

/// Stage I: HWP/PBS splitting cascade realizing the fiducial amplitudes,
/// plus per-path phase shifters selecting the prepared family member.
std::vector<OpticalElement> compile_preparation(const AngleVector& angles,
                                                int prepared_index);

/// Stage II: one polarization rotation per path whose amplitude exceeds the
/// smallest one; requires the minimum on the last path.
std::vector<OpticalElement> compile_conditional(const AngleVector& angles);

/// Stage III: one PBS per path 0..N-2 routing H to that path's monitor.
std::vector<OpticalElement> compile_projection(Dimension dim);

/// Stage IV: radix-2 butterfly of 50:50 splitters and phase shifters whose
/// path-space action equals inverse_fourier(dim) exactly.
std::vector<OpticalElement> compile_fourier_inverse(Dimension dim);

OpticalNetlist compile_full(const AngleVector& angles, int prepared_index);

ComponentCount count_components(const OpticalNetlist& netlist);

/// Unitary of the listed elements over `total_modes` modes, applied in order.
Matrix simulate_elements(std::span<const OpticalElement> elements, int total_modes);

/// Full-mode unitary of the netlist after validating it.
Matrix simulate_netlist(const OpticalNetlist& netlist);

void validate_netlist(const OpticalNetlist& netlist);

/// Applies one element in place. pbs_leak is the power fraction of the
/// rejected polarization that follows the wrong port; bs_arm_phases, when
/// given, holds two extra phases applied to the input arms of a Bs.
void apply_element(const OpticalElement& e, std::span<cplx> amplitudes,
                   double pbs_leak = 0.0, const double* bs_arm_phases = nullptr);

struct ClickProbabilities {
  std::vector<double> conclusive;  // detectors on paths 0..N-1
  std::vector<double> monitor;     // monitors of paths 0..N-2
};

/// Detector statistics of the ideal netlist for one photon at (path 0, H).
ClickProbabilities click_probabilities(const OpticalNetlist& netlist);

/// Conditional map followed by the inverse Fourier transform on the
/// conclusive block, restricted to system (x) |0>_a inputs. Rows 0..N-1 are
/// conclusive amplitudes, rows N.. are failure amplitudes ordered by the
/// monitor paths of `logical_to_path` (the all-zero failure row is dropped).
Matrix abstract_protocol_map(const CoefficientVector& c,
                             std::span<const int> logical_to_path);

/// The same map extracted from the simulated netlist, stages II-IV.
Matrix netlist_protocol_map(const OpticalNetlist& netlist);

/// Frobenius residual min over diagonal phase gauges D_out, D_in of
/// ||D_out * realized * D_in - reference||.
double verify_equivalence(const Matrix& realized, const Matrix& reference);

double protocol_equivalence_residual(const OpticalNetlist& netlist,
                                     const CoefficientVector& c);

}  // namespace symdisc
