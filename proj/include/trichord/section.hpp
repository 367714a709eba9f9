#pragma once

#include <optional>
#include <string>
#include <vector>

#include "trichord/chords.hpp"

namespace trichord {

/// A point of the page: a q3 turning point (p3 = 0, rising) on the configured
/// side of the ecliptic.
struct SectionPoint {
  PhaseState state;
  double h = 0.0;
  double t = 0.0;  // cumulative flight time from the first input point
  bool binding = false;
};

struct SectionOptions {
  int page_sign = -1;  // side of q3 carrying the page; see page_sign_log()
  double t_max = 100.0;
  double tol = 1e-12;
  double energy_tol = 1e-10;
};

struct SectionReturn {
  std::optional<SectionPoint> point;  // empty when no return within t_max
  Termination termination = Termination::completed;
  std::string note;
};

/// First return to the page after x. Rejects planar (binding) input and
/// states off the energy level h.
SectionReturn next_section_point(const PhaseState& x, double t0, const SystemParams& params, double h,
                                 const SectionOptions& opts = {});

struct SectionRow {
  std::vector<SectionPoint> iterates;  // iterates[0] is the input
  bool returned = true;                // false if a return was missing
  std::string note;
  double max_energy_drift = 0.0;
};

/// iterations returns per input point, rows in input order.
std::vector<SectionRow> return_map_samples(const std::vector<SectionPoint>& points, int iterations,
                                           const SystemParams& params, double h, const SectionOptions& opts = {});

/// Rotation of the (q3, p3) block of the linearized flow over one period of a
/// planar symmetric orbit, measured for vertical perturbations of growing
/// amplitude.
struct TwistSample {
  double amplitude = 0.0;
  double angle = 0.0;          // wrapped to (-pi, pi]
  double unwrapped = 0.0;      // continuous along the amplitude ladder
  double determinant = 0.0;    // of the 2x2 block
  double half_trace = 0.0;
  bool degenerate = false;     // |trace/2| >= 1: no rotation part
  std::string eigen_note;
};

struct TwistReport {
  PlanarOrbit orbit;
  std::string orbit_id;
  std::size_t returns_sampled = 0;
  std::vector<TwistSample> samples;
  std::vector<double> vertical_rotation_per_return;  // unwrapped angles
  double monotonicity_defect = 0.0;
  double extrapolated = 0.0;  // amplitude -> 0 via a + b A^2 through the two smallest
  double linearized = 0.0;    // STM block of the planar orbit itself
  double max_adjacent_gap = 0.0;
};

/// Default amplitude ladder.
std::vector<double> default_amplitudes();

TwistReport twist_diagnostic(const PlanarOrbit& orbit, const std::vector<double>& amplitudes,
                             const SystemParams& params, double tol = 1e-12);

}  // namespace trichord
