#include <cmath>
#include <complex>
#include <numbers>

#include <fmt/format.h>

#include "trichord/section.hpp"

namespace trichord {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap(double a) {
  a = std::remainder(a, 2.0 * kPi);
  return a <= -kPi ? a + 2.0 * kPi : a;
}

TwistSample measure(const Mat6& phi, double amplitude) {
  TwistSample s;
  s.amplitude = amplitude;
  const double a = phi(2, 2), b = phi(2, 5), c = phi(5, 2), d = phi(5, 5);
  s.determinant = a * d - b * c;
  s.half_trace = 0.5 * (a + d);
  if (std::abs(s.half_trace) >= 1.0) {
    // Real eigenvalues: report them, the rotation part is 0 or pi.
    s.degenerate = true;
    const double disc = std::sqrt(std::max(0.0, s.half_trace * s.half_trace - s.determinant));
    s.eigen_note = fmt::format("real eigenvalues {:.17g}, {:.17g}", s.half_trace + disc, s.half_trace - disc);
    s.angle = s.half_trace > 0.0 ? 0.0 : kPi;
  } else {
    // Elliptic block: q3 -> q3 cos + p3 sin/omega, so the upper-right entry carries the sign.
    const double th = std::acos(s.half_trace);
    s.angle = b >= 0.0 ? th : -th;
  }
  return s;
}

}  // namespace

std::vector<double> default_amplitudes() { return {1e-5, 3e-5, 1e-4, 3e-4, 1e-3, 3e-3, 1e-2}; }

TwistReport twist_diagnostic(const PlanarOrbit& orbit, const std::vector<double>& amplitudes,
                             const SystemParams& params, double tol) {
  if (std::abs(orbit.initial.q[2]) > 1e-12 || std::abs(orbit.initial.p[2]) > 1e-12)
    throw PreconditionError("twist_diagnostic: orbit is not planar");
  TwistReport rep;
  rep.orbit = orbit;
  {
    Chord tag;
    tag.initial = orbit.initial;
    tag.duration = orbit.period();
    rep.orbit_id = chord_id(tag);
  }
  const double period = orbit.period();
  const double q1 = orbit.initial.q[0];
  const int branch = velocity_from_momentum(orbit.initial)[1] >= 0.0 ? 1 : -1;

  rep.linearized = measure(flow_with_stm(orbit.initial, period, params, tol).second, 0.0).angle;

  for (double amp : amplitudes) {
    if (!(amp > 0.0)) throw PreconditionError("twist_diagnostic: amplitudes must be positive");
    // Lift the orbit's x-axis crossing to a q3 minimum of the page at the same energy.
    const auto s0 = seed_state(ChordTarget::xz_plane, {q1, -amp}, orbit.h, branch, params);
    if (!s0) throw PreconditionError(fmt::format("twist_diagnostic: amplitude {} leaves the Hill region", amp));
    const auto [end, phi] = flow_with_stm(*s0, period, params, tol);
    (void)end;
    rep.samples.push_back(measure(phi, amp));
  }

  double prev = 0.0;
  for (std::size_t i = 0; i < rep.samples.size(); ++i) {
    auto& s = rep.samples[i];
    if (i == 0) {
      s.unwrapped = s.angle;
    } else {
      s.unwrapped = prev + wrap(s.angle - wrap(prev));
      rep.max_adjacent_gap = std::max(rep.max_adjacent_gap, std::abs(s.unwrapped - prev));
    }
    prev = s.unwrapped;
    rep.vertical_rotation_per_return.push_back(s.unwrapped);
  }
  rep.returns_sampled = rep.samples.size();

  const auto& v = rep.vertical_rotation_per_return;
  if (!v.empty()) {
    double tv = 0.0;
    for (std::size_t i = 1; i < v.size(); ++i) tv += std::abs(v[i] - v[i - 1]);
    rep.monotonicity_defect = tv - std::abs(v.back() - v.front());
  }

  // Extrapolate with the two smallest amplitudes, assuming even dependence on A.
  if (rep.samples.size() >= 2) {
    std::size_t i1 = 0, i2 = 1;
    if (rep.samples[i2].amplitude < rep.samples[i1].amplitude) std::swap(i1, i2);
    for (std::size_t k = 2; k < rep.samples.size(); ++k) {
      const double a = rep.samples[k].amplitude;
      if (a < rep.samples[i1].amplitude) {
        i2 = i1;
        i1 = k;
      } else if (a < rep.samples[i2].amplitude) {
        i2 = k;
      }
    }
    const double a1 = rep.samples[i1].amplitude, a2 = rep.samples[i2].amplitude;
    const double t1 = rep.samples[i1].unwrapped, t2 = rep.samples[i2].unwrapped;
    rep.extrapolated = wrap((t1 * a2 * a2 - t2 * a1 * a1) / (a2 * a2 - a1 * a1));
  } else if (rep.samples.size() == 1) {
    rep.extrapolated = rep.samples[0].angle;
  }
  return rep;
}

}  // namespace trichord
