#include <cmath>

#include "trichord/chords.hpp"

namespace trichord {

ShootResult shoot(const Seed& seed, ChordTarget target, const SystemParams& params, double t_max,
                  double coarse_tol, double int_tol) {
  if (!(t_max > 0.0)) throw PreconditionError("shoot: t_max must be positive");
  IntegrateOptions o;
  o.tol = int_tol;
  o.record = false;
  o.events.push_back(coordinate_event(1));
  const auto run = integrate(seed.state, 0.0, t_max, params, o);

  ShootResult out;
  out.termination = run.trajectory.termination;
  out.crossings_seen = run.events.size();
  int ordinal = 0;
  for (const auto& ev : run.events) {
    ++ordinal;
    const auto r = target_residual(target, ev.state);
    const double n = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
    if (n <= coarse_tol) out.candidates.push_back({ev.t, r, n, ordinal});
  }
  return out;
}

}  // namespace trichord
