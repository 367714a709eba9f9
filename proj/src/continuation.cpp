#include <cmath>

#include <fmt/format.h>

#include "trichord/chords.hpp"

namespace trichord {

namespace {

Chord step_to(const Chord& prev, ContinuationParameter parameter, double value, const SystemParams& base,
              const RefineOptions& ropts) {
  const double mu = parameter == ContinuationParameter::mu ? value : prev.mu;
  const double h = parameter == ContinuationParameter::h ? value : prev.h;
  const SystemParams params(mu, base.collision_guard());
  Seed seed;
  seed.chart = prev.chart;
  seed.branch = prev.branch;
  seed.h = h;
  seed.grid_index = prev.grid_index;
  const auto s0 = seed_state(prev.target, prev.chart, h, prev.branch, params);
  if (!s0) throw RefinementFailed(RefineFailure::forbidden_region, "continuation: seed point is forbidden", {});
  seed.state = *s0;
  Chord c = refine(seed, prev.duration, prev.target, params, ropts);
  c.h = h;
  c.mu = mu;
  return c;
}

}  // namespace

Family continue_family(const Chord& start, ContinuationParameter parameter, double step, int n_steps,
                       const SystemParams& start_params, const ContinuationOptions& opts) {
  if (n_steps < 0) throw PreconditionError("continue_family: n_steps must be non-negative");
  if (!(step != 0.0) && n_steps > 0) throw PreconditionError("continue_family: step must be nonzero");
  Family fam;
  fam.parameter = parameter;
  const double v0 = parameter == ContinuationParameter::h ? start.h : start.mu;
  fam.chords.push_back(start);
  fam.values.push_back(v0);

  Chord current = start;
  double value = v0;
  double trial = step;
  for (int k = 1; k <= n_steps; ++k) {
    const double goal = v0 + k * step;
    while (value != goal) {
      double next = value + trial;
      if ((step > 0 && next > goal) || (step < 0 && next < goal)) next = goal;
      try {
        current = step_to(current, parameter, next, start_params, opts.refine);
        value = next;
        trial = std::abs(trial * 2.0) > std::abs(step) ? step : trial * 2.0;
      } catch (const RefinementFailed& e) {
        trial *= 0.5;
        if (std::abs(trial) < opts.min_step) {
          fam.failure = fmt::format("{}: {} (at {} = {:.17g})", to_string(e.reason), e.what(),
                                    parameter == ContinuationParameter::h ? "h" : "mu", next);
          return fam;
        }
      } catch (const Error& e) {
        trial *= 0.5;
        if (std::abs(trial) < opts.min_step) {
          fam.failure = fmt::format("{}", e.what());
          return fam;
        }
      }
    }
    fam.chords.push_back(current);
    fam.values.push_back(value);
  }
  return fam;
}

}  // namespace trichord
