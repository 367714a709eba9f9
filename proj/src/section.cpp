#include "trichord/section.hpp"

#include <cmath>

#include <fmt/format.h>

namespace trichord {

SectionReturn next_section_point(const PhaseState& x, double t0, const SystemParams& params, double h,
                                 const SectionOptions& opts) {
  if (std::abs(x.q[2]) <= 1e-12 && std::abs(x.p[2]) <= 1e-12)
    throw PreconditionError("next_section_point: planar (binding) state never reaches the page");
  const double e = std::abs(hamiltonian(x, params) - h);
  if (e > opts.energy_tol)
    throw PreconditionError(fmt::format("next_section_point: state is {:.3g} off the energy level", e));

  SectionReturn out;
  IntegrateOptions o;
  o.tol = opts.tol;
  o.record = false;
  o.events.push_back(coordinate_event(5, +1, true));  // p3 = 0 rising: a minimum of q3
  o.event_skip = 1e-9;

  PhaseState cur = x;
  double elapsed = 0.0;
  while (elapsed < opts.t_max) {
    const auto run = integrate(cur, 0.0, opts.t_max - elapsed, params, o);
    out.termination = run.trajectory.termination;
    if (run.trajectory.termination == Termination::guard_violation) {
      out.note = fmt::format("guard violation near {} at t = {:.17g}", to_string(run.trajectory.guard->primary),
                             t0 + elapsed + run.trajectory.guard->t);
      return out;
    }
    if (run.trajectory.termination != Termination::event_hit) break;
    const EventHit& hit = run.events.back();
    elapsed += hit.t;
    cur = hit.state;
    const double q3 = cur.q[2];
    if (std::abs(q3) > 1e-12 && (q3 > 0.0 ? 1 : -1) == opts.page_sign) {
      cur.p[2] = 0.0;  // the event is located to round-off; land exactly on the section
      out.point = SectionPoint{cur, h, t0 + elapsed, false};
      out.termination = Termination::completed;
      return out;
    }
  }
  out.note = fmt::format("no return within t_max = {}", opts.t_max);
  return out;
}

std::vector<SectionRow> return_map_samples(const std::vector<SectionPoint>& points, int iterations,
                                           const SystemParams& params, double h, const SectionOptions& opts) {
  if (iterations < 0) throw PreconditionError("return_map_samples: iterations must be non-negative");
  std::vector<SectionRow> rows(points.size());
  const long n = static_cast<long>(points.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    SectionRow& row = rows[i];
    row.iterates.push_back(points[i]);
    try {
      for (int k = 0; k < iterations; ++k) {
        const SectionPoint& last = row.iterates.back();
        const auto ret = next_section_point(last.state, last.t, params, h, opts);
        if (!ret.point) {
          row.returned = false;
          row.note = ret.note;
          break;
        }
        row.iterates.push_back(*ret.point);
      }
    } catch (const Error& e) {
      row.returned = false;
      row.note = e.what();
    }
    for (const auto& p : row.iterates)
      row.max_energy_drift = std::max(row.max_energy_drift, std::abs(hamiltonian(p.state, params) - h));
  }
  return rows;
}

}  // namespace trichord
