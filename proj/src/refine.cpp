#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "trichord/chords.hpp"

namespace trichord {

const char* to_string(RefineFailure f) {
  switch (f) {
    case RefineFailure::invalid_start: return "invalid_start";
    case RefineFailure::divergence: return "divergence";
    case RefineFailure::singular_jacobian: return "singular_jacobian";
    case RefineFailure::degenerate_duration: return "degenerate_duration";
    case RefineFailure::forbidden_region: return "forbidden_region";
  }
  return "?";
}

std::vector<double> Chord::stability() const {
  Eigen::EigenSolver<Mat6> es(monodromy, false);
  std::vector<double> m;
  for (int i = 0; i < 6; ++i) m.push_back(std::abs(es.eigenvalues()(i)));
  std::sort(m.begin(), m.end(), std::greater<>());
  return m;
}

namespace {

// Shooting problem: unknowns are the free chart coordinates followed by the
// flight time; residuals are a subset of the target residual at that time.
struct Problem {
  ChordTarget target;
  double h;
  int branch;
  std::array<bool, 2> free;
  Chart base;
  std::vector<int> rows;
};

struct Eval {
  bool ok = false;
  bool forbidden = false;
  Eigen::VectorXd r;
  Eigen::MatrixXd j;
  double norm = 0.0;
};

int free_count(const Problem& p) { return int(p.free[0]) + int(p.free[1]); }

Chart chart_from(const Problem& p, const Eigen::VectorXd& z) {
  Chart c = p.base;
  int k = 0;
  for (int i = 0; i < 2; ++i)
    if (p.free[i]) c[i] = z(k++);
  return c;
}

std::array<int, 3> residual_state_index(ChordTarget t) {
  return t == ChordTarget::xz_plane ? std::array<int, 3>{1, 3, 5} : std::array<int, 3>{1, 2, 3};
}

Eval evaluate(const Problem& p, const Eigen::VectorXd& z, const SystemParams& params, double tol,
              bool jacobian) {
  Eval e;
  const Chart chart = chart_from(p, z);
  const double t = z(z.size() - 1);
  if (!(t > 1e-9) || !std::isfinite(t)) return e;
  const auto s0 = seed_state(p.target, chart, p.h, p.branch, params);
  if (!s0) {
    e.forbidden = true;
    return e;
  }
  IntegrateOptions o;
  o.tol = tol;
  o.record = false;
  o.with_stm = jacobian;
  o.stm_error_control = false;  // keeps STM and STM-free trials on one step sequence
  IntegrationResult run;
  try {
    run = integrate(*s0, 0.0, t, params, o);
  } catch (const Error&) {
    return e;
  }
  if (run.trajectory.termination != Termination::completed) return e;
  const PhaseState& end = run.trajectory.final_state;
  const auto res = target_residual(p.target, end);
  const int m = int(p.rows.size());
  e.r.resize(m);
  for (int k = 0; k < m; ++k) e.r(k) = res[p.rows[k]];
  e.norm = e.r.norm();
  if (jacobian) {
    const auto idx = residual_state_index(p.target);
    const auto s = seed_jacobian(p.target, chart, p.h, p.branch, params);
    const Eigen::Matrix<double, 6, 2> dphi = (*run.stm) * s;
    const Vec6 f = vector_field(end, params);
    const int nf = free_count(p);
    e.j.resize(m, nf + 1);
    for (int k = 0; k < m; ++k) {
      const int row = idx[p.rows[k]];
      int col = 0;
      for (int i = 0; i < 2; ++i)
        if (p.free[i]) e.j(k, col++) = dphi(row, i);
      e.j(k, nf) = f[row];
    }
  }
  e.ok = std::isfinite(e.norm);
  return e;
}

// Damped Newton with step halving. Loose integration tolerance while far from
// the root, tight tolerance for the last iterations.
Eigen::VectorXd newton(const Problem& p, Eigen::VectorXd z, const SystemParams& params,
                       const RefineOptions& opts, int& iterations, double& final_norm) {
  std::vector<double> trace;
  const auto degenerate = [&](const Eigen::VectorXd& x) {
    if (x(x.size() - 1) <= opts.min_duration)
      throw RefinementFailed(RefineFailure::degenerate_duration,
                             fmt::format("refine: duration {:.3g} below minimum", x(x.size() - 1)), trace);
  };
  degenerate(z);
  double tol_int = opts.loose_int_tol;
  Eval cur = evaluate(p, z, params, tol_int, true);
  if (!cur.ok)
    throw RefinementFailed(cur.forbidden ? RefineFailure::forbidden_region : RefineFailure::invalid_start,
                           "refine: starting point cannot be integrated", trace);
  for (int it = 0;; ++it) {
    trace.push_back(cur.norm);
    const double wanted = cur.norm > opts.switch_residual ? opts.loose_int_tol : opts.int_tol;
    if (wanted != tol_int) {
      tol_int = wanted;
      cur = evaluate(p, z, params, tol_int, true);
      if (!cur.ok) throw RefinementFailed(RefineFailure::divergence, "refine: re-evaluation failed", trace);
      trace.push_back(cur.norm);
    }
    if (cur.norm <= opts.tol && tol_int == opts.int_tol) {
      iterations = it;
      final_norm = cur.norm;
      return z;
    }
    if (it >= opts.max_iterations)
      throw RefinementFailed(RefineFailure::divergence,
                             fmt::format("refine: no convergence in {} iterations", opts.max_iterations), trace);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(cur.j, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
    if (!(cond <= opts.max_condition))
      throw RefinementFailed(RefineFailure::singular_jacobian,
                             fmt::format("refine: singular Jacobian (condition {:.3g})", cond), trace, cond);
    const Eigen::VectorXd dz = -svd.solve(cur.r);
    double lambda = 1.0;
    bool accepted = false;
    bool forbidden = false;
    for (int k = 0; k <= opts.max_halvings; ++k, lambda *= 0.5) {
      // Trial points are judged without the STM; only the accepted one pays for it.
      const Eigen::VectorXd trial = z + lambda * dz;
      const Eval probe = evaluate(p, trial, params, tol_int, false);
      forbidden = forbidden || probe.forbidden;
      if (probe.ok && probe.norm < cur.norm) {
        Eval next = evaluate(p, trial, params, tol_int, true);
        if (!next.ok) continue;
        z = trial;
        cur = std::move(next);
        accepted = true;
        degenerate(z);
        break;
      }
    }
    if (!accepted) {
      // Residual already at the integration noise floor.
      if (tol_int == opts.int_tol && cur.norm <= opts.tol) continue;
      throw RefinementFailed(forbidden ? RefineFailure::forbidden_region : RefineFailure::divergence,
                             "refine: line search failed to reduce the residual", trace);
    }
  }
}

}  // namespace

Chord evaluate_chord(const PhaseState& initial, double duration, ChordTarget target,
                     const SystemParams& params, double h, const RefineOptions& opts, double int_tol) {
  IntegrateOptions o;
  o.tol = int_tol;
  o.with_stm = true;
  o.stm_error_control = false;  // same trajectory as the Newton iterations
  o.record = true;
  o.events.push_back(coordinate_event(1));
  const auto run = integrate(initial, 0.0, duration, params, o);
  if (run.trajectory.termination == Termination::guard_violation)
    throw GuardViolation(run.trajectory.guard->primary, run.trajectory.guard->distance);
  if (run.trajectory.termination != Termination::completed)
    throw Error("evaluate_chord: integration did not complete");

  Chord c;
  c.initial = initial;
  c.terminal = run.trajectory.final_state;
  c.duration = duration;
  c.target = target;
  c.h = h;
  c.mu = params.mu();
  const auto r = target_residual(target, c.terminal);
  c.residual_norm = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
  c.monodromy = *run.stm;
  const double edge = 1e-6 * std::max(1.0, duration);
  for (const auto& ev : run.events) {
    if (ev.t <= edge || ev.t >= duration - edge) continue;
    const auto ri = target_residual(target, ev.state);
    if (std::sqrt(ri[0] * ri[0] + ri[1] * ri[1] + ri[2] * ri[2]) <= opts.crossing_tol) ++c.crossings;
  }
  c.prime = c.crossings == 0;
  double vertical = 0.0;
  for (const auto& s : run.trajectory.states) vertical = std::max(vertical, std::abs(s.q[2]) + std::abs(s.p[2]));
  c.spatial = vertical >= opts.spatial_threshold;
  const auto [chart, branch] = chart_of(target, initial);
  c.chart = chart;
  c.branch = branch;
  return c;
}

Chord refine(const Seed& seed, double t1, ChordTarget target, const SystemParams& params,
             const RefineOptions& opts) {
  Problem p{target, seed.h, seed.branch, {true, true}, seed.chart, {0, 1, 2}};
  Eigen::VectorXd z(3);
  z << seed.chart[0], seed.chart[1], t1;
  int iterations = 0;
  double norm = 0.0;
  z = newton(p, z, params, opts, iterations, norm);
  const double t = z(2);
  if (t <= opts.min_duration)
    throw RefinementFailed(RefineFailure::degenerate_duration,
                           fmt::format("refine: duration {:.3g} below minimum", t), {norm});
  const Chart chart{z(0), z(1)};
  const auto s0 = seed_state(target, chart, seed.h, seed.branch, params);
  if (!s0) throw RefinementFailed(RefineFailure::forbidden_region, "refine: converged into forbidden region", {});
  Chord c = evaluate_chord(*s0, t, target, params, seed.h, opts, opts.int_tol);
  c.iterations = iterations;
  c.grid_index = seed.grid_index;
  c.chart = chart;
  c.branch = seed.branch;
  return c;
}

double endpoint_symmetry_gap(const Chord& chord, const SystemParams& params, double tol) {
  const auto kind = involution_of(chord.target);
  const PhaseState back = flow(apply_involution(kind, chord.terminal), chord.duration, params, tol);
  return max_abs_diff(back, apply_involution(kind, chord.initial));
}

PlanarOrbit find_planar_orbit(const SystemParams& params, double h, double q1_guess, int branch,
                              double half_period_guess, const RefineOptions& opts) {
  const double theta = branch >= 0 ? 0.0 : std::numbers::pi;
  Problem p{ChordTarget::x_axis, h, 1, {true, false}, {q1_guess, theta}, {0, 2}};
  Eigen::VectorXd z(2);
  z << q1_guess, half_period_guess;
  int iterations = 0;
  double norm = 0.0;
  z = newton(p, z, params, opts, iterations, norm);
  if (z(1) <= opts.min_duration)
    throw RefinementFailed(RefineFailure::degenerate_duration, "find_planar_orbit: degenerate half period", {norm});
  PlanarOrbit orbit;
  orbit.initial = *seed_state(ChordTarget::x_axis, {z(0), theta}, h, 1, params);
  orbit.half_period = z(1);
  orbit.h = h;
  orbit.residual_norm = norm;
  return orbit;
}

}  // namespace trichord
