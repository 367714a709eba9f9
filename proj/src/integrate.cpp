#include "trichord/integrate.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/roots.hpp>

#include "trichord/dop853.hpp"

namespace trichord {

EventSpec coordinate_event(int index, int direction, bool terminal) {
  static const char* names[6] = {"q1", "q2", "q3", "p1", "p2", "p3"};
  EventSpec e;
  e.g = [index](const PhaseState& s) { return index < 3 ? s.q[index] : s.p[index - 3]; };
  e.direction = direction;
  e.terminal = terminal;
  e.name = names[index];
  return e;
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::completed: return "completed";
    case Termination::event_hit: return "event_hit";
    case Termination::guard_violation: return "guard_violation";
    case Termination::step_underflow: return "step_underflow";
  }
  return "?";
}

namespace {

template <std::size_t N>
PhaseState head(const std::array<double, N>& y) {
  return {{y[0], y[1], y[2]}, {y[3], y[4], y[5]}};
}

double locate_root(const auto& g_of_t, double a, double b, double ga, double gb) {
  if (ga == 0.0) return a;
  if (gb == 0.0) return b;
  std::uintmax_t iters = 100;
  auto tol = [](double x, double y) { return std::abs(y - x) <= 1e-14 * std::max(1.0, std::abs(x)); };
  const double lo = std::min(a, b), hi = std::max(a, b);
  const double glo = (lo == a) ? ga : gb, ghi = (lo == a) ? gb : ga;
  auto [r0, r1] = boost::math::tools::toms748_solve(g_of_t, lo, hi, glo, ghi, tol, iters);
  return 0.5 * (r0 + r1);
}

template <std::size_t N, class Rhs>
IntegrationResult run(Rhs rhs, const std::array<double, N>& y0, double t0, double t1,
                      const SystemParams& params, const IntegrateOptions& opts) {
  ode::Options o;
  o.rtol = opts.tol;
  o.atol = opts.tol;
  o.error_dims = opts.stm_error_control ? 0 : 6;
  ode::Dop853<N, Rhs> solver(rhs, t0, y0, t1, o);

  IntegrationResult out;
  auto& traj = out.trajectory;
  traj.tol = opts.tol;
  const PhaseState s0 = head(y0);
  const double h0 = hamiltonian(s0, params);
  if (opts.record) {
    traj.times.push_back(t0);
    traj.states.push_back(s0);
  }
  const std::size_t ne = opts.events.size();
  std::vector<double> g_prev(ne);
  for (std::size_t k = 0; k < ne; ++k) g_prev[k] = opts.events[k].g(s0);

  bool stop = false;
  double t_stop = t1;
  while (!stop) {
    const auto status = solver.advance();
    if (status == ode::Status::step_underflow || status == ode::Status::max_steps) {
      traj.termination = Termination::step_underflow;
      break;
    }
    const double ta = solver.t_prev(), tb = solver.t();
    const PhaseState sb = head(solver.y());

    // Events inside (ta, tb], earliest first.
    std::vector<EventHit> hits;
    for (std::size_t k = 0; k < ne; ++k) {
      const auto& ev = opts.events[k];
      const double ga = g_prev[k], gb = ev.g(sb);
      g_prev[k] = gb;
      int dir = 0;
      if (ga < 0.0 && gb >= 0.0) dir = 1;
      else if (ga > 0.0 && gb <= 0.0) dir = -1;
      if (dir == 0 || (ev.direction != 0 && ev.direction != dir)) continue;
      auto g_of_t = [&](double t) { return ev.g(head(solver.template dense_head<6>(t))); };
      const double te = locate_root(g_of_t, ta, tb, ga, gb);
      if (std::abs(te - t0) <= opts.event_skip) continue;
      hits.push_back({k, te, head(solver.template dense_head<6>(te)), dir});
    }
    std::sort(hits.begin(), hits.end(), [&](const EventHit& a, const EventHit& b) {
      return (a.t - b.t) * (t1 >= t0 ? 1.0 : -1.0) < 0.0;
    });
    for (const auto& hit : hits) {
      out.events.push_back(hit);
      if (opts.events[hit.spec].terminal) {
        stop = true;
        t_stop = hit.t;
        traj.termination = Termination::event_hit;
        break;
      }
    }

    if (stop) {
      const auto ys = solver.dense(t_stop);
      const PhaseState se = head(ys);
      if (params.guard_ok(se.q))
        traj.max_energy_drift = std::max(traj.max_energy_drift, std::abs(hamiltonian(se, params) - h0));
      if (opts.record) {
        traj.times.push_back(t_stop);
        traj.states.push_back(se);
      }
      traj.final_time = t_stop;
      traj.final_state = se;
      if constexpr (N == 42) {
        Mat6 phi;
        for (int i = 0; i < 6; ++i)
          for (int j = 0; j < 6; ++j) phi(i, j) = ys[6 + 6 * i + j];
        out.stm = phi;
      }
      break;
    }

    if (!params.guard_ok(sb.q)) {
      const double de = norm(sub(sb.q, params.earth_pos()));
      const double dm = norm(sub(sb.q, params.moon_pos()));
      const bool earth = params.earth_mass() > 0.0 && de < params.collision_guard();
      traj.guard = GuardReport{tb, earth ? Primary::earth : Primary::moon, earth ? de : dm};
      traj.termination = Termination::guard_violation;
      stop = true;
    }
    if (!stop || traj.termination != Termination::guard_violation)
      traj.max_energy_drift = std::max(traj.max_energy_drift, std::abs(hamiltonian(sb, params) - h0));
    if (opts.record) {
      traj.times.push_back(tb);
      traj.states.push_back(sb);
    }
    traj.final_time = tb;
    traj.final_state = sb;
    if (status == ode::Status::completed) stop = true;
    if (stop) {
      if constexpr (N == 42) {
        Mat6 phi;
        const auto& y = solver.y();
        for (int i = 0; i < 6; ++i)
          for (int j = 0; j < 6; ++j) phi(i, j) = y[6 + 6 * i + j];
        out.stm = phi;
      }
    }
  }
  traj.steps = solver.steps();
  if (t1 < t0) {
    std::reverse(traj.times.begin(), traj.times.end());
    std::reverse(traj.states.begin(), traj.states.end());
  }
  return out;
}

}  // namespace

IntegrationResult integrate(const PhaseState& s0, double t0, double t1, const SystemParams& params,
                            const IntegrateOptions& opts) {
  if (!(opts.tol >= 1e-14 && opts.tol <= 1e-6))
    throw PreconditionError("integrate: tol must lie in [1e-14, 1e-6]");
  if (t1 == t0) throw PreconditionError("integrate: degenerate time span");
  if (!s0.finite()) throw PreconditionError("integrate: non-finite initial state");
  params.check_guard(s0.q);
  const double mu = params.mu();
  if (opts.with_stm) {
    std::array<double, 42> y{};
    const Vec6 f = s0.flat();
    std::copy(f.begin(), f.end(), y.begin());
    for (int i = 0; i < 6; ++i) y[6 + 7 * i] = 1.0;
    auto rhs = [mu](double, const double* x, double* dx) { kernel::field_with_stm(x, dx, mu); };
    return run<42>(rhs, y, t0, t1, params, opts);
  }
  auto rhs = [mu](double, const double* x, double* dx) { kernel::field(x, dx, mu); };
  return run<6>(rhs, s0.flat(), t0, t1, params, opts);
}

namespace {
void require_completed(const Trajectory& tr) {
  if (tr.termination == Termination::guard_violation)
    throw GuardViolation(tr.guard->primary, tr.guard->distance);
  if (tr.termination != Termination::completed)
    throw Error(std::string("integration ended early: ") + to_string(tr.termination));
}
}  // namespace

PhaseState flow(const PhaseState& s0, double t, const SystemParams& params, double tol) {
  IntegrateOptions o;
  o.tol = tol;
  o.record = false;
  auto r = integrate(s0, 0.0, t, params, o);
  require_completed(r.trajectory);
  return r.trajectory.final_state;
}

std::pair<PhaseState, Mat6> flow_with_stm(const PhaseState& s0, double t, const SystemParams& params,
                                          double tol) {
  IntegrateOptions o;
  o.tol = tol;
  o.record = false;
  o.with_stm = true;
  auto r = integrate(s0, 0.0, t, params, o);
  require_completed(r.trajectory);
  return {r.trajectory.final_state, *r.stm};
}

}  // namespace trichord
