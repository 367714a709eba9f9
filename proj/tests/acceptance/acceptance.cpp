// Acceptance suite: one PASS/FAIL line per criterion. A criterion passes when
// its tolerance holds and it finishes within its time budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "trichord/config.hpp"
#include "trichord/io.hpp"
#include "trichord/moser.hpp"
#include "trichord/section.hpp"

using namespace trichord;

namespace {

constexpr double kMu = 0.0121505856;

struct Outcome {
  bool ok = false;
  std::string detail;
};

int failures = 0;
std::set<int> selected;  // empty: run everything

double run(int id, const std::string& name, double budget, const std::function<Outcome()>& body) {
  if (!selected.empty() && !selected.count(id)) return 0.0;
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = dt <= budget;
  const bool pass = o.ok && in_time;
  if (!pass) ++failures;
  std::printf("[%s] %2d %-34s %8.2f s (budget %g s)%s  %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), dt, budget,
              in_time ? "" : " over budget", o.detail.c_str());
  std::fflush(stdout);
  return dt;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

PhaseState random_ball_state(std::mt19937_64& rng, double radius) {
  auto vec = [&] {
    Vec3 v;
    do {
      v = {uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1)};
    } while (norm(v) > 1.0);
    return Vec3{radius * v[0], radius * v[1], radius * v[2]};
  };
  return {vec(), vec()};
}

double moon_energy() { return lagrange_points(SystemParams(kMu)).energies[0] - 1e-3; }

// Random position in the Moon component with a random velocity direction on the energy level.
PhaseState random_moon_state(std::mt19937_64& rng, const SystemParams& P, double h) {
  const auto b = component_bounds(HillLabel::moon_component, h, P);
  for (;;) {
    const Vec3 q{uniform(rng, b.q1_min, b.q1_max), uniform(rng, b.q2_min, b.q2_max), uniform(rng, -b.q3_max, b.q3_max)};
    if (!P.guard_ok(q) || hill_classification(q, h, P) != HillLabel::moon_component) continue;
    const double u = effective_potential(q, P);
    if (h - u < 1e-6) continue;
    Vec3 d;
    do {
      d = {uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1)};
    } while (norm(d) > 1.0 || norm(d) < 1e-3);
    const double v = std::sqrt(2 * (h - u)) / norm(d);
    return {q, momentum_from_velocity({v * d[0], v * d[1], v * d[2]}, q)};
  }
}

// dU/dq1 on the q1 axis, in long double.
long double axis_force(long double x, long double mu) {
  const long double de = x + mu, dm = x - 1 + mu;
  return -x + (1 - mu) * de / std::pow(std::abs(de), 3.0L) + mu * dm / std::pow(std::abs(dm), 3.0L);
}

long double l1_bisection(long double mu) {
  long double a = -mu + 1e-9L, b = 1 - mu - 1e-9L;
  for (int i = 0; i < 200; ++i) {
    const long double m = 0.5L * (a + b);
    if ((axis_force(a, mu) > 0) == (axis_force(m, mu) > 0)) a = m;
    else b = m;
  }
  return 0.5L * (a + b);
}

RunConfig moon_config(double t_max, ChordTarget target, int n, int workers) {
  RunConfig cfg;
  cfg.mu = kMu;
  cfg.l1_delta = 1e-3;
  cfg.target = target;
  cfg.n = n;
  cfg.t_max = t_max;
  cfg.workers = workers;
  return cfg;
}

Catalog search(const RunConfig& cfg) {
  const SystemParams P = make_params(cfg);
  const double h = resolve_h(cfg, P);
  return find_chords(P, h, cfg.target, make_find_config(cfg, P, h));
}

// Catalog bytes without the timestamp line.
std::string serialize(const RunConfig& cfg, const Catalog& cat) {
  const SystemParams P = make_params(cfg);
  std::ostringstream out;
  write_catalog(out, cat.chords, metadata_json(cfg, P, cat.h), utc_timestamp());
  std::istringstream in(out.str());
  std::string line, kept;
  while (std::getline(in, line))
    if (line.rfind("{\"timestamp\"", 0) != 0) kept += line + "\n";
  return kept;
}

}  // namespace

// Optional arguments select criteria by number. 12 and 14 reuse the catalog of 10.
int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  std::printf("trichord acceptance suite\n");
  std::fflush(stdout);

  run(1, "involution algebra", 1.0, [] {
    const IntMat6 I = IntMat6::Identity(), J = symplectic_j_int();
    bool ok = true;
    for (auto k : {InvolutionKind::r, InvolutionKind::rho1, InvolutionKind::rho2}) {
      const IntMat6 M = involution_matrix(k);
      ok = ok && M * M == I;
      ok = ok && M.transpose() * J * M == (k == InvolutionKind::r ? J : IntMat6(-J));
    }
    return Outcome{ok, "exact integer identities M^2 = I, M^T J M = +J (r), -J (rho1, rho2)"};
  });

  run(2, "H invariance under involutions", 1.0, [] {
    const SystemParams P(kMu);
    std::mt19937_64 rng(2);
    double worst = 0;
    int n = 0;
    while (n < 10000) {
      const PhaseState s{{uniform(rng, -2, 2), uniform(rng, -2, 2), uniform(rng, -2, 2)},
                         {uniform(rng, -2, 2), uniform(rng, -2, 2), uniform(rng, -2, 2)}};
      if (!P.guard_ok(s.q)) continue;
      ++n;
      const double h = hamiltonian(s, P);
      for (auto k : {InvolutionKind::r, InvolutionKind::rho1, InvolutionKind::rho2})
        worst = std::max(worst, std::abs(hamiltonian(apply_involution(k, s), P) - h) / std::max(1.0, std::abs(h)));
    }
    return Outcome{worst <= 1e-14, fmt::format("max relative deviation {:.3g} (tol 1e-14)", worst)};
  });

  run(3, "energy drift, Moon component", 30.0, [] {
    const SystemParams P(kMu);
    const double h = moon_energy();
    std::mt19937_64 rng(3);
    double worst = 0;
    int done = 0, guarded = 0;
    while (done < 100) {
      const PhaseState s = random_moon_state(rng, P, h);
      const auto res = integrate(s, 0.0, 20.0, P, {.tol = 1e-12, .record = false});
      if (res.trajectory.termination == Termination::guard_violation) {
        ++guarded;
        continue;
      }
      ++done;
      worst = std::max(worst, res.trajectory.max_energy_drift);
    }
    return Outcome{worst <= 1e-9, fmt::format("max |H - H0| {:.3g} over 100 states (tol 1e-9); {} redrawn after a "
                                              "guard violation",
                                              worst, guarded)};
  });

  run(4, "Moser round trips", 5.0, [] {
    std::mt19937_64 rng(4);
    double rt = 0, back = 0, cons = 0;
    for (int i = 0; i < 10000; ++i) {
      const PhaseState s = random_ball_state(rng, 10.0);
      const auto rs = to_regularized(s);
      const auto [c1, c2] = rs.constraint_residuals();
      double eta_norm = 0;
      for (double e : rs.eta) eta_norm += e * e;
      cons = std::max({cons, c1, c2 / std::max(1.0, std::sqrt(eta_norm))});
      const PhaseState s2 = from_regularized(rs);
      rt = std::max(rt, max_abs_diff(s2, s) / std::max({1.0, norm(s.q), norm(s.p)}));
      const auto rs2 = to_regularized(s2);
      for (int k = 0; k < 4; ++k) {
        back = std::max(back, std::abs(rs2.xi[k] - rs.xi[k]));
        back = std::max(back, std::abs(rs2.eta[k] - rs.eta[k]) / std::max(1.0, std::abs(rs.eta[k])));
      }
    }
    return Outcome{rt <= 1e-12 && back <= 1e-12 && cons <= 1e-12,
                   fmt::format("phase round trip {:.3g}, chart round trip {:.3g}, constraints {:.3g} (tol 1e-12)", rt,
                               back, cons)};
  });

  run(5, "fixed-locus transport", 5.0, [] {
    std::mt19937_64 rng(5);
    double f1 = 0, f2 = 0, bind = 0;
    for (int i = 0; i < 1000; ++i) {
      const PhaseState s = random_ball_state(rng, 5.0);
      f1 = std::max(f1, locus_residual(LocusTag::f1_tilde, to_regularized(project_to_fixed(InvolutionKind::rho1, s))).norm());
      f2 = std::max(f2, locus_residual(LocusTag::f2_tilde, to_regularized(project_to_fixed(InvolutionKind::rho2, s))).norm());
      bind = std::max(bind, locus_residual(LocusTag::binding, to_regularized(project_to_fixed(InvolutionKind::r, s))).norm());
    }
    return Outcome{f1 <= 1e-10 && f2 <= 1e-10 && bind <= 1e-10,
                   fmt::format("Fix(rho1) {:.3g}, Fix(rho2) {:.3g}, planar to binding {:.3g} (tol 1e-10)", f1, f2, bind)};
  });

  run(6, "Liouville form on L2", 2.0, [] {
    std::mt19937_64 rng(6);
    double worst = 0;
    int used = 0;
    auto embed = [](const PhaseState& s) {
      const auto rs = to_regularized(s);
      Vec8 v;
      for (int i = 0; i < 4; ++i) {
        v[i] = rs.xi[i];
        v[4 + i] = rs.eta[i];
      }
      return v;
    };
    while (used < 1000) {
      const PhaseState s = project_to_fixed(InvolutionKind::rho2, random_ball_state(rng, 3.0));
      const auto base = to_regularized(s);
      if (!locus_residual(LocusTag::l2, base).member(1e-12)) continue;
      ++used;
      // Tangent of a curve inside Fix(rho2).
      const Vec6 dir{uniform(rng, -1, 1), 0.0, uniform(rng, -1, 1), 0.0, uniform(rng, -1, 1), 0.0};
      const double eps = 1e-6;
      Vec6 a = s.flat(), b = s.flat();
      for (int k = 0; k < 6; ++k) {
        a[k] += eps * dir[k];
        b[k] -= eps * dir[k];
      }
      const Vec8 ea = embed(PhaseState::from_flat(a)), eb = embed(PhaseState::from_flat(b));
      Vec8 tan;
      for (int k = 0; k < 8; ++k) tan[k] = (ea[k] - eb[k]) / (2 * eps);
      worst = std::max(worst, std::abs(liouville_eval(base, tan)));
    }
    return Outcome{worst <= 1e-12, fmt::format("max |lambda| {:.3g} over 1000 tangents (tol 1e-12)", worst)};
  });

  run(7, "Lagrange points", 5.0, [] {
    const auto half = lagrange_points(SystemParams(0.5));
    double grad = 0, l1 = 0;
    for (double mu : {1e-4, kMu, 0.3, 0.5}) {
      const SystemParams P(mu);
      const auto eq = lagrange_points(P);
      for (const auto& q : eq.points) grad = std::max(grad, norm(effective_potential_gradient(q, P)));
      l1 = std::max(l1, std::abs(eq.points[0][0] - double(l1_bisection(mu))));
    }
    const double x0 = std::abs(half.points[0][0]), e0 = std::abs(half.energies[0] + 2.0);
    return Outcome{x0 <= 1e-12 && e0 <= 1e-12 && grad <= 1e-12 && l1 <= 1e-10,
                   fmt::format("mu=0.5: |L1| {:.3g}, |H+2| {:.3g}; max |grad U| {:.3g}; L1 vs bisection {:.3g}", x0, e0,
                               grad, l1)};
  });

  run(8, "STM accuracy and symplecticity", 30.0, [] {
    const SystemParams P(kMu);
    const double h = moon_energy();
    std::mt19937_64 rng(8);
    double fd_err = 0, sym = 0, phi_max = 0;
    int used = 0;
    while (used < 5) {
      const PhaseState s = random_moon_state(rng, P, h);
      const auto probe = integrate(s, 0.0, 10.0, P, {.record = false});
      if (probe.trajectory.termination != Termination::completed) continue;
      ++used;
      for (double t : {1.0, 5.0, 10.0}) {
        const auto [x, phi] = flow_with_stm(s, t, P);
        phi_max = std::max(phi_max, phi.cwiseAbs().maxCoeff());
        sym = std::max(sym, (phi.transpose() * symplectic_j() * phi - symplectic_j()).cwiseAbs().maxCoeff());
        // Central differences at eps and eps/2, Richardson-combined.
        const Vec6 base = s.flat();
        auto central = [&](double eps) {
          Mat6 d;
          for (int k = 0; k < 6; ++k) {
            Vec6 a = base, b = base;
            a[k] += eps;
            b[k] -= eps;
            const Vec6 fa = flow(PhaseState::from_flat(a), t, P).flat(), fb = flow(PhaseState::from_flat(b), t, P).flat();
            for (int i = 0; i < 6; ++i) d(i, k) = (fa[i] - fb[i]) / (2 * eps);
          }
          return d;
        };
        const Mat6 fd = (4.0 * central(5e-7) - central(1e-6)) / 3.0;
        fd_err = std::max(fd_err, (phi - fd).norm() / fd.norm());
      }
    }
    return Outcome{fd_err <= 1e-5 && sym <= 1e-8,
                   fmt::format("STM vs finite differences {:.3g} relative (tol 1e-5); |Phi^T J Phi - J| {:.3g} (tol 1e-8); "
                               "5 random Moon-component states, t = 1, 5, 10, max |Phi_ij| {:.3g}",
                               fd_err, sym, phi_max)};
  });

  run(9, "Kepler-limit chords", 120.0, [] {
    const SystemParams P(0.0);
    std::string detail;
    bool ok = true;
    for (double r : {0.4, 0.5, 0.6}) {
      const double T = std::numbers::pi / std::abs(std::pow(r, -1.5) - 1.0);
      FindConfig cfg;
      cfg.grid.ranges = {GridRange{r - 0.02, r + 0.02}, GridRange{-0.02, 0.02}};
      cfg.grid.n = 5;
      cfg.grid.component = HillLabel::earth_component;
      cfg.t_max = 5;
      const auto cat = find_chords(P, -0.5 / r - std::sqrt(r), ChordTarget::xz_plane, cfg);
      double best = INFINITY, res = INFINITY;
      for (const auto& c : cat.chords) {
        if (std::abs(std::abs(c.initial.q[0]) - r) > 1e-8 || std::abs(c.initial.q[2]) > 1e-8) continue;
        if (std::abs(c.duration - T) < best) {
          best = std::abs(c.duration - T);
          res = c.residual_norm;
        }
      }
      ok = ok && best <= 1e-8 && res <= 1e-10;
      detail += fmt::format("r={}: |dT| {:.3g} residual {:.3g}; ", r, best, res);
    }
    return Outcome{ok, detail};
  });

  // Criteria 10, 12 and 14 share the catalogs.
  const int n = 200;
  Catalog c20;
  double t10 = 0;
  t10 = run(10, "Moon-component chord catalog", 600.0, [&] {
    std::vector<std::size_t> counts;
    for (double t : {5.0, 10.0, 20.0}) {
      Catalog cat = search(moon_config(t, ChordTarget::xz_plane, n, 1));
      counts.push_back(cat.chords.size());
      if (t == 20.0) c20 = std::move(cat);
    }
    std::size_t good = 0, spatial = 0;
    for (const auto& c : c20.chords) {
      if (c.residual_norm <= 1e-9) ++good;
      if (c.spatial) ++spatial;
    }
    const bool ok = good >= 10 && spatial >= 1 && counts[0] < counts[1] && counts[1] < counts[2];
    return Outcome{ok, fmt::format("{}x{} grid; chords at t_max 5/10/20: {}/{}/{}; residual <= 1e-9: {}; spatial: {}",
                                   n, n, counts[0], counts[1], counts[2], good, spatial)};
  });

  run(11, "x-axis chords", 300.0, [] {
    const Catalog cat = search(moon_config(20.0, ChordTarget::x_axis, 50, 1));
    std::size_t good = 0;
    for (const auto& c : cat.chords)
      if (c.residual_norm <= 1e-9) ++good;
    return Outcome{good >= 1, fmt::format("50x50 grid over (q1, theta); chords with residual <= 1e-9: {}", good)};
  });

  run(12, "end-swap check on the catalog", 120.0, [&] {
    double worst = 0;
    const SystemParams P(kMu);
    for (const auto& c : c20.chords) worst = std::max(worst, endpoint_symmetry_gap(c, P));
    return Outcome{!c20.chords.empty() && worst <= 1e-7,
                   fmt::format("{} chords, max gap {:.3g} (tol 1e-7); {} dropped during certification",
                               c20.chords.size(), worst, c20.summary.rejected_certification)};
  });

  run(13, "twist in the Kepler limit", 120.0, [] {
    const SystemParams P(0.0);
    const double r = 0.5, nn = std::pow(r, -1.5);
    const auto orb = find_planar_orbit(P, -0.5 / r - std::sqrt(r), r, -1, std::numbers::pi / std::abs(nn - 1.0));
    const auto rep = twist_diagnostic(orb, default_amplitudes(), P);
    const double expect = 2 * std::numbers::pi * nn / std::abs(nn - 1.0);
    const double err = std::abs(std::remainder(rep.extrapolated - expect, 2 * std::numbers::pi));
    return Outcome{err <= 1e-4, fmt::format("extrapolated {:.12f}, expected {:.12f} mod 2pi, error {:.3g} (tol 1e-4)",
                                            rep.extrapolated, std::remainder(expect, 2 * std::numbers::pi), err)};
  });

  run(14, "catalog determinism", 2.0 * std::max(t10, 1.0), [&] {
    const std::string ref = serialize(moon_config(20.0, ChordTarget::xz_plane, n, 1), c20);
    const RunConfig again = moon_config(20.0, ChordTarget::xz_plane, n, 1);
    const RunConfig four = moon_config(20.0, ChordTarget::xz_plane, n, 4);
    const bool same_run = serialize(again, search(again)) == ref;
    const bool same_workers = serialize(four, search(four)) == ref;
    return Outcome{same_run && same_workers,
                   fmt::format("repeat run {}, workers 1 vs 4 {} (timestamp line excluded)",
                               same_run ? "identical" : "differs", same_workers ? "identical" : "differs")};
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
