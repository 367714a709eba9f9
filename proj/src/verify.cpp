#include "trichord/verify.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "trichord/chords.hpp"
#include "trichord/moser.hpp"
#include "trichord/section.hpp"

namespace trichord {

namespace {

using Check = std::function<std::pair<bool, std::string>()>;

PhaseState random_state(std::mt19937_64& rng, double qs, double ps) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PhaseState s;
  for (int i = 0; i < 3; ++i) {
    s.q[i] = qs * u(rng);
    s.p[i] = ps * u(rng);
  }
  return s;
}

std::pair<bool, std::string> involution_algebra() {
  const IntMat6 j = symplectic_j_int();
  bool ok = true;
  for (auto k : {InvolutionKind::r, InvolutionKind::rho1, InvolutionKind::rho2}) {
    const IntMat6 m = involution_matrix(k);
    const IntMat6 sign = k == InvolutionKind::r ? j : IntMat6(-j);
    ok = ok && (m * m == IntMat6::Identity()) && (m.transpose() * j * m == sign);
  }
  return {ok, "M^2 = I and M^T J M = (J, -J, -J) for (r, rho1, rho2)"};
}

std::pair<bool, std::string> h_invariance() {
  const SystemParams params;
  std::mt19937_64 rng(1);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const PhaseState s = random_state(rng, 1.5, 1.5);
    if (!params.guard_ok(s.q)) continue;
    const double h = hamiltonian(s, params);
    for (auto k : {InvolutionKind::r, InvolutionKind::rho1, InvolutionKind::rho2})
      worst = std::max(worst, std::abs(hamiltonian(apply_involution(k, s), params) - h) / std::max(1.0, std::abs(h)));
  }
  return {worst <= 1e-14, fmt::format("max relative deviation {:.3g}", worst)};
}

std::pair<bool, std::string> energy_and_ecliptic() {
  const SystemParams params;
  const double h = lagrange_points(params).energies[0] - 1e-3;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double drift = 0.0, planar = 0.0;
  int used = 0;
  while (used < 10) {
    const Vec3 q{0.9 + 0.15 * u(rng), 0.05 * (2 * u(rng) - 1), 0.03 * (2 * u(rng) - 1)};
    if (!params.guard_ok(q) || hill_classification(q, h, params) != HillLabel::moon_component) continue;
    const double v = std::sqrt(2.0 * (h - effective_potential(q, params)));
    const double th = 2 * std::numbers::pi * u(rng);
    const PhaseState s{q, momentum_from_velocity({v * std::cos(th), v * std::sin(th), 0.0}, q)};
    IntegrateOptions o;
    o.record = true;
    const auto run = integrate(s, 0.0, 20.0, params, o);
    if (run.trajectory.termination != Termination::completed) continue;
    drift = std::max(drift, run.trajectory.max_energy_drift);
    ++used;
    if (used <= 3) {
      PhaseState flat = s;
      flat.q[2] = 0.0;
      const auto pr = integrate(flat, 0.0, 20.0, params, o);
      for (const auto& x : pr.trajectory.states) planar = std::max(planar, std::abs(x.q[2]) + std::abs(x.p[2]));
    }
  }
  return {drift <= 1e-9 && planar <= 1e-10,
          fmt::format("energy drift {:.3g} over t in [0, 20]; planar leak {:.3g}", drift, planar)};
}

std::pair<bool, std::string> moser_round_trip() {
  std::mt19937_64 rng(3);
  double rt = 0.0, con = 0.0, back = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const PhaseState s = random_state(rng, 10.0 / std::sqrt(3.0), 10.0 / std::sqrt(3.0));
    const auto rs = to_regularized(s);
    const auto [a, b] = rs.constraint_residuals();
    con = std::max({con, a, b});
    const PhaseState s2 = from_regularized(rs);
    rt = std::max(rt, max_abs_diff(s, s2) / std::max(1.0, std::max(norm(s.q), norm(s.p))));
    const auto rs2 = to_regularized(s2);
    for (int k = 0; k < 4; ++k)
      back = std::max({back, std::abs(rs2.xi[k] - rs.xi[k]), std::abs(rs2.eta[k] - rs.eta[k]) / std::max(1.0, std::abs(rs.eta[k]))});
  }
  return {rt <= 1e-12 && con <= 1e-12 && back <= 1e-12,
          fmt::format("round trip {:.3g} / {:.3g}, constraints {:.3g}", rt, back, con)};
}

std::pair<bool, std::string> locus_transport() {
  std::mt19937_64 rng(4);
  double f1 = 0.0, f2 = 0.0, bind = 0.0;
  for (int i = 0; i < 1000; ++i) {
    PhaseState s = random_state(rng, 2.0, 2.0);
    f1 = std::max(f1, locus_residual(LocusTag::f1_tilde, to_regularized(project_to_fixed(InvolutionKind::rho1, s))).norm());
    f2 = std::max(f2, locus_residual(LocusTag::f2_tilde, to_regularized(project_to_fixed(InvolutionKind::rho2, s))).norm());
    bind = std::max(bind, locus_residual(LocusTag::binding, to_regularized(project_to_fixed(InvolutionKind::r, s))).norm());
  }
  return {f1 <= 1e-10 && f2 <= 1e-10 && bind <= 1e-12,
          fmt::format("Fix(rho1) {:.3g}, Fix(rho2) {:.3g}, planar -> binding {:.3g}", f1, f2, bind)};
}

std::pair<bool, std::string> liouville_on_l2() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double a = std::numbers::pi * u(rng);
    RegularizedState rs;
    rs.xi = {std::cos(a), 0.0, std::sin(a), 0.0};
    rs.eta = {0.0, 2.0 * u(rng), 0.0, std::abs(2.0 * u(rng))};
    // Tangent of L2: slide along the equator, vary eta1 and eta3.
    const double ds = u(rng);
    const Vec8 t{-std::sin(a) * ds, 0.0, std::cos(a) * ds, 0.0, 0.0, u(rng), 0.0, u(rng)};
    worst = std::max(worst, std::abs(liouville_eval(rs, t)));
  }
  return {worst <= 1e-12, fmt::format("max |lambda(v)| {:.3g}", worst)};
}

std::pair<bool, std::string> equilibria() {
  double worst = 0.0, field = 0.0;
  for (double mu : {1e-4, kEarthMoonMu, 0.3, 0.5}) {
    const SystemParams params(mu);
    const auto eq = lagrange_points(params);
    for (const auto& q : eq.points) {
      worst = std::max(worst, norm(effective_potential_gradient(q, params)));
      const Vec6 f = vector_field(at_rest(q), params);
      for (double x : f) field = std::max(field, std::abs(x));
    }
  }
  const auto sym = lagrange_points(SystemParams(0.5));
  const double l1 = norm(sym.points[0]) + std::abs(sym.energies[0] + 2.0);
  return {worst <= 1e-12 && field <= 1e-10 && l1 <= 1e-12,
          fmt::format("max |grad U| {:.3g}, max |field| {:.3g}, mu = 0.5 L1 error {:.3g}", worst, field, l1)};
}

std::pair<bool, std::string> stm_checks() {
  const SystemParams params;
  const PhaseState s{{0.95, 0.02, 0.01}, {0.0, 0.0, 0.0}};
  PhaseState s0 = s;
  s0.p = {-s.q[1] + 0.1, s.q[0] + 0.25, 0.05};
  const double t = 3.0;
  const auto [end, phi] = flow_with_stm(s0, t, params);
  double fd_err = 0.0;
  const double eps = 1e-6;
  for (int j = 0; j < 6; ++j) {
    Vec6 a = s0.flat(), b = s0.flat();
    a[j] += eps;
    b[j] -= eps;
    const Vec6 fa = flow(PhaseState::from_flat(a), t, params).flat();
    const Vec6 fb = flow(PhaseState::from_flat(b), t, params).flat();
    for (int i = 0; i < 6; ++i) {
      const double d = (fa[i] - fb[i]) / (2 * eps);
      fd_err = std::max(fd_err, std::abs(d - phi(i, j)) / std::max(1.0, phi.cwiseAbs().maxCoeff()));
    }
  }
  const Mat6 j = symplectic_j();
  const double sym = (phi.transpose() * j * phi - j).cwiseAbs().maxCoeff();
  (void)end;
  return {fd_err <= 1e-5 && sym <= 1e-8, fmt::format("finite differences {:.3g}, symplectic defect {:.3g}", fd_err, sym)};
}

std::pair<bool, std::string> reversibility() {
  const SystemParams params;
  const PhaseState s{{0.97, 0.01, 0.02}, {0.03, 0.9, -0.04}};
  double worst = 0.0;
  for (auto k : {InvolutionKind::rho1, InvolutionKind::rho2}) {
    const PhaseState fwd = flow(apply_involution(k, s), 5.0, params);
    const PhaseState bwd = apply_involution(k, flow(s, -5.0, params));
    worst = std::max(worst, max_abs_diff(fwd, bwd));
  }
  return {worst <= 1e-8, fmt::format("max gap {:.3g}", worst)};
}

std::pair<bool, std::string> kepler_chord() {
  const SystemParams params(0.0);
  const double r = 0.5, n = std::pow(r, -1.5);
  const double h = -1.0 / (2.0 * r) - std::sqrt(r);
  const double expect = std::numbers::pi / std::abs(n - 1.0);
  Seed seed;
  seed.chart = {r * (1 + 1e-4), 0.0};
  seed.branch = -1;
  seed.h = h;
  seed.state = *seed_state(ChordTarget::xz_plane, seed.chart, h, -1, params);
  const Chord c = refine(seed, expect * 1.001, ChordTarget::xz_plane, params);
  const double err = std::abs(c.duration - expect);
  return {err <= 1e-8 && c.residual_norm <= 1e-10,
          fmt::format("duration error {:.3g}, residual {:.3g}", err, c.residual_norm)};
}

std::pair<bool, std::string> kepler_twist() {
  const SystemParams params(0.0);
  const double r = 0.5, n = std::pow(r, -1.5);
  const double h = -1.0 / (2.0 * r) - std::sqrt(r);
  const auto orbit = find_planar_orbit(params, h, r * 1.01, -1, std::numbers::pi / std::abs(n - 1.0));
  const auto rep = twist_diagnostic(orbit, {1e-5, 1e-4, 1e-3}, params);
  const double expect = std::remainder(2.0 * std::numbers::pi * n / std::abs(n - 1.0), 2.0 * std::numbers::pi);
  const double err = std::abs(std::remainder(rep.extrapolated - expect, 2.0 * std::numbers::pi));
  return {err <= 1e-4, fmt::format("extrapolated {:.12f} vs {:.12f}", rep.extrapolated, expect)};
}

}  // namespace

std::vector<CheckResult> run_invariant_suite() {
  const std::vector<std::pair<std::string, Check>> checks = {
      {"involution algebra", involution_algebra},
      {"H invariance under involutions", h_invariance},
      {"energy conservation and ecliptic invariance", energy_and_ecliptic},
      {"regularization chart round trips", moser_round_trip},
      {"fixed loci in regularized coordinates", locus_transport},
      {"Liouville form on L2 tangents", liouville_on_l2},
      {"equilibria", equilibria},
      {"state-transition matrix", stm_checks},
      {"reversibility", reversibility},
      {"Kepler circular chord", kepler_chord},
      {"Kepler vertical twist", kepler_twist},
  };
  std::vector<CheckResult> out;
  for (const auto& [name, fn] : checks) {
    CheckResult r;
    r.name = name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      auto [ok, detail] = fn();
      r.pass = ok;
      r.detail = std::move(detail);
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace trichord
