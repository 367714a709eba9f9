#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "trichord/integrate.hpp"

using namespace trichord;

namespace {

// Direct long-double evaluation of H, written out term by term.
long double h_oracle(const PhaseState& s, long double mu) {
  const long double q1 = s.q[0], q2 = s.q[1], q3 = s.q[2];
  const long double p1 = s.p[0], p2 = s.p[1], p3 = s.p[2];
  const long double re = std::sqrt((q1 + mu) * (q1 + mu) + q2 * q2 + q3 * q3);
  const long double rm = std::sqrt((q1 - 1 + mu) * (q1 - 1 + mu) + q2 * q2 + q3 * q3);
  return 0.5L * (p1 * p1 + p2 * p2 + p3 * p3) - (1 - mu) / re - mu / rm + q1 * p2 - q2 * p1;
}

// dU/dq1 on the q1 axis.
long double axis_force(long double x, long double mu) {
  const long double de = x + mu, dm = x - 1 + mu;
  return -x + (1 - mu) * de / std::pow(std::abs(de), 3.0L) + mu * dm / std::pow(std::abs(dm), 3.0L);
}

// Bisection for L1 between the primaries.
long double l1_bisection(long double mu) {
  long double a = -mu + 1e-9L, b = 1 - mu - 1e-9L;
  for (int i = 0; i < 200; ++i) {
    const long double m = 0.5L * (a + b);
    if ((axis_force(a, mu) > 0) == (axis_force(m, mu) > 0)) a = m;
    else b = m;
  }
  return 0.5L * (a + b);
}

PhaseState circular(double r) {
  // Circular Kepler orbit whose q2 = 0 crossings are pi / |r^-1.5 - 1| apart.
  const double qdot2 = r - 1.0 / std::sqrt(r);
  const Vec3 q{r, 0.0, 0.0};
  return {q, momentum_from_velocity({0.0, qdot2, 0.0}, q)};
}

}  // namespace

TEST_CASE("hamiltonian matches direct evaluation") {
  const SystemParams em;
  CHECK(hamiltonian({{0, 0, 0}, {0, 0, 0}}, SystemParams(0.5)) == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(hamiltonian({{1, 0, 0}, {0, 0, 0}}, SystemParams(0.0)) == doctest::Approx(-1.0).epsilon(1e-15));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 1000; ++i) {
    const PhaseState s{{u(rng), u(rng), u(rng)}, {u(rng), u(rng), u(rng)}};
    if (!em.guard_ok(s.q)) continue;
    const double ref = double(h_oracle(s, em.mu()));
    CHECK(std::abs(hamiltonian(s, em) - ref) <= 1e-14 * std::max(1.0, std::abs(ref)));
    CHECK(jacobi_constant(s, em) == doctest::Approx(-2.0 * ref).epsilon(1e-14));
  }
}

TEST_CASE("velocity and momentum are inverse") {
  const PhaseState s{{0.3, -0.7, 0.2}, {1.1, 0.4, -0.5}};
  const Vec3 v = velocity_from_momentum(s);
  CHECK(v[0] == doctest::Approx(1.1 + 0.7));
  CHECK(v[1] == doctest::Approx(0.4 + 0.3));
  CHECK(v[2] == doctest::Approx(-0.5));
  const Vec3 p = momentum_from_velocity(v, s.q);
  for (int i = 0; i < 3; ++i) CHECK(p[i] == doctest::Approx(s.p[i]).epsilon(1e-15));
}

TEST_CASE("vector field agrees with finite differences of H") {
  const SystemParams P(0.0121505856);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  int tested = 0;
  while (tested < 200) {
    const PhaseState s{{u(rng), u(rng), 0.3 * u(rng)}, {u(rng), u(rng), u(rng)}};
    if (!P.guard_ok(s.q) || norm(sub(s.q, P.moon_pos())) < 0.05 || norm(sub(s.q, P.earth_pos())) < 0.05) continue;
    ++tested;
    const Vec6 f = vector_field(s, P);
    const Vec6 x = s.flat();
    for (int k = 0; k < 6; ++k) {
      const double eps = 1e-6;
      Vec6 a = x, b = x;
      a[k] += eps;
      b[k] -= eps;
      const double d = (hamiltonian(PhaseState::from_flat(a), P) - hamiltonian(PhaseState::from_flat(b), P)) / (2 * eps);
      // dq/dt = dH/dp, dp/dt = -dH/dq
      const double expect = k < 3 ? -d : d;
      const int idx = k < 3 ? k + 3 : k - 3;
      CHECK(std::abs(f[idx] - expect) <= 1e-6 * std::max(1.0, std::abs(expect)));
    }
    const Mat6 A = variational_matrix(s, P);
    for (int k = 0; k < 6; ++k) {
      const double eps = 1e-6;
      Vec6 a = x, b = x;
      a[k] += eps;
      b[k] -= eps;
      const Vec6 fa = vector_field(PhaseState::from_flat(a), P), fb = vector_field(PhaseState::from_flat(b), P);
      for (int i = 0; i < 6; ++i) {
        const double fd = (fa[i] - fb[i]) / (2 * eps);
        CHECK(std::abs(A(i, k) - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
      }
    }
    // Hamiltonian matrix: J^-1 A is symmetric.
    const Mat6 S = symplectic_j().transpose() * A;
    CHECK((S - S.transpose()).norm() <= 1e-10 * S.norm());
  }
}

TEST_CASE("lagrange points") {
  const auto half = lagrange_points(SystemParams(0.5));
  CHECK(std::abs(half.points[0][0]) <= 1e-12);
  CHECK(half.energies[0] == doctest::Approx(-2.0).epsilon(1e-12));
  for (double mu : {1e-4, 0.0121505856, 0.3, 0.5}) {
    const SystemParams P(mu);
    const auto eq = lagrange_points(P);
    for (int i = 0; i < 5; ++i) {
      CHECK(norm(effective_potential_gradient(eq.points[i], P)) <= 1e-12);
      CHECK(eq.energies[i] == doctest::Approx(effective_potential(eq.points[i], P)).epsilon(1e-15));
      if (i > 0) CHECK(eq.energies[i] >= eq.energies[i - 1]);
    }
    CHECK(std::abs(eq.points[0][0] - double(l1_bisection(mu))) <= 1e-10);
  }
  // Equilateral points.
  const SystemParams em;
  const auto eq = lagrange_points(em);
  const Vec3 l4{0.5 - em.mu(), std::sqrt(3.0) / 2, 0.0};
  bool found = false;
  for (const auto& p : eq.points) found = found || (std::abs(p[0] - l4[0]) < 1e-12 && std::abs(std::abs(p[1]) - l4[1]) < 1e-12);
  CHECK(found);
  CHECK_THROWS_AS(lagrange_points(SystemParams(0.0)), PreconditionError);
}

TEST_CASE("points at rest are equilibria of the field at the lagrange points") {
  const SystemParams P;
  for (const auto& q : lagrange_points(P).points) {
    const PhaseState s = at_rest(q);
    const Vec3 v = velocity_from_momentum(s);
    CHECK(norm(v) <= 1e-15);
    const Vec6 f = vector_field(s, P);
    double m = 0;
    for (double x : f) m = std::max(m, std::abs(x));
    CHECK(m <= 1e-12);
  }
}

TEST_CASE("hill classification") {
  const SystemParams half(0.5);
  CHECK(hill_classification({0.0, 0.0, 0.0}, -2.1, half) == HillLabel::forbidden);
  CHECK(hill_classification({0.45, 0.0, 0.0}, -2.1, half) == HillLabel::moon_component);
  CHECK(hill_classification({-0.45, 0.0, 0.0}, -2.1, half) == HillLabel::earth_component);
  const SystemParams em;
  const double h = lagrange_points(em).energies[0] - 1e-3;
  CHECK(hill_classification({0.95, 0.0, 0.0}, h, em) == HillLabel::moon_component);
  CHECK(hill_classification({0.3, 0.0, 0.0}, h, em) == HillLabel::earth_component);
  CHECK(hill_classification({3.0, 0.0, 0.0}, h, em) == HillLabel::exterior);
  const auto b = component_bounds(HillLabel::moon_component, h, em);
  CHECK_FALSE(b.empty);
  CHECK(b.q1_min > lagrange_points(em).points[0][0] - 1e-3);
  CHECK(b.q1_max < lagrange_points(em).points[1][0] + 1e-3);
}

TEST_CASE("guard") {
  const SystemParams P;
  CHECK_THROWS_AS(P.check_guard(P.moon_pos()), GuardViolation);
  try {
    P.check_guard({P.moon_pos()[0] + 1e-4, 0, 0});
    FAIL("no throw");
  } catch (const GuardViolation& g) {
    CHECK(g.primary == Primary::moon);
  }
  // A massless Moon is not guarded.
  CHECK(SystemParams(0.0).guard_ok({1.0, 0.0, 0.0}));
}

TEST_CASE("integration conserves energy and reverses") {
  const SystemParams P(0.0);
  const PhaseState s = circular(0.5);
  const auto res = integrate(s, 0.0, 20.0, P, {.tol = 1e-12});
  CHECK(res.trajectory.termination == Termination::completed);
  CHECK(res.trajectory.max_energy_drift <= 1e-10);
  // The radius stays at 0.5.
  for (const auto& x : res.trajectory.states) CHECK(std::abs(norm(x.q) - 0.5) <= 1e-9);
  const PhaseState back = flow(res.trajectory.final_state, -20.0, P);
  CHECK(max_abs_diff(back, s) <= 1e-8);
  // Planar states stay planar.
  const SystemParams em;
  const PhaseState pl{{0.9, 0.0, 0.0}, {0.0, 0.5, 0.0}};
  const auto r2 = integrate(pl, 0.0, 5.0, em);
  for (const auto& x : r2.trajectory.states) {
    CHECK(x.q[2] == 0.0);
    CHECK(x.p[2] == 0.0);
  }
}

TEST_CASE("event times in the kepler limit") {
  const SystemParams P(0.0);
  for (double r : {0.4, 0.5, 0.6}) {
    const double n = std::pow(r, -1.5);
    const double half = std::numbers::pi / std::abs(n - 1.0);
    IntegrateOptions o;
    o.events = {coordinate_event(1, 0, true)};
    o.event_skip = 1e-9;
    const auto res = integrate(circular(r), 0.0, 10.0, P, o);
    REQUIRE(res.events.size() == 1);
    CHECK(std::abs(res.events[0].t - half) <= 1e-8 * half);
    CHECK(std::abs(res.events[0].state.q[1]) <= 1e-12);
  }
}

TEST_CASE("stm is symplectic and matches finite differences") {
  const SystemParams P;
  const PhaseState s{{0.9, 0.0, 0.02}, {0.0, 0.6, 0.0}};
  const auto [x, phi] = flow_with_stm(s, 3.0, P);
  CHECK((phi.transpose() * symplectic_j() * phi - symplectic_j()).norm() <= 1e-8);
  const Vec6 base = s.flat();
  for (int k = 0; k < 6; ++k) {
    const double eps = 1e-6;
    Vec6 a = base, b = base;
    a[k] += eps;
    b[k] -= eps;
    const Vec6 fa = flow(PhaseState::from_flat(a), 3.0, P).flat();
    const Vec6 fb = flow(PhaseState::from_flat(b), 3.0, P).flat();
    for (int i = 0; i < 6; ++i) {
      const double fd = (fa[i] - fb[i]) / (2 * eps);
      CHECK(std::abs(phi(i, k) - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
    }
  }
  // Without STM step control the state part is identical to a plain run.
  IntegrateOptions o;
  o.with_stm = true;
  o.stm_error_control = false;
  CHECK(max_abs_diff(integrate(s, 0.0, 3.0, P, o).trajectory.final_state, flow(s, 3.0, P)) == 0.0);
}

TEST_CASE("guard violation is reported and flow throws") {
  const SystemParams P;
  // Drop from rest just outside the Moon.
  const PhaseState s = at_rest({P.moon_pos()[0] + 0.01, 0.0, 0.0});
  const auto res = integrate(s, 0.0, 5.0, P);
  CHECK(res.trajectory.termination == Termination::guard_violation);
  REQUIRE(res.trajectory.guard.has_value());
  CHECK(res.trajectory.guard->primary == Primary::moon);
  CHECK_THROWS_AS(flow(s, 5.0, P), GuardViolation);
}
