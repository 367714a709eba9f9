#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "trichord/symmetry.hpp"

using namespace trichord;

namespace {

const InvolutionKind kAll[] = {InvolutionKind::r, InvolutionKind::rho1, InvolutionKind::rho2};

}  // namespace

TEST_CASE("involution algebra in integer arithmetic") {
  const IntMat6 I = IntMat6::Identity();
  const IntMat6 J = symplectic_j_int();
  CHECK(J * J == -I);
  for (auto k : kAll) {
    const IntMat6 M = involution_matrix(k);
    CHECK(M * M == I);
    const int sign = k == InvolutionKind::r ? 1 : -1;
    CHECK(M.transpose() * J * M == sign * J);
  }
  // rho1 = r rho2 and the three commute.
  const IntMat6 r = involution_matrix(InvolutionKind::r);
  const IntMat6 r1 = involution_matrix(InvolutionKind::rho1);
  const IntMat6 r2 = involution_matrix(InvolutionKind::rho2);
  CHECK(r * r2 == r1);
  CHECK(r * r1 == r1 * r);
}

TEST_CASE("documented sign patterns") {
  CHECK(involution_signs(InvolutionKind::r) == std::array<int, 6>{1, 1, -1, 1, 1, -1});
  CHECK(involution_signs(InvolutionKind::rho1) == std::array<int, 6>{1, -1, -1, -1, 1, 1});
  CHECK(involution_signs(InvolutionKind::rho2) == std::array<int, 6>{1, -1, 1, -1, 1, -1});
  const PhaseState s{{1, 2, 3}, {4, 5, 6}};
  CHECK(apply_involution(InvolutionKind::rho2, s) == PhaseState{{1, -2, 3}, {-4, 5, -6}});
}

TEST_CASE("hamiltonian is invariant") {
  const SystemParams P;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 10000; ++i) {
    const PhaseState s{{u(rng), u(rng), u(rng)}, {u(rng), u(rng), u(rng)}};
    if (!P.guard_ok(s.q)) continue;
    const double h = hamiltonian(s, P);
    for (auto k : kAll) {
      CHECK(std::abs(hamiltonian(apply_involution(k, s), P) - h) <= 1e-14 * std::max(1.0, std::abs(h)));
    }
  }
}

TEST_CASE("fixed loci") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const PhaseState s{{u(rng), u(rng), u(rng)}, {u(rng), u(rng), u(rng)}};
    for (auto k : kAll) {
      const PhaseState f = project_to_fixed(k, s);
      CHECK(apply_involution(k, f) == f);
      for (double v : fixed_residual(k, f)) CHECK(v == 0.0);
      // Residual vanishes exactly when the state is fixed.
      double m = 0;
      for (double v : fixed_residual(k, s)) m = std::max(m, std::abs(v));
      CHECK((m == 0.0) == (apply_involution(k, s) == s));
      CHECK(max_abs_diff(apply_involution(k, s), s) == doctest::Approx(2 * m));
    }
  }
  CHECK(fixed_residual_indices(InvolutionKind::r) == std::vector<int>{2, 5});
  CHECK(fixed_residual_indices(InvolutionKind::rho1) == std::vector<int>{1, 2, 3});
  CHECK(fixed_residual_indices(InvolutionKind::rho2) == std::vector<int>{1, 3, 5});
}

TEST_CASE("flow commutes with the involutions") {
  const SystemParams P;
  const PhaseState s{{0.9, 0.05, 0.03}, {0.02, 0.55, 0.01}};
  const double t = 2.0;
  const PhaseState x = flow(s, t, P);
  // r commutes with the flow; rho reverses it.
  CHECK(max_abs_diff(flow(apply_involution(InvolutionKind::r, s), t, P), apply_involution(InvolutionKind::r, x)) <= 1e-9);
  for (auto k : {InvolutionKind::rho1, InvolutionKind::rho2}) {
    CHECK(max_abs_diff(flow(apply_involution(k, x), t, P), apply_involution(k, s)) <= 1e-9);
  }
}

TEST_CASE("symmetric extension is a trajectory") {
  const SystemParams P;
  const PhaseState s{{0.9, 0.05, 0.03}, {0.02, 0.55, 0.01}};
  const auto res = integrate(s, 0.0, 3.0, P);
  for (auto k : {InvolutionKind::rho1, InvolutionKind::rho2}) {
    const Trajectory y = symmetric_extension(res.trajectory, k);
    REQUIRE(y.times.size() == res.trajectory.times.size());
    CHECK(y.times.front() == 0.0);
    CHECK(y.times.back() == doctest::Approx(3.0));
    for (std::size_t i = 1; i < y.times.size(); ++i) CHECK(y.times[i] >= y.times[i - 1]);
    // Re-integrating the extension reproduces it.
    const std::size_t mid = y.times.size() / 2;
    const PhaseState z = flow(y.states.front(), y.times[mid], P);
    CHECK(max_abs_diff(z, y.states[mid]) <= 1e-8);
    CHECK(max_abs_diff(flow(y.states.front(), y.times.back(), P), y.states.back()) <= 1e-8);
  }
  CHECK_THROWS_AS(symmetric_extension(res.trajectory, InvolutionKind::r), PreconditionError);
}

TEST_CASE("kepler half arc closes under rho2") {
  const SystemParams P(0.0);
  const double r = 0.5;
  const Vec3 q{r, 0.0, 0.0};
  const PhaseState s{q, momentum_from_velocity({0.0, r - 1.0 / std::sqrt(r), 0.0}, q)};
  const double half = std::numbers::pi / std::abs(std::pow(r, -1.5) - 1.0);
  const auto res = integrate(s, 0.0, half, P);
  const auto& end = res.trajectory.final_state;
  for (double v : fixed_residual(InvolutionKind::rho2, end)) CHECK(std::abs(v) <= 1e-9);
  const Trajectory y = symmetric_extension(res.trajectory, InvolutionKind::rho2);
  // The extension starts where the arc ends, and ends where the arc started.
  CHECK(max_abs_diff(y.states.front(), end) <= 1e-9);
  CHECK(max_abs_diff(y.states.back(), s) <= 1e-12);
  CHECK(max_abs_diff(flow(s, 2 * half, P), s) <= 1e-8);
}
