#include <doctest.h>

#include <cmath>
#include <random>

#include "trichord/moser.hpp"
#include "trichord/symmetry.hpp"

using namespace trichord;

namespace {

Eigen::Matrix<double, 8, 1> embed(const PhaseState& s) {
  const auto rs = to_regularized(s);
  Eigen::Matrix<double, 8, 1> v;
  for (int i = 0; i < 4; ++i) {
    v(i) = rs.xi[i];
    v(4 + i) = rs.eta[i];
  }
  return v;
}

// Central-difference Jacobian of the chart, 8x6.
Eigen::Matrix<double, 8, 6> chart_jacobian(const PhaseState& s, double eps = 1e-6) {
  Eigen::Matrix<double, 8, 6> d;
  const Vec6 x = s.flat();
  for (int k = 0; k < 6; ++k) {
    Vec6 a = x, b = x;
    a[k] += eps;
    b[k] -= eps;
    d.col(k) = (embed(PhaseState::from_flat(a)) - embed(PhaseState::from_flat(b))) / (2 * eps);
  }
  return d;
}

PhaseState random_state(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto vec = [&] {
    Vec3 v;
    do {
      v = {u(rng), u(rng), u(rng)};
    } while (norm(v) > 1.0);
    return Vec3{radius * v[0], radius * v[1], radius * v[2]};
  };
  return {vec(), vec()};
}

}  // namespace

TEST_CASE("chart examples") {
  auto rs = to_regularized({{0, 0, 0}, {0, 0, 0}});
  CHECK(rs.xi == Vec4{-1, 0, 0, 0});
  CHECK(rs.eta == Vec4{0, 0, 0, 0});
  rs = to_regularized({{0, 0, 0}, {1, 0, 0}});
  CHECK(rs.xi[0] == doctest::Approx(0.0));
  CHECK(rs.xi[1] == doctest::Approx(1.0));
  // q = (1, 0, 0), p = 0: x = 0, y = (-1, 0, 0).
  rs = to_regularized({{1, 0, 0}, {0, 0, 0}});
  CHECK(rs.xi == Vec4{-1, 0, 0, 0});
  CHECK(rs.eta[1] == doctest::Approx(-0.5));
  CHECK(rs.on_manifold(1e-15));
}

TEST_CASE("round trips and constraints") {
  std::mt19937_64 rng(17);
  double worst = 0, worst_back = 0, worst_c = 0;
  for (int i = 0; i < 10000; ++i) {
    const PhaseState s = random_state(rng, 10.0);
    const auto rs = to_regularized(s);
    const auto [c1, c2] = rs.constraint_residuals();
    worst_c = std::max({worst_c, c1, c2 / std::max(1.0, std::sqrt(rs.eta[0] * rs.eta[0] + rs.eta[1] * rs.eta[1] +
                                                                   rs.eta[2] * rs.eta[2] + rs.eta[3] * rs.eta[3]))});
    const PhaseState back = from_regularized(rs);
    worst = std::max(worst, max_abs_diff(back, s) / std::max(1.0, std::max(norm(s.q), norm(s.p))));
    const auto rs2 = to_regularized(back);
    for (int k = 0; k < 4; ++k) {
      worst_back = std::max(worst_back, std::abs(rs2.xi[k] - rs.xi[k]));
      worst_back = std::max(worst_back, std::abs(rs2.eta[k] - rs.eta[k]) / std::max(1.0, std::abs(rs.eta[k])));
    }
  }
  CHECK(worst <= 1e-12);
  CHECK(worst_back <= 1e-12);
  CHECK(worst_c <= 1e-12);
}

TEST_CASE("chart is symplectic") {
  // Pullback of dxi ^ deta restricted to the image equals dq ^ dp.
  std::mt19937_64 rng(23);
  Eigen::Matrix<double, 8, 8> omega = Eigen::Matrix<double, 8, 8>::Zero();
  omega.block<4, 4>(0, 4) = Eigen::Matrix4d::Identity();
  omega.block<4, 4>(4, 0) = -Eigen::Matrix4d::Identity();
  for (int i = 0; i < 100; ++i) {
    const PhaseState s = random_state(rng, 2.0);
    const auto D = chart_jacobian(s);
    const Mat6 pulled = D.transpose() * omega * D;
    CHECK((pulled - symplectic_j()).norm() <= 1e-6);
  }
}

TEST_CASE("chart domain errors") {
  RegularizedState pole;
  pole.xi = {1, 0, 0, 0};
  CHECK_THROWS_AS(from_regularized(pole), ChartDomainError);
  RegularizedState off;
  off.xi = {0.5, 0, 0, 0};
  CHECK_THROWS_AS(from_regularized(off), PreconditionError);
  // Large momenta approach the pole without reaching it.
  const PhaseState far{{0.1, 0.2, 0.3}, {1e5, 0, 0}};
  CHECK_NOTHROW(from_regularized(to_regularized(far)));
}

TEST_CASE("fixed loci are transported") {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 1000; ++i) {
    const PhaseState s = random_state(rng, 5.0);
    const PhaseState f1 = project_to_fixed(InvolutionKind::rho1, s);
    const PhaseState f2 = project_to_fixed(InvolutionKind::rho2, s);
    CHECK(locus_residual(LocusTag::f1_tilde, to_regularized(f1)).norm() <= 1e-10);
    CHECK(locus_residual(LocusTag::f2_tilde, to_regularized(f2)).norm() <= 1e-10);
    const PhaseState planar = project_to_fixed(InvolutionKind::r, s);
    CHECK(locus_residual(LocusTag::binding, to_regularized(planar)).member(1e-10));
    // A generic state is on none of them.
    CHECK(locus_residual(LocusTag::f2_tilde, to_regularized(s)).norm() > 1e-10);
  }
}

TEST_CASE("page sign") {
  const auto log = page_sign_log();
  CHECK(log.q3_sign == -1);
  CHECK_FALSE(log.description.empty());
  // Independent probe: p3 = 0, q3 < 0 gives eta3 >= 0.
  const auto rs = to_regularized({{0.7, 0.4, -0.2}, {-0.3, 0.9, 0.0}});
  CHECK(rs.eta[3] >= 0.0);
  CHECK(locus_residual(LocusTag::page_w, rs).member(1e-12));
}

TEST_CASE("liouville form") {
  const auto rs = to_regularized({{0.3, -0.4, 0.5}, {0.2, 0.1, -0.6}});
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1, 1);
  Vec8 raw;
  for (double& v : raw) v = u(rng);
  CHECK_THROWS_AS(liouville_eval(rs, raw), PreconditionError);
  const Vec8 t = project_tangent(rs, raw);
  const double expect = -(rs.eta[0] * t[0] + rs.eta[1] * t[1] + rs.eta[2] * t[2]);
  CHECK(liouville_eval(rs, t) == doctest::Approx(expect).epsilon(1e-15));

  // Tangents of L2, built from curves in Fix(rho2) with eta3 >= 0.
  double worst = 0;
  int used = 0;
  while (used < 1000) {
    const PhaseState s = project_to_fixed(InvolutionKind::rho2, random_state(rng, 3.0));
    const auto base = to_regularized(s);
    if (!locus_residual(LocusTag::l2, base).member(1e-12)) continue;
    ++used;
    Vec6 dir{u(rng), 0.0, u(rng), 0.0, u(rng), 0.0};
    const double eps = 1e-6;
    Vec6 a = s.flat(), b = s.flat();
    for (int k = 0; k < 6; ++k) {
      a[k] += eps * dir[k];
      b[k] -= eps * dir[k];
    }
    const auto ea = embed(PhaseState::from_flat(a)), eb = embed(PhaseState::from_flat(b));
    Vec8 tan;
    for (int k = 0; k < 8; ++k) tan[k] = (ea(k) - eb(k)) / (2 * eps);
    worst = std::max(worst, std::abs(liouville_eval(base, tan)));
  }
  CHECK(worst <= 1e-12);
}
