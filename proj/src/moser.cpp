#include "trichord/moser.hpp"

#include <cmath>

#include <fmt/format.h>

namespace trichord {

namespace {
double dot4(const Vec4& a, const Vec4& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]; }
}  // namespace

std::pair<double, double> RegularizedState::constraint_residuals() const {
  return {std::abs(dot4(xi, xi) - 1.0), std::abs(dot4(xi, eta))};
}

bool RegularizedState::on_manifold(double tol) const {
  const auto [a, b] = constraint_residuals();
  return a <= tol && b <= tol;
}

RegularizedState to_regularized(const PhaseState& s) {
  const Vec3 x = s.p;
  const Vec3 y = {-s.q[0], -s.q[1], -s.q[2]};
  const double xx = dot(x, x);
  const double xy = dot(x, y);
  const double den = xx + 1.0;
  RegularizedState rs;
  rs.xi[0] = (xx - 1.0) / den;
  rs.eta[0] = xy;
  for (int i = 0; i < 3; ++i) {
    rs.xi[i + 1] = 2.0 * x[i] / den;
    rs.eta[i + 1] = 0.5 * den * y[i] - xy * x[i];
  }
  return rs;
}

PhaseState from_regularized(const RegularizedState& rs) {
  const double gap = 1.0 - rs.xi[0];
  if (gap <= 1e-12) throw ChartDomainError("from_regularized: xi at the North Pole (collision)");
  if (!rs.on_manifold()) throw PreconditionError("from_regularized: state is off T*S^3");
  PhaseState s;
  for (int i = 0; i < 3; ++i) {
    const double x = rs.xi[i + 1] / gap;
    const double y = gap * rs.eta[i + 1] + rs.eta[0] * rs.xi[i + 1];
    s.p[i] = x;
    s.q[i] = -y;
  }
  return s;
}

const char* to_string(LocusTag tag) {
  switch (tag) {
    case LocusTag::f1_tilde: return "F1tilde";
    case LocusTag::f2_tilde: return "F2tilde";
    case LocusTag::page_w: return "pageW";
    case LocusTag::binding: return "binding";
    case LocusTag::l2: return "L2";
  }
  return "?";
}

double LocusResidual::norm() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

bool LocusResidual::member(double tol) const { return norm() <= tol && sign_ok.value_or(true); }

LocusResidual locus_residual(LocusTag tag, const RegularizedState& rs) {
  const auto& xi = rs.xi;
  const auto& eta = rs.eta;
  switch (tag) {
    case LocusTag::f1_tilde: return {{xi[1], eta[0], eta[2], eta[3]}, std::nullopt};
    case LocusTag::f2_tilde: return {{xi[1], xi[3], eta[0], eta[2]}, std::nullopt};
    case LocusTag::page_w: return {{xi[3]}, eta[3] >= 0.0};
    case LocusTag::binding: return {{xi[3], eta[3]}, std::nullopt};
    case LocusTag::l2: return {{xi[1], xi[3], eta[0], eta[2]}, eta[3] >= 0.0};
  }
  return {};
}

double liouville_eval(const RegularizedState& rs, const Vec8& v, double tangency_tol) {
  Vec4 dxi{v[0], v[1], v[2], v[3]}, deta{v[4], v[5], v[6], v[7]};
  const double c1 = dot4(rs.xi, dxi);
  const double c2 = dot4(dxi, rs.eta) + dot4(rs.xi, deta);
  if (std::abs(c1) > tangency_tol || std::abs(c2) > tangency_tol)
    throw PreconditionError(fmt::format(
        "liouville_eval: tangent violates the constraint linearization ({:.3g}, {:.3g})", c1, c2));
  return -(rs.eta[0] * dxi[0] + rs.eta[1] * dxi[1] + rs.eta[2] * dxi[2]);
}

Vec8 project_tangent(const RegularizedState& rs, const Vec8& v) {
  Eigen::Matrix<double, 2, 8> g = Eigen::Matrix<double, 2, 8>::Zero();
  for (int i = 0; i < 4; ++i) {
    g(0, i) = rs.xi[i];
    g(1, i) = rs.eta[i];
    g(1, 4 + i) = rs.xi[i];
  }
  Eigen::Matrix<double, 8, 1> x = Eigen::Map<const Eigen::Matrix<double, 8, 1>>(v.data());
  const Eigen::Matrix2d ggt = g * g.transpose();
  const Eigen::Matrix<double, 8, 1> p = x - g.transpose() * ggt.ldlt().solve(g * x);
  Vec8 out;
  for (int i = 0; i < 8; ++i) out[i] = p(i);
  return out;
}

PageSignLog page_sign_log() {
  // Probe the half-spaces q3 > 0 and q3 < 0 on {p3 = 0}.
  const PhaseState up{{0.3, -0.2, 0.1}, {0.4, 0.1, 0.0}};
  const PhaseState down{{0.3, -0.2, -0.1}, {0.4, 0.1, 0.0}};
  const double eta_up = to_regularized(up).eta[3];
  const double eta_down = to_regularized(down).eta[3];
  const int sign = (eta_down >= 0.0 && eta_up < 0.0) ? -1 : +1;
  return {sign, fmt::format("p3=0 probes: q3=+0.1 -> eta3={:.17g}, q3=-0.1 -> eta3={:.17g}; "
                            "page eta3>=0 corresponds to q3 {} 0",
                            eta_up, eta_down, sign < 0 ? "<=" : ">=")};
}

}  // namespace trichord
