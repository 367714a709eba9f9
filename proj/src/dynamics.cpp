#include "trichord/dynamics.hpp"

#include <cmath>

namespace trichord {

SystemParams::SystemParams(double mu, double collision_guard) : mu_(mu), guard_(collision_guard) {
  if (!(mu >= 0.0 && mu < 1.0)) throw ConfigError("mu", "must lie in [0, 1)");
  if (!(collision_guard > 0.0)) throw ConfigError("collision_guard", "must be positive");
}

bool SystemParams::guard_ok(const Vec3& q) const {
  if (earth_mass() > 0.0 && norm(sub(q, earth_pos())) < guard_) return false;
  if (moon_mass() > 0.0 && norm(sub(q, moon_pos())) < guard_) return false;
  return true;
}

void SystemParams::check_guard(const Vec3& q) const {
  const double de = norm(sub(q, earth_pos()));
  if (earth_mass() > 0.0 && de < guard_) throw GuardViolation(Primary::earth, de);
  const double dm = norm(sub(q, moon_pos()));
  if (moon_mass() > 0.0 && dm < guard_) throw GuardViolation(Primary::moon, dm);
}

namespace {

// Gravitational potential V = -m_E/r1 - m_M/r2 and its derivatives. The
// massless primary of the mu = 0 limit contributes nothing.
double gravity_potential(const double* q, double mu) {
  const double x1 = q[0] + mu, x2 = q[0] - 1.0 + mu;
  const double r1 = std::sqrt(x1 * x1 + q[1] * q[1] + q[2] * q[2]);
  double v = -(1.0 - mu) / r1;
  if (mu > 0.0) v -= mu / std::sqrt(x2 * x2 + q[1] * q[1] + q[2] * q[2]);
  return v;
}

void gravity_gradient(const double* q, double mu, double* g) {
  const double x1 = q[0] + mu, x2 = q[0] - 1.0 + mu;
  const double yz = q[1] * q[1] + q[2] * q[2];
  const double r1sq = x1 * x1 + yz;
  const double a = (1.0 - mu) / (r1sq * std::sqrt(r1sq));
  g[0] = a * x1;
  g[1] = a * q[1];
  g[2] = a * q[2];
  if (mu > 0.0) {
    const double r2sq = x2 * x2 + yz;
    const double b = mu / (r2sq * std::sqrt(r2sq));
    g[0] += b * x2;
    g[1] += b * q[1];
    g[2] += b * q[2];
  }
}

// Symmetric Hessian of V, row-major 3x3.
void gravity_hessian(const double* q, double mu, double* hv) {
  const double d1[3] = {q[0] + mu, q[1], q[2]};
  const double r1sq = d1[0] * d1[0] + d1[1] * d1[1] + d1[2] * d1[2];
  const double r1 = std::sqrt(r1sq);
  const double a3 = (1.0 - mu) / (r1sq * r1);
  const double a5 = 3.0 * a3 / r1sq;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) hv[3 * i + j] = (i == j ? a3 : 0.0) - a5 * d1[i] * d1[j];
  if (mu > 0.0) {
    const double d2[3] = {q[0] - 1.0 + mu, q[1], q[2]};
    const double r2sq = d2[0] * d2[0] + d2[1] * d2[1] + d2[2] * d2[2];
    const double r2 = std::sqrt(r2sq);
    const double b3 = mu / (r2sq * r2);
    const double b5 = 3.0 * b3 / r2sq;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) hv[3 * i + j] += (i == j ? b3 : 0.0) - b5 * d2[i] * d2[j];
  }
}

}  // namespace

double effective_potential(const Vec3& q, const SystemParams& params) {
  return -0.5 * (q[0] * q[0] + q[1] * q[1]) + gravity_potential(q.data(), params.mu());
}

Vec3 effective_potential_gradient(const Vec3& q, const SystemParams& params) {
  Vec3 g;
  gravity_gradient(q.data(), params.mu(), g.data());
  g[0] -= q[0];
  g[1] -= q[1];
  return g;
}

double hamiltonian(const PhaseState& s, const SystemParams& params) {
  params.check_guard(s.q);
  const auto& q = s.q;
  const auto& p = s.p;
  return 0.5 * dot(p, p) + gravity_potential(q.data(), params.mu()) + q[0] * p[1] - q[1] * p[0];
}

double jacobi_constant(const PhaseState& s, const SystemParams& params) {
  return -2.0 * hamiltonian(s, params);
}

Vec3 velocity_from_momentum(const PhaseState& s) {
  return {s.p[0] - s.q[1], s.p[1] + s.q[0], s.p[2]};
}

Vec3 momentum_from_velocity(const Vec3& qdot, const Vec3& q) {
  return {qdot[0] + q[1], qdot[1] - q[0], qdot[2]};
}

namespace kernel {

void field(const double* y, double* dy, double mu) {
  double g[3];
  gravity_gradient(y, mu, g);
  dy[0] = y[3] - y[1];
  dy[1] = y[4] + y[0];
  dy[2] = y[5];
  dy[3] = -g[0] - y[4];
  dy[4] = -g[1] + y[3];
  dy[5] = -g[2];
}

void field_with_stm(const double* y, double* dy, double mu) {
  field(y, dy, mu);
  double hv[9];
  gravity_hessian(y, mu, hv);
  const double* phi = y + 6;
  double* dphi = dy + 6;
  for (int j = 0; j < 6; ++j) {
    const double p0 = phi[j], p1 = phi[6 + j], p2 = phi[12 + j];
    const double p3 = phi[18 + j], p4 = phi[24 + j], p5 = phi[30 + j];
    dphi[j] = p3 - p1;
    dphi[6 + j] = p4 + p0;
    dphi[12 + j] = p5;
    dphi[18 + j] = -(hv[0] * p0 + hv[1] * p1 + hv[2] * p2) - p4;
    dphi[24 + j] = -(hv[3] * p0 + hv[4] * p1 + hv[5] * p2) + p3;
    dphi[30 + j] = -(hv[6] * p0 + hv[7] * p1 + hv[8] * p2);
  }
}

}  // namespace kernel

Vec6 vector_field(const PhaseState& s, const SystemParams& params) {
  params.check_guard(s.q);
  const Vec6 y = s.flat();
  Vec6 dy;
  kernel::field(y.data(), dy.data(), params.mu());
  return dy;
}

Mat6 variational_matrix(const PhaseState& s, const SystemParams& params) {
  params.check_guard(s.q);
  double hv[9];
  gravity_hessian(s.q.data(), params.mu(), hv);
  Mat6 a = Mat6::Zero();
  // dqdot/dq and dpdot/dp share the rotation block [[0,-1,0],[1,0,0],[0,0,0]].
  a(0, 1) = -1.0;
  a(1, 0) = 1.0;
  a(3, 4) = -1.0;
  a(4, 3) = 1.0;
  a.block<3, 3>(0, 3) = Eigen::Matrix3d::Identity();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(3 + i, j) = -hv[3 * i + j];
  return a;
}

PhaseState at_rest(const Vec3& q) { return {q, momentum_from_velocity({0.0, 0.0, 0.0}, q)}; }

const char* to_string(HillLabel label) {
  switch (label) {
    case HillLabel::forbidden: return "forbidden";
    case HillLabel::earth_component: return "earth";
    case HillLabel::moon_component: return "moon";
    case HillLabel::exterior: return "exterior";
  }
  return "?";
}

}  // namespace trichord
