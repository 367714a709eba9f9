#pragma once

#include <array>

#include "trichord/types.hpp"

namespace trichord {

/// Conventional Earth-Moon mass ratio, used as a configuration default.
inline constexpr double kEarthMoonMu = 0.0121505856;

/// Barycentric rotating frame with unit separation and unit angular rate.
/// Earth sits at (-mu, 0, 0) with mass 1 - mu, Moon at (1 - mu, 0, 0) with mass mu.
class SystemParams {
 public:
  explicit SystemParams(double mu = kEarthMoonMu, double collision_guard = 1e-3);

  double mu() const { return mu_; }
  double collision_guard() const { return guard_; }
  double earth_mass() const { return 1.0 - mu_; }
  double moon_mass() const { return mu_; }
  Vec3 earth_pos() const { return {-mu_, 0.0, 0.0}; }
  Vec3 moon_pos() const { return {1.0 - mu_, 0.0, 0.0}; }

  /// Throws GuardViolation if q is within the guard of a primary with
  /// positive mass. A massless primary (mu = 0) is not guarded.
  void check_guard(const Vec3& q) const;
  /// Same test without throwing.
  bool guard_ok(const Vec3& q) const;

 private:
  double mu_;
  double guard_;
};

/// U_eff(q) = -(q1^2 + q2^2)/2 - (1-mu)/|q-E| - mu/|q-M|.
double effective_potential(const Vec3& q, const SystemParams& params);
Vec3 effective_potential_gradient(const Vec3& q, const SystemParams& params);

double hamiltonian(const PhaseState& s, const SystemParams& params);
/// c = -2H.
double jacobi_constant(const PhaseState& s, const SystemParams& params);

/// qdot = (p1 - q2, p2 + q1, p3).
Vec3 velocity_from_momentum(const PhaseState& s);
/// Inverse of velocity_from_momentum: p = (qdot1 + q2, qdot2 - q1, qdot3).
Vec3 momentum_from_velocity(const Vec3& qdot, const Vec3& q);

/// Hamilton's equations (dH/dp, -dH/dq).
Vec6 vector_field(const PhaseState& s, const SystemParams& params);

/// Jacobian of vector_field; equals J * Hess(H).
Mat6 variational_matrix(const PhaseState& s, const SystemParams& params);

/// Unchecked kernels used by the integrator (no guard test).
namespace kernel {
void field(const double* y, double* dy, double mu);
/// Field plus the variational equations dPhi/dt = A Phi, Phi stored row-major after the state.
void field_with_stm(const double* y, double* dy, double mu);
}  // namespace kernel

struct EquilibriumSet {
  std::array<Vec3, 5> points;
  std::array<double, 5> energies;
};

/// The five equilibria, labelled by increasing energy.
EquilibriumSet lagrange_points(const SystemParams& params);

/// Momenta of a point at rest in the rotating frame: p = (q2, -q1, 0), so that
/// qdot = 0 and H = U_eff.
PhaseState at_rest(const Vec3& q);

enum class HillLabel { forbidden, earth_component, moon_component, exterior };

const char* to_string(HillLabel label);

/// Planar flood-fill grid covering [-half_width, half_width]^2.
struct HillGridSpec {
  double step = 1e-3;
  double half_width = 2.0;
};

/// Classifies a position at energy h. Components are labelled by flood fill
/// over a cached planar grid of the allowed region (the region is convex in
/// the q3 direction, so every component meets the plane q3 = 0).
/// Flood order is exterior, earth, moon: merged components take the first label.
HillLabel hill_classification(const Vec3& pos, double h, const SystemParams& params,
                              const HillGridSpec& grid = {});

/// Bounding box (q1 range, q2 range, q3 half-height) of a labelled component.
struct ComponentBounds {
  double q1_min, q1_max;
  double q2_min, q2_max;
  double q3_max;
  bool empty;
};
ComponentBounds component_bounds(HillLabel label, double h, const SystemParams& params,
                                 const HillGridSpec& grid = {});

}  // namespace trichord
