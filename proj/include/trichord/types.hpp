#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace trichord {

using Vec3 = std::array<double, 3>;
using Vec6 = std::array<double, 6>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Rotating-frame position and conjugate momentum.
struct PhaseState {
  Vec3 q{};
  Vec3 p{};

  Vec6 flat() const { return {q[0], q[1], q[2], p[0], p[1], p[2]}; }
  static PhaseState from_flat(const Vec6& v) {
    return {{v[0], v[1], v[2]}, {v[3], v[4], v[5]}};
  }
  bool finite() const {
    for (double x : flat())
      if (!std::isfinite(x)) return false;
    return true;
  }
  friend bool operator==(const PhaseState&, const PhaseState&) = default;
};

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

inline double max_abs_diff(const PhaseState& a, const PhaseState& b) {
  double m = 0.0;
  const Vec6 x = a.flat(), y = b.flat();
  for (int i = 0; i < 6; ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

/// Canonical symplectic matrix J = [[0, I], [-I, 0]] in (q, p) ordering.
inline Mat6 symplectic_j() {
  Mat6 j = Mat6::Zero();
  j.block<3, 3>(0, 3) = Eigen::Matrix3d::Identity();
  j.block<3, 3>(3, 0) = -Eigen::Matrix3d::Identity();
  return j;
}

// Error hierarchy. Everything derives from std::runtime_error so callers that
// don't care about the category can catch one type.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Primary { earth, moon };

inline const char* to_string(Primary p) { return p == Primary::earth ? "earth" : "moon"; }

/// A state closer to a primary than the collision guard.
class GuardViolation : public Error {
 public:
  GuardViolation(Primary which, double distance)
      : Error(std::string("collision guard violated near ") + to_string(which) +
              " (distance " + std::to_string(distance) + ")"),
        primary(which),
        distance(distance) {}
  Primary primary;
  double distance;
};

/// Point outside the domain of the stereographic chart (the North Pole).
class ChartDomainError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field(std::move(field)) {}
  std::string field;
};

}  // namespace trichord
