#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "trichord/types.hpp"

namespace trichord {

using Vec4 = std::array<double, 4>;
using Vec8 = std::array<double, 8>;

/// Point of T*S^3 embedded in T*R^4: |xi| = 1, <xi, eta> = 0.
struct RegularizedState {
  Vec4 xi{};
  Vec4 eta{};

  /// |(|xi|^2 - 1)| and |<xi, eta>|.
  std::pair<double, double> constraint_residuals() const;
  bool on_manifold(double tol = 1e-10) const;
};

/// Switch map (q, p) -> (x, y) = (p, -q) followed by inverse stereographic
/// projection from the North Pole N = (1, 0, 0, 0).
RegularizedState to_regularized(const PhaseState& s);

/// Inverse chart. Throws ChartDomainError when xi0 is within 1e-12 of the pole,
/// PreconditionError when the input is off the constraint set.
PhaseState from_regularized(const RegularizedState& rs);

enum class LocusTag { f1_tilde, f2_tilde, page_w, binding, l2 };

const char* to_string(LocusTag tag);

struct LocusResidual {
  std::vector<double> values;   // coordinates that must vanish
  std::optional<bool> sign_ok;  // eta3 >= 0 where the locus carries it
  double norm() const;
  bool member(double tol) const;
};

/// f1_tilde: (xi1, eta0, eta2, eta3); f2_tilde: (xi1, xi3, eta0, eta2);
/// page_w: (xi3) + eta3 >= 0; binding: (xi3, eta3); l2: f2_tilde + eta3 >= 0.
/// The energy constraint of the regularized level set is not part of any test.
LocusResidual locus_residual(LocusTag tag, const RegularizedState& rs);

/// lambda = -(eta0 dxi0 + eta1 dxi1 + eta2 dxi2) evaluated on a tangent
/// (dxi, deta). Throws PreconditionError unless the tangent satisfies the
/// linearized constraints to `tangency_tol`.
double liouville_eval(const RegularizedState& rs, const Vec8& tangent, double tangency_tol = 1e-8);

/// Orthogonal projection of an 8-vector onto the constraint tangent space.
Vec8 project_tangent(const RegularizedState& rs, const Vec8& v);

/// Sign of q3 whose half-space {p3 = 0} maps into eta3 >= 0, determined by
/// pushing probe states through the chart.
struct PageSignLog {
  int q3_sign;              // -1 or +1
  std::string description;  // human-readable record of the probe
};
PageSignLog page_sign_log();

}  // namespace trichord
