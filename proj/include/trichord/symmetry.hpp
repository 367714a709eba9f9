#pragma once

#include <array>
#include <span>
#include <vector>

#include "trichord/integrate.hpp"

namespace trichord {

/// r reflects in the ecliptic (symplectic); rho1 and rho2 are the
/// anti-symplectic reversors whose fixed loci carry the chord endpoints.
enum class InvolutionKind { r, rho1, rho2 };

const char* to_string(InvolutionKind k);

/// Diagonal signs over (q1, q2, q3, p1, p2, p3).
std::array<int, 6> involution_signs(InvolutionKind kind);

PhaseState apply_involution(InvolutionKind kind, const PhaseState& s);

/// Integer 6x6 signed diagonal matrix.
using IntMat6 = Eigen::Matrix<int, 6, 6>;
IntMat6 involution_matrix(InvolutionKind kind);
IntMat6 symplectic_j_int();

/// Coordinates that vanish on Fix(kind), in a fixed order:
/// r -> (q3, p3); rho1 -> (q2, q3, p1); rho2 -> (q2, p1, p3).
std::vector<double> fixed_residual(InvolutionKind kind, const PhaseState& s);
std::vector<int> fixed_residual_indices(InvolutionKind kind);

/// Projection onto Fix(kind): zero the residual coordinates.
PhaseState project_to_fixed(InvolutionKind kind, const PhaseState& s);

/// t -> kind(x(T - t)) re-indexed over [0, T]. Throws PreconditionError for r.
Trajectory symmetric_extension(const Trajectory& traj, InvolutionKind kind);

}  // namespace trichord
