#include "trichord/symmetry.hpp"

#include <algorithm>

namespace trichord {

const char* to_string(InvolutionKind k) {
  switch (k) {
    case InvolutionKind::r: return "r";
    case InvolutionKind::rho1: return "rho1";
    case InvolutionKind::rho2: return "rho2";
  }
  return "?";
}

std::array<int, 6> involution_signs(InvolutionKind kind) {
  switch (kind) {
    case InvolutionKind::r: return {1, 1, -1, 1, 1, -1};
    case InvolutionKind::rho1: return {1, -1, -1, -1, 1, 1};
    case InvolutionKind::rho2: return {1, -1, 1, -1, 1, -1};
  }
  return {1, 1, 1, 1, 1, 1};
}

PhaseState apply_involution(InvolutionKind kind, const PhaseState& s) {
  const auto sg = involution_signs(kind);
  Vec6 v = s.flat();
  for (int i = 0; i < 6; ++i)
    if (sg[i] < 0) v[i] = -v[i];
  return PhaseState::from_flat(v);
}

IntMat6 involution_matrix(InvolutionKind kind) {
  const auto sg = involution_signs(kind);
  IntMat6 m = IntMat6::Zero();
  for (int i = 0; i < 6; ++i) m(i, i) = sg[i];
  return m;
}

IntMat6 symplectic_j_int() {
  IntMat6 j = IntMat6::Zero();
  for (int i = 0; i < 3; ++i) {
    j(i, 3 + i) = 1;
    j(3 + i, i) = -1;
  }
  return j;
}

std::vector<int> fixed_residual_indices(InvolutionKind kind) {
  switch (kind) {
    case InvolutionKind::r: return {2, 5};
    case InvolutionKind::rho1: return {1, 2, 3};
    case InvolutionKind::rho2: return {1, 3, 5};
  }
  return {};
}

std::vector<double> fixed_residual(InvolutionKind kind, const PhaseState& s) {
  const Vec6 v = s.flat();
  std::vector<double> out;
  for (int i : fixed_residual_indices(kind)) out.push_back(v[i]);
  return out;
}

PhaseState project_to_fixed(InvolutionKind kind, const PhaseState& s) {
  Vec6 v = s.flat();
  for (int i : fixed_residual_indices(kind)) v[i] = 0.0;
  return PhaseState::from_flat(v);
}

Trajectory symmetric_extension(const Trajectory& traj, InvolutionKind kind) {
  if (kind == InvolutionKind::r)
    throw PreconditionError("symmetric_extension: r is symplectic and does not reverse time");
  if (traj.times.empty()) throw PreconditionError("symmetric_extension: empty trajectory");
  Trajectory out = traj;
  const double t_first = traj.times.front(), t_last = traj.times.back();
  const std::size_t n = traj.times.size();
  // x(t) on [a, b] becomes y(s) = kind(x(b - (s - a))) on [a, b].
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = n - 1 - i;
    out.times[i] = t_first + (t_last - traj.times[k]);
    out.states[i] = apply_involution(kind, traj.states[k]);
  }
  out.final_time = t_last;
  out.final_state = out.states.back();
  return out;
}

}  // namespace trichord
