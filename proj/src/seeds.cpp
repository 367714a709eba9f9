#include <cmath>

#include <fmt/format.h>

#include "trichord/chords.hpp"

namespace trichord {

const char* to_string(ChordTarget t) { return t == ChordTarget::xz_plane ? "xz_plane" : "x_axis"; }

ChordTarget parse_target(const std::string& s) {
  if (s == "xz_plane" || s == "xz-plane" || s == "xz") return ChordTarget::xz_plane;
  if (s == "x_axis" || s == "x-axis" || s == "x") return ChordTarget::x_axis;
  throw ConfigError("target", "expected xz-plane or x-axis, got '" + s + "'");
}

InvolutionKind involution_of(ChordTarget t) {
  return t == ChordTarget::xz_plane ? InvolutionKind::rho2 : InvolutionKind::rho1;
}

std::array<double, 3> target_residual(ChordTarget t, const PhaseState& s) {
  if (t == ChordTarget::xz_plane) return {s.q[1], s.p[0], s.p[2]};
  return {s.q[1], s.q[2], s.p[0]};
}

namespace {
Vec3 chart_position(ChordTarget target, const Chart& c) {
  return target == ChordTarget::xz_plane ? Vec3{c[0], 0.0, c[1]} : Vec3{c[0], 0.0, 0.0};
}
}  // namespace

std::optional<PhaseState> seed_state(ChordTarget target, const Chart& chart, double h, int branch,
                                     const SystemParams& params) {
  const Vec3 q = chart_position(target, chart);
  if (!params.guard_ok(q)) return std::nullopt;
  const double kinetic2 = 2.0 * (h - effective_potential(q, params));
  if (!(kinetic2 >= 0.0)) return std::nullopt;
  const double v = std::sqrt(kinetic2);
  Vec3 qdot;
  if (target == ChordTarget::xz_plane) {
    qdot = {0.0, branch >= 0 ? v : -v, 0.0};
  } else {
    qdot = {0.0, v * std::cos(chart[1]), v * std::sin(chart[1])};
  }
  return PhaseState{q, momentum_from_velocity(qdot, q)};
}

Eigen::Matrix<double, 6, 2> seed_jacobian(ChordTarget target, const Chart& chart, double h, int branch,
                                          const SystemParams& params) {
  const Vec3 q = chart_position(target, chart);
  const Vec3 grad = effective_potential_gradient(q, params);
  const double v = std::sqrt(std::max(0.0, 2.0 * (h - effective_potential(q, params))));
  Eigen::Matrix<double, 6, 2> j = Eigen::Matrix<double, 6, 2>::Zero();
  if (target == ChordTarget::xz_plane) {
    // p2 = qdot2 - q1 with qdot2 = branch * v, and dv = -dU / v.
    const double qd2 = branch >= 0 ? v : -v;
    j(0, 0) = 1.0;
    j(4, 0) = -grad[0] / qd2 - 1.0;
    j(2, 1) = 1.0;
    j(4, 1) = -grad[2] / qd2;
  } else {
    const double c = std::cos(chart[1]), s = std::sin(chart[1]);
    const double dv = -grad[0] / v;
    j(0, 0) = 1.0;
    j(4, 0) = dv * c - 1.0;
    j(5, 0) = dv * s;
    j(4, 1) = -v * s;
    j(5, 1) = v * c;
  }
  return j;
}

std::pair<Chart, int> chart_of(ChordTarget target, const PhaseState& s) {
  const Vec3 qdot = velocity_from_momentum(s);
  if (target == ChordTarget::xz_plane) return {{s.q[0], s.q[2]}, qdot[1] >= 0.0 ? 1 : -1};
  return {{s.q[0], std::atan2(qdot[2], qdot[1])}, 1};
}

std::string SeedGridResult::summary() const {
  return fmt::format("nodes={} seeds={} forbidden={} other_component={} guarded={}", nodes, seeds.size(),
                     forbidden, other_component, guarded);
}

SeedGridResult seed_grid(const SystemParams& params, double h, ChordTarget target,
                         const SeedGridSpec& spec) {
  if (spec.n < 1) throw ConfigError("grid.n", "must be at least 1");
  SeedGridResult out;
  auto node = [&](const GridRange& r, int i) {
    return spec.n == 1 ? r.lo : r.lo + (r.hi - r.lo) * double(i) / double(spec.n - 1);
  };
  for (int i = 0; i < spec.n; ++i) {
    const double a = node(spec.ranges[0], i);
    for (int j = 0; j < spec.n; ++j) {
      ++out.nodes;
      const Chart chart{a, node(spec.ranges[1], j)};
      const Vec3 q = chart_position(target, chart);
      if (!params.guard_ok(q)) {
        ++out.guarded;
        continue;
      }
      const double gap = h - effective_potential(q, params);
      if (!(gap > 0.0)) {
        ++out.forbidden;
        continue;
      }
      if (hill_classification(q, h, params) != spec.component) {
        ++out.other_component;
        continue;
      }
      const int branches = target == ChordTarget::xz_plane ? 2 : 1;
      for (int b = 0; b < branches; ++b) {
        const int branch = b == 0 ? 1 : -1;
        Seed s;
        s.state = *seed_state(target, chart, h, branch, params);
        s.chart = chart;
        s.grid_index = {i, j};
        s.h = h;
        s.branch = branch;
        out.seeds.push_back(s);
      }
    }
  }
  return out;
}

}  // namespace trichord
