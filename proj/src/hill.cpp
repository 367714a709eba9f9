#include <algorithm>
#include <cmath>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <vector>

#include "trichord/dynamics.hpp"

namespace trichord {

namespace {

struct HillGrid {
  double mu, h, step, half_width;
  int n;  // nodes per axis
  std::vector<std::uint8_t> label;

  double coord(int i) const { return -half_width + i * step; }
  HillLabel at(int i, int j) const { return static_cast<HillLabel>(label[std::size_t(i) * n + j]); }
};

// Allowed-region mask over the planar grid. Each row is independent.
void fill_mask(HillGrid& g, const SystemParams& params) {
  const int n = g.n;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Vec3 q{g.coord(i), g.coord(j), 0.0};
      const double u = effective_potential(q, params);
      // 0xff marks allowed but not yet reached.
      g.label[std::size_t(i) * n + j] =
          (u <= g.h) ? 0xff : static_cast<std::uint8_t>(HillLabel::forbidden);
    }
  }
}

void flood(HillGrid& g, int i0, int j0, HillLabel label) {
  const int n = g.n;
  auto idx = [n](int i, int j) { return std::size_t(i) * n + j; };
  if (i0 < 0 || j0 < 0 || i0 >= n || j0 >= n || g.label[idx(i0, j0)] != 0xff) return;
  const auto tag = static_cast<std::uint8_t>(label);
  std::vector<std::int32_t> stack;
  stack.reserve(1 << 16);
  g.label[idx(i0, j0)] = tag;
  stack.push_back(static_cast<std::int32_t>(idx(i0, j0)));
  while (!stack.empty()) {
    const auto k = static_cast<std::size_t>(stack.back());
    stack.pop_back();
    const int i = int(k / n), j = int(k % n);
    const int ni[4] = {i - 1, i + 1, i, i};
    const int nj[4] = {j, j, j - 1, j + 1};
    for (int m = 0; m < 4; ++m) {
      if (ni[m] < 0 || nj[m] < 0 || ni[m] >= n || nj[m] >= n) continue;
      const auto kk = idx(ni[m], nj[m]);
      if (g.label[kk] != 0xff) continue;
      g.label[kk] = tag;
      stack.push_back(static_cast<std::int32_t>(kk));
    }
  }
}

std::shared_ptr<const HillGrid> build_grid(double h, const SystemParams& params,
                                           const HillGridSpec& spec) {
  auto g = std::make_shared<HillGrid>();
  g->mu = params.mu();
  g->h = h;
  g->step = spec.step;
  g->half_width = spec.half_width;
  g->n = static_cast<int>(std::lround(2.0 * spec.half_width / spec.step)) + 1;
  g->label.assign(std::size_t(g->n) * g->n, 0);
  fill_mask(*g, params);

  auto nearest = [&](double x) {
    return std::clamp(static_cast<int>(std::lround((x + spec.half_width) / spec.step)), 0, g->n - 1);
  };
  flood(*g, 0, 0, HillLabel::exterior);
  if (params.earth_mass() > 0.0) flood(*g, nearest(-params.mu()), nearest(0.0), HillLabel::earth_component);
  if (params.moon_mass() > 0.0) flood(*g, nearest(1.0 - params.mu()), nearest(0.0), HillLabel::moon_component);
  // Unreached allowed pockets (none are expected for this potential).
  for (auto& v : g->label)
    if (v == 0xff) v = static_cast<std::uint8_t>(HillLabel::exterior);
  return g;
}

std::shared_ptr<const HillGrid> cached_grid(double h, const SystemParams& params,
                                            const HillGridSpec& spec) {
  static std::mutex mutex;
  static std::list<std::shared_ptr<const HillGrid>> cache;
  constexpr std::size_t kCapacity = 4;
  {
    std::lock_guard lock(mutex);
    for (auto it = cache.begin(); it != cache.end(); ++it) {
      const auto& g = **it;
      if (g.mu == params.mu() && g.h == h && g.step == spec.step && g.half_width == spec.half_width) {
        auto hit = *it;
        cache.splice(cache.begin(), cache, it);
        return hit;
      }
    }
  }
  auto g = build_grid(h, params, spec);
  std::lock_guard lock(mutex);
  cache.push_front(g);
  if (cache.size() > kCapacity) cache.pop_back();
  return g;
}

}  // namespace

HillLabel hill_classification(const Vec3& pos, double h, const SystemParams& params,
                              const HillGridSpec& spec) {
  if (effective_potential(pos, params) > h) return HillLabel::forbidden;
  if (std::abs(pos[0]) > spec.half_width || std::abs(pos[1]) > spec.half_width)
    return HillLabel::exterior;
  const auto g = cached_grid(h, params, spec);
  const int i0 = static_cast<int>(std::lround((pos[0] + spec.half_width) / spec.step));
  const int j0 = static_cast<int>(std::lround((pos[1] + spec.half_width) / spec.step));
  // The nearest node may sit just across the zero-velocity surface; search
  // outward for the closest allowed node.
  for (int r = 0; r <= 4; ++r) {
    for (int di = -r; di <= r; ++di) {
      for (int dj = -r; dj <= r; ++dj) {
        if (std::max(std::abs(di), std::abs(dj)) != r) continue;
        const int i = i0 + di, j = j0 + dj;
        if (i < 0 || j < 0 || i >= g->n || j >= g->n) continue;
        const HillLabel l = g->at(i, j);
        if (l != HillLabel::forbidden) return l;
      }
    }
  }
  return HillLabel::exterior;
}

ComponentBounds component_bounds(HillLabel label, double h, const SystemParams& params,
                                 const HillGridSpec& spec) {
  ComponentBounds b{1e300, -1e300, 1e300, -1e300, 0.0, true};
  if (label == HillLabel::forbidden) return b;
  const auto g = cached_grid(h, params, spec);
  for (int i = 0; i < g->n; ++i) {
    for (int j = 0; j < g->n; ++j) {
      if (g->at(i, j) != label) continue;
      const double x = g->coord(i), y = g->coord(j);
      b.empty = false;
      b.q1_min = std::min(b.q1_min, x);
      b.q1_max = std::max(b.q1_max, x);
      b.q2_min = std::min(b.q2_min, y);
      b.q2_max = std::max(b.q2_max, y);
      if (i % 4 || j % 4) continue;
      // U_eff increases with |q3|, so the vertical extent is a single root.
      if (effective_potential({x, y, spec.half_width}, params) <= h) {
        b.q3_max = spec.half_width;
        continue;
      }
      double lo = 0.0, hi = spec.half_width;
      for (int k = 0; k < 50; ++k) {
        const double mid = 0.5 * (lo + hi);
        (effective_potential({x, y, mid}, params) <= h ? lo : hi) = mid;
      }
      b.q3_max = std::max(b.q3_max, lo);
    }
  }
  if (!b.empty) {
    b.q1_min -= spec.step;
    b.q1_max += spec.step;
    b.q2_min -= spec.step;
    b.q2_max += spec.step;
    b.q3_max = std::min(b.q3_max + 4 * spec.step, spec.half_width);
  }
  return b;
}

}  // namespace trichord
