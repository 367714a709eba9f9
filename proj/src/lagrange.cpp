#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/tools/roots.hpp>

#include "trichord/dynamics.hpp"

namespace trichord {

namespace {

// dU_eff/dq1 along the Earth-Moon axis, and its derivative.
double axis_slope(double x, double mu) {
  const double d1 = x + mu, d2 = x - 1.0 + mu;
  return -x + (1.0 - mu) * d1 / std::pow(std::abs(d1), 3) + mu * d2 / std::pow(std::abs(d2), 3);
}

double axis_curvature(double x, double mu) {
  const double d1 = std::abs(x + mu), d2 = std::abs(x - 1.0 + mu);
  return -1.0 - 2.0 * (1.0 - mu) / (d1 * d1 * d1) - 2.0 * mu / (d2 * d2 * d2);
}

double collinear_root(double lo, double hi, double mu) {
  auto f = [mu](double x) { return axis_slope(x, mu); };
  const double flo = f(lo), fhi = f(hi);
  if (!(flo * fhi < 0.0)) throw Error("lagrange_points: collinear bracket has no sign change");
  std::uintmax_t max_iter = 200;
  auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi,
                                                  boost::math::tools::eps_tolerance<double>(52),
                                                  max_iter);
  double x = 0.5 * (a + b);
  // The slope is strictly decreasing on each interval, so Newton from inside
  // the final bracket only polishes the last bits.
  for (int i = 0; i < 3; ++i) {
    const double step = axis_slope(x, mu) / axis_curvature(x, mu);
    if (!std::isfinite(step) || std::abs(step) > (b - a) + 1e-15) break;
    x -= step;
  }
  return x;
}

}  // namespace

EquilibriumSet lagrange_points(const SystemParams& params) {
  const double mu = params.mu();
  if (!(mu > 0.0 && mu < 1.0)) throw PreconditionError("lagrange_points requires mu in (0, 1)");
  const double eps = 1e-9;
  // Between primaries, beyond the Moon, beyond the Earth.
  std::array<double, 3> xs = {
      collinear_root(-mu + eps, 1.0 - mu - eps, mu),
      collinear_root(1.0 - mu + eps, 3.0, mu),
      collinear_root(-3.0, -mu - eps, mu),
  };
  std::array<double, 3> energy{};
  for (int i = 0; i < 3; ++i) energy[i] = effective_potential({xs[i], 0.0, 0.0}, params);
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return energy[a] < energy[b]; });

  EquilibriumSet out;
  for (int k = 0; k < 3; ++k) {
    out.points[k] = {xs[order[k]], 0.0, 0.0};
    out.energies[k] = energy[order[k]];
  }
  const double s3 = std::sqrt(3.0) / 2.0;
  out.points[3] = {0.5 - mu, s3, 0.0};
  out.points[4] = {0.5 - mu, -s3, 0.0};
  out.energies[3] = effective_potential(out.points[3], params);
  out.energies[4] = effective_potential(out.points[4], params);
  return out;
}

}  // namespace trichord
