#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "surfstokes/geometry.hpp"

namespace test_util {

// Pairwise estimated order between the last two entries.
inline double last_pair_order(const std::vector<double>& errors,
                              const std::vector<double>& hs) {
  const size_t n = errors.size();
  return std::log(errors[n - 2] / errors[n - 1]) /
         std::log(hs[n - 2] / hs[n - 1]);
}

// Least-squares slope of log(error) against log(h).
inline double ls_order(const std::vector<double>& errors,
                       const std::vector<double>& hs) {
  const size_t n = errors.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    const double x = std::log(hs[i]);
    const double y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline surfstokes::Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  surfstokes::Vec3 v(gauss(rng), gauss(rng), gauss(rng));
  while (v.norm() < 1e-8) v = {gauss(rng), gauss(rng), gauss(rng)};
  return v.normalized();
}

// Random point on the surface.
inline surfstokes::Vec3 random_surface_point(
    const surfstokes::AnalyticSurface& surface, std::mt19937_64& rng) {
  using surfstokes::SurfaceKind;
  std::uniform_real_distribution<double> uni(0.0, 2.0 * M_PI);
  if (surface.kind() == SurfaceKind::Sphere)
    return surface.radius() * random_unit(rng);
  const double theta = uni(rng);
  const double phi = uni(rng);
  const double a = surface.major_radius() + surface.minor_radius() * std::cos(phi);
  return {a * std::cos(theta), a * std::sin(theta),
          surface.minor_radius() * std::sin(phi)};
}

}  // namespace test_util
