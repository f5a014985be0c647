#pragma once

#include <functional>
#include <string>

#include "surfstokes/geometry.hpp"

namespace surfstokes {

/// Manufactured exact solution of the surface Stokes system
///   -P div_G(E(u)) + u + grad_G p = f,   div_G u = g   on the surface,
/// with tangential u and zero-mean p, g. All evaluators take points on the
/// exact surface; extension helpers evaluate the constant-normal extensions
/// anywhere in the tubular neighborhood.
struct ManufacturedCase {
  explicit ManufacturedCase(const AnalyticSurface& s) : surface(s) {}

  AnalyticSurface surface;
  std::string name;

  std::function<Vec3(const Vec3&)> velocity;           // u (tangential)
  std::function<Mat3(const Vec3&)> velocity_jacobian;  // ambient d u_i / d x_c
  std::function<double(const Vec3&)> pressure;
  std::function<Vec3(const Vec3&)> pressure_surface_gradient;
  std::function<Vec3(const Vec3&)> forcing;  // f (tangential)
  std::function<double(const Vec3&)> source;  // g (zero mean)

  Vec3 velocity_extension(const Vec3& x) const {
    return velocity(closest_point(surface, x));
  }
  /// Ambient gradient of the extension u(pi(x)): jac(u)(pi(x)) (P - d H)(x).
  Mat3 velocity_extension_gradient(const Vec3& x) const {
    const GeometricData g = geometric_data(surface, x);
    return velocity_jacobian(g.pi_x) * (g.P - g.d * g.H);
  }
  double pressure_extension(const Vec3& x) const {
    return pressure(closest_point(surface, x));
  }
};

/// Rotation field u = e3 x x on a sphere (a Killing field: E(u) = 0,
/// div_G u = 0) with pressure p = x1 x2 x3; f = u + grad_G p, g = 0.
ManufacturedCase killing_case(const AnalyticSurface& surface);

/// Tangentially projected ambient polynomial w = (x2 x3, -x1 x3, x1^2 - x2^2)
/// with pressure p = x1 x2 x3; f and g from the exact surface operators.
ManufacturedCase polynomial_case(const AnalyticSurface& surface);

ManufacturedCase make_case(const AnalyticSurface& surface,
                           const std::string& name);

}  // namespace surfstokes
