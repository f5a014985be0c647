#pragma once

#include <cmath>
#include <vector>

#include "surfstokes/mms.hpp"

// Finite-difference oracles for the manufactured-solution machinery. These
// never touch the closed-form derivative code they are checking: everything
// is built from point evaluations and the closest-point map.
namespace fd_oracles {

using surfstokes::AnalyticSurface;
using surfstokes::ManufacturedCase;
using surfstokes::Mat3;
using surfstokes::Vec3;

inline void tangent_basis(const Vec3& n, Vec3& t1, Vec3& t2) {
  int axis = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(n[i]) < std::abs(n[axis])) axis = i;
  Vec3 e = Vec3::Zero();
  e[axis] = 1.0;
  t1 = n.cross(e).normalized();
  t2 = n.cross(t1);
}

// Richardson-extrapolated derivative of a vector field along a surface curve
// through x in direction t.
template <typename F>
Vec3 surface_derivative(const AnalyticSurface& s, const F& field,
                        const Vec3& x, const Vec3& t, double h = 1e-4) {
  auto diff = [&](double step) -> Vec3 {
    return (field(closest_point(s, x + step * t)) -
            field(closest_point(s, x - step * t))) /
           (2.0 * step);
  };
  return (4.0 * diff(h / 2) - diff(h)) / 3.0;
}

// Surface divergence: trace of the tangential directional derivatives.
template <typename F>
double fd_surface_divergence(const AnalyticSurface& s, const F& field,
                             const Vec3& x) {
  const Vec3 n = exact_normal_extension(s, x);
  Vec3 t1, t2;
  tangent_basis(n, t1, t2);
  return t1.dot(surface_derivative(s, field, x, t1)) +
         t2.dot(surface_derivative(s, field, x, t2));
}

// Covariant strain E(u) = 1/2 P (grad u^e + grad u^e^T) P by central
// differences of the constant-normal extension.
inline Mat3 fd_strain(const AnalyticSurface& s, const ManufacturedCase& mms,
                      const Vec3& x) {
  Mat3 grad;
  const double h = 1e-5;
  for (int c = 0; c < 3; ++c) {
    auto diff = [&](double step) -> Vec3 {
      Vec3 ep = Vec3::Zero();
      ep[c] = step;
      return (mms.velocity(closest_point(s, x + ep)) -
              mms.velocity(closest_point(s, x - ep))) /
             (2.0 * step);
    };
    grad.col(c) = (4.0 * diff(h / 2) - diff(h)) / 3.0;
  }
  const Vec3 n = exact_normal_extension(s, x);
  const Mat3 p = Mat3::Identity() - n * n.transpose();
  const Mat3 cov = p * grad * p;
  return 0.5 * (cov + cov.transpose());
}

// Surface pressure gradient from curve derivatives of the scalar field.
inline Vec3 fd_pressure_gradient(const AnalyticSurface& s,
                                 const ManufacturedCase& mms, const Vec3& x) {
  const Vec3 n = exact_normal_extension(s, x);
  Vec3 t1, t2;
  tangent_basis(n, t1, t2);
  auto p_ext = [&](const Vec3& y) { return Vec3(mms.pressure(y), 0, 0); };
  return surface_derivative(s, p_ext, x, t1)[0] * t1 +
         surface_derivative(s, p_ext, x, t2)[0] * t2;
}

// Forcing rebuilt with a finite-difference outer divergence of the strain
// (the strain itself uses the exact Jacobian, which fd_strain validates).
inline Vec3 fd_forcing(const AnalyticSurface& s, const ManufacturedCase& mms,
                       const Vec3& x) {
  const Vec3 n = exact_normal_extension(s, x);
  const Mat3 p = Mat3::Identity() - n * n.transpose();
  Vec3 t1, t2;
  tangent_basis(n, t1, t2);
  auto strain_row = [&s, &mms](int row) {
    return [&s, &mms, row](const Vec3& y) -> Vec3 {
      const Vec3 ny = exact_normal_extension(s, y);
      const Mat3 py = Mat3::Identity() - ny * ny.transpose();
      const Mat3 cov = py * mms.velocity_jacobian(y) * py;
      const Mat3 e = 0.5 * (cov + cov.transpose());
      return e.row(row);
    };
  };
  Vec3 div_strain;
  for (int row = 0; row < 3; ++row) {
    const auto field = strain_row(row);
    div_strain[row] = t1.dot(surface_derivative(s, field, x, t1)) +
                      t2.dot(surface_derivative(s, field, x, t2));
  }
  return -(p * div_strain) + mms.velocity(x) + mms.pressure_surface_gradient(x);
}

}  // namespace fd_oracles
