#pragma once

#include <Eigen/Dense>

#include "surfstokes/errors.hpp"

namespace surfstokes {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

enum class SurfaceKind { Sphere, Torus };

/// Closed analytic surface with exact signed distance, normal, Weingarten map
/// and closest-point projection. Only surfaces with closed-form geometry are
/// supported, so measured discretization errors are not polluted by geometry
/// queries.
class AnalyticSurface {
 public:
  // Default tubular widths are radius/2 (sphere) and minor_radius/2 (torus),
  // safely inside the reach of the surface. Queries farther out than the
  // stored width are rejected; pass an explicit width to widen the trusted
  // zone (the closed-form maps stay valid away from the degenerate sets).
  static AnalyticSurface sphere(double radius);
  static AnalyticSurface sphere(double radius, double tubular_width);
  static AnalyticSurface torus(double major_radius, double minor_radius);
  static AnalyticSurface torus(double major_radius, double minor_radius,
                               double tubular_width);

  SurfaceKind kind() const { return kind_; }
  double radius() const;        // sphere only
  double major_radius() const;  // torus only
  double minor_radius() const;  // torus only
  double tubular_width() const { return delta_; }
  double diameter() const;
  double area() const;  // exact surface area

 private:
  AnalyticSurface(SurfaceKind kind, double a, double b, double delta);

  SurfaceKind kind_;
  double a_;  // sphere radius / torus major radius
  double b_;  // torus minor radius
  double delta_;
};

/// Pointwise geometry in the tubular neighborhood: signed distance d, unit
/// normal n = grad d, Weingarten map H = hess d, tangential projector
/// P = I - n n^T, and the closest point pi_x = x - d n.
struct GeometricData {
  double d;
  Vec3 n;
  Mat3 H;
  Mat3 P;
  Vec3 pi_x;
};

/// Signed distance to the surface, negative inside.
/// Throws OutOfTubularNeighborhood beyond the stored tubular width or at
/// points where the closest point is not unique (sphere center, torus axis,
/// torus center circle).
double signed_distance(const AnalyticSurface& surface, const Vec3& x);

GeometricData geometric_data(const AnalyticSurface& surface, const Vec3& x);

/// n(pi(x)); identical to grad d throughout the tubular neighborhood.
Vec3 exact_normal_extension(const AnalyticSurface& surface, const Vec3& x);

Vec3 closest_point(const AnalyticSurface& surface, const Vec3& x);

}  // namespace surfstokes
