#include "surfstokes/geometry.hpp"

#include <cmath>

namespace surfstokes {

namespace {
constexpr double kDegenerateTol = 1e-12;
}

AnalyticSurface::AnalyticSurface(SurfaceKind kind, double a, double b,
                                 double delta)
    : kind_(kind), a_(a), b_(b), delta_(delta) {}

AnalyticSurface AnalyticSurface::sphere(double radius) {
  return sphere(radius, radius / 2.0);
}

AnalyticSurface AnalyticSurface::sphere(double radius, double tubular_width) {
  if (radius <= 0.0) throw ConfigError("sphere radius must be positive");
  if (tubular_width <= 0.0) throw ConfigError("tubular width must be positive");
  return AnalyticSurface(SurfaceKind::Sphere, radius, 0.0, tubular_width);
}

AnalyticSurface AnalyticSurface::torus(double major_radius,
                                       double minor_radius) {
  return torus(major_radius, minor_radius, minor_radius / 2.0);
}

AnalyticSurface AnalyticSurface::torus(double major_radius,
                                       double minor_radius,
                                       double tubular_width) {
  if (!(major_radius > minor_radius && minor_radius > 0.0))
    throw ConfigError("torus requires major_radius > minor_radius > 0");
  if (tubular_width <= 0.0) throw ConfigError("tubular width must be positive");
  return AnalyticSurface(SurfaceKind::Torus, major_radius, minor_radius,
                         tubular_width);
}

double AnalyticSurface::radius() const {
  if (kind_ != SurfaceKind::Sphere)
    throw ConfigError("radius() is only defined for spheres");
  return a_;
}

double AnalyticSurface::major_radius() const {
  if (kind_ != SurfaceKind::Torus)
    throw ConfigError("major_radius() is only defined for tori");
  return a_;
}

double AnalyticSurface::minor_radius() const {
  if (kind_ != SurfaceKind::Torus)
    throw ConfigError("minor_radius() is only defined for tori");
  return b_;
}

double AnalyticSurface::diameter() const {
  return kind_ == SurfaceKind::Sphere ? 2.0 * a_ : 2.0 * (a_ + b_);
}

double AnalyticSurface::area() const {
  const double pi = M_PI;
  return kind_ == SurfaceKind::Sphere ? 4.0 * pi * a_ * a_
                                      : 4.0 * pi * pi * a_ * b_;
}

namespace {

GeometricData sphere_data(const AnalyticSurface& surface, const Vec3& x) {
  const double R = surface.radius();
  const double r = x.norm();
  if (r <= kDegenerateTol * R)
    throw OutOfTubularNeighborhood("closest point undefined at sphere center");
  GeometricData g;
  g.d = r - R;
  g.n = x / r;
  g.P = Mat3::Identity() - g.n * g.n.transpose();
  g.H = g.P / r;
  g.pi_x = x - g.d * g.n;
  return g;
}

GeometricData torus_data(const AnalyticSurface& surface, const Vec3& x) {
  const double R = surface.major_radius();
  const double r = surface.minor_radius();
  const double rho = std::hypot(x[0], x[1]);
  if (rho <= kDegenerateTol * (R + r))
    throw OutOfTubularNeighborhood("closest point undefined on torus axis");
  // c is the nearest point on the center circle, u points from it to x.
  const Vec3 c(R * x[0] / rho, R * x[1] / rho, 0.0);
  const Vec3 u = x - c;
  const double s = u.norm();
  if (s <= kDegenerateTol * r)
    throw OutOfTubularNeighborhood(
        "closest point undefined on torus center circle");
  GeometricData g;
  g.d = s - r;
  g.n = u / s;
  // grad u = I - (R/rho) (I_xy - rhohat rhohat^T), hess d = (grad u - n n^T)/s
  const Vec3 rhohat(x[0] / rho, x[1] / rho, 0.0);
  Mat3 du = Mat3::Identity();
  Mat3 pc = Mat3::Zero();
  pc(0, 0) = 1.0;
  pc(1, 1) = 1.0;
  pc -= rhohat * rhohat.transpose();
  du -= (R / rho) * pc;
  g.H = (du - g.n * g.n.transpose()) / s;
  g.P = Mat3::Identity() - g.n * g.n.transpose();
  g.pi_x = x - g.d * g.n;
  return g;
}

GeometricData data_at(const AnalyticSurface& surface, const Vec3& x) {
  GeometricData g = surface.kind() == SurfaceKind::Sphere
                        ? sphere_data(surface, x)
                        : torus_data(surface, x);
  if (std::abs(g.d) > surface.tubular_width())
    throw OutOfTubularNeighborhood("point outside the tubular neighborhood");
  return g;
}

}  // namespace

double signed_distance(const AnalyticSurface& surface, const Vec3& x) {
  return data_at(surface, x).d;
}

GeometricData geometric_data(const AnalyticSurface& surface, const Vec3& x) {
  return data_at(surface, x);
}

Vec3 exact_normal_extension(const AnalyticSurface& surface, const Vec3& x) {
  return data_at(surface, x).n;
}

Vec3 closest_point(const AnalyticSurface& surface, const Vec3& x) {
  return data_at(surface, x).pi_x;
}

}  // namespace surfstokes
