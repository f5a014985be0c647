#include "surfstokes/mms.hpp"

#include <memory>

#include "poly3.hpp"

namespace surfstokes {

namespace {

using detail::Poly3;
using detail::PolyMat;
using detail::PolyVec;

// Everything the evaluators share, built once per case.
struct PolynomialStokesFields {
  PolyVec u;
  PolyMat jac_u;
  Poly3 p;
  PolyVec grad_gamma_p;
  PolyVec f;
  Poly3 g;
  bool g_is_zero = false;
};

// Ambient projector of the radius-R sphere: P = I - x x^T / R^2 (exact on the
// surface, polynomial everywhere).
PolyMat sphere_projector(double radius) {
  PolyMat p;
  const double inv_r2 = 1.0 / (radius * radius);
  const PolyVec x = detail::poly_position();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      p[i][j] = Poly3(i == j ? 1.0 : 0.0) - inv_r2 * (x[i] * x[j]);
  return p;
}

// Builds f = -P div_G(E(u)) + u + P grad p and g = div_G u from an ambient
// polynomial velocity that is tangential on the surface. All surface
// operators are extension-independent, so the ambient polynomial projector
// stands in for the exact one.
PolynomialStokesFields build_fields(const PolyMat& P, const PolyVec& u,
                                    const Poly3& p) {
  PolynomialStokesFields out;
  out.u = u;
  out.jac_u = detail::poly_jacobian(u);
  out.p = p;
  out.grad_gamma_p = detail::poly_matvec(P, detail::poly_gradient(p));

  // covariant gradient and strain of u
  const PolyMat cov = detail::poly_matmul(P, detail::poly_matmul(out.jac_u, P));
  PolyMat strain;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) strain[i][j] = 0.5 * (cov[i][j] + cov[j][i]);

  // row-wise surface divergence of the strain
  PolyVec div_strain;
  for (int i = 0; i < 3; ++i) {
    PolyVec row{strain[i][0], strain[i][1], strain[i][2]};
    const PolyMat jac_row = detail::poly_jacobian(row);
    div_strain[i] =
        detail::poly_trace(detail::poly_matmul(P, detail::poly_matmul(jac_row, P)));
  }
  const PolyVec p_div = detail::poly_matvec(P, div_strain);
  for (int i = 0; i < 3; ++i)
    out.f[i] = -1.0 * p_div[i] + u[i] + out.grad_gamma_p[i];

  out.g = detail::poly_trace(cov);
  return out;
}

ManufacturedCase wrap(const AnalyticSurface& surface, std::string name,
                      PolynomialStokesFields fields) {
  auto shared = std::make_shared<PolynomialStokesFields>(std::move(fields));
  ManufacturedCase mc(surface);
  mc.name = std::move(name);
  mc.velocity = [shared](const Vec3& x) { return detail::eval(shared->u, x); };
  mc.velocity_jacobian = [shared](const Vec3& x) {
    return detail::eval(shared->jac_u, x);
  };
  mc.pressure = [shared](const Vec3& x) { return shared->p.eval(x); };
  mc.pressure_surface_gradient = [shared](const Vec3& x) {
    return detail::eval(shared->grad_gamma_p, x);
  };
  mc.forcing = [shared](const Vec3& x) { return detail::eval(shared->f, x); };
  mc.source = [shared](const Vec3& x) {
    return shared->g_is_zero ? 0.0 : shared->g.eval(x);
  };
  return mc;
}

}  // namespace

ManufacturedCase killing_case(const AnalyticSurface& surface) {
  if (surface.kind() != SurfaceKind::Sphere)
    throw UnsupportedSurface("the Killing case is defined on spheres");
  const PolyMat P = sphere_projector(surface.radius());
  // u = e3 x x, already tangential; E(u) vanishes on the sphere.
  PolyVec u{-1.0 * Poly3::coordinate(1), Poly3::coordinate(0), Poly3(0.0)};
  const Poly3 p = Poly3::monomial(1, 1, 1);
  auto fields = build_fields(P, u, p);
  fields.g_is_zero = true;  // Killing fields are divergence free
  return wrap(surface, "killing", std::move(fields));
}

ManufacturedCase polynomial_case(const AnalyticSurface& surface) {
  if (surface.kind() != SurfaceKind::Sphere)
    throw UnsupportedSurface("the polynomial case is defined on spheres");
  const PolyMat P = sphere_projector(surface.radius());
  const PolyVec w{Poly3::monomial(0, 1, 1), -1.0 * Poly3::monomial(1, 0, 1),
                  Poly3::monomial(2, 0, 0) - Poly3::monomial(0, 2, 0)};
  const PolyVec u = detail::poly_matvec(P, w);
  const Poly3 p = Poly3::monomial(1, 1, 1);
  return wrap(surface, "polynomial", build_fields(P, u, p));
}

ManufacturedCase make_case(const AnalyticSurface& surface,
                           const std::string& name) {
  if (name == "killing") return killing_case(surface);
  if (name == "polynomial") return polynomial_case(surface);
  throw ConfigError("unknown manufactured case: " + name);
}

}  // namespace surfstokes
