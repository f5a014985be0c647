#include "surfstokes/error_eval.hpp"

#include <cmath>

#include "surfstokes/parallel.hpp"

namespace surfstokes {

ErrorReport eval_errors(const SolveResult& result, const ManufacturedCase& mms,
                        const Discretization& disc) {
  if (result.u.size() != disc.n_u() || result.p.size() != disc.n_p())
    throw DimensionMismatch("solution does not match the discretization");
  const int nv = disc.velocity_basis.n_nodes;
  const int np = disc.pressure_basis.n_nodes;
  const int n_elem = disc.mesh.n_triangles();

  struct Partial {
    double l2 = 0, h1 = 0, normal = 0;
    double p_sq = 0, p_int = 0, area = 0;
    double tan_l2 = 0, tan_h1 = 0;
  };
  std::vector<Partial> partial(n_elem);

  parallel_for(
      n_elem,
      [&](int t) {
        const LiftQuadData lifted =
            lift_quad_data(disc.lifts[t], disc.geom_tab, false);
        Partial acc;
        for (int q = 0; q < disc.quad.n_points(); ++q) {
          const double w = disc.quad.weights[q] * lifted.mu[q];
          const Vec3 x = lifted.x.row(q);
          const Vec3 nh = lifted.normal.row(q);
          const Mat3 ph = Mat3::Identity() - nh * nh.transpose();
          const Eigen::Matrix2d metric = lifted.J[q].transpose() * lifted.J[q];
          const Eigen::Matrix<double, 3, 2> push =
              lifted.J[q] * metric.inverse();

          // discrete velocity and its component-wise surface gradients
          Vec3 uh = Vec3::Zero();
          Mat3 guh = Mat3::Zero();
          for (int c = 0; c < 3; ++c) {
            Eigen::Vector2d gr = Eigen::Vector2d::Zero();
            for (int j = 0; j < nv; ++j) {
              const double coeff = result.u[disc.velocity_dof(
                  disc.dof_velocity.element_dofs(t, j), c)];
              uh[c] += coeff * disc.velocity_tab.val(q, j);
              gr += coeff * disc.velocity_tab.grad[q].row(j).transpose();
            }
            guh.row(c) = (push * gr).transpose();
          }
          double p_h = 0.0;
          for (int i = 0; i < np; ++i)
            p_h += result.p[disc.dof_pressure.element_dofs(t, i)] *
                   disc.pressure_tab.val(q, i);

          // exact extensions at the lifted point
          const GeometricData gd = geometric_data(disc.surface, x);
          const Vec3 ue = mms.velocity(gd.pi_x);
          const Mat3 ge =
              (mms.velocity_jacobian(gd.pi_x) * (gd.P - gd.d * gd.H)) * ph;
          const double pe = mms.pressure(gd.pi_x);

          const Vec3 du = ue - uh;
          const Mat3 dg = ge - guh;
          acc.l2 += w * du.squaredNorm();
          acc.h1 += w * dg.squaredNorm();
          const double un = gd.n.dot(du);
          acc.normal += w * un * un;

          const double dp = pe - p_h;
          acc.p_sq += w * dp * dp;
          acc.p_int += w * dp;
          acc.area += w;

          acc.tan_l2 += w * (gd.P * du).squaredNorm();
          acc.tan_h1 += w * (gd.P * dg * gd.P).squaredNorm();
        }
        partial[t] = acc;
      },
      disc.config.threads);

  Partial total;
  for (const auto& p : partial) {
    total.l2 += p.l2;
    total.h1 += p.h1;
    total.normal += p.normal;
    total.p_sq += p.p_sq;
    total.p_int += p.p_int;
    total.area += p.area;
    total.tan_l2 += p.tan_l2;
    total.tan_h1 += p.tan_h1;
  }

  ErrorReport report;
  report.energy_error =
      std::sqrt(total.l2 + total.h1 + total.normal / (disc.h * disc.h));
  // remove the L2-optimal constant: both pressure representatives are
  // mean-zero, but in the measures of the exact and the lifted surface
  const double shifted = total.p_sq - total.p_int * total.p_int / total.area;
  report.pressure_l2 = std::sqrt(std::max(shifted, 0.0));
  report.velocity_l2 = std::sqrt(total.l2);
  report.tangential_h1 = std::sqrt(total.tan_l2 + total.tan_h1);
  report.level = disc.mesh.level;
  report.h = disc.h;
  report.n_u = disc.n_u();
  report.n_p = disc.n_p();
  return report;
}

Eigen::VectorXd interpolate_velocity(
    const Discretization& disc,
    const std::function<Vec3(const Vec3&)>& field) {
  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(disc.n_u());
  std::vector<char> seen(disc.dof_velocity.n_scalar, 0);
  for (int t = 0; t < disc.mesh.n_triangles(); ++t)
    for (int j = 0; j < disc.velocity_basis.n_nodes; ++j) {
      const int g = disc.dof_velocity.element_dofs(t, j);
      if (seen[g]) continue;
      seen[g] = 1;
      const LiftPoint lp =
          eval_lift(disc.lifts[t], disc.geom_basis, disc.velocity_basis.nodes.row(j));
      const Vec3 value = field(closest_point(disc.surface, lp.x));
      for (int c = 0; c < 3; ++c) coeffs[disc.velocity_dof(g, c)] = value[c];
    }
  return coeffs;
}

Eigen::VectorXd interpolate_pressure(
    const Discretization& disc,
    const std::function<double(const Vec3&)>& field) {
  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(disc.n_p());
  std::vector<char> seen(disc.dof_pressure.n_scalar, 0);
  for (int t = 0; t < disc.mesh.n_triangles(); ++t)
    for (int j = 0; j < disc.pressure_basis.n_nodes; ++j) {
      const int g = disc.dof_pressure.element_dofs(t, j);
      if (seen[g]) continue;
      seen[g] = 1;
      const LiftPoint lp =
          eval_lift(disc.lifts[t], disc.geom_basis, disc.pressure_basis.nodes.row(j));
      coeffs[g] = field(closest_point(disc.surface, lp.x));
    }
  return coeffs;
}

}  // namespace surfstokes
