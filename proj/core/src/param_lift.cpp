#include "surfstokes/param_lift.hpp"

#include <cmath>

#include "surfstokes/parallel.hpp"

namespace surfstokes {

namespace {

// Interior nodes of one global edge, walked from the smaller to the larger
// vertex id. Both adjacent elements receive these bit-identical points.
std::vector<Vec3> canonical_edge_nodes(const Vec3& lo, const Vec3& hi,
                                       const AnalyticSurface& surface,
                                       int degree) {
  std::vector<Vec3> nodes;
  nodes.reserve(degree - 1);
  for (int i = 1; i < degree; ++i) {
    const Vec3 flat = lo + (static_cast<double>(i) / degree) * (hi - lo);
    nodes.push_back(closest_point(surface, flat));
  }
  return nodes;
}

LiftedElement assemble_lift(const BaseMesh& mesh, int t,
                            const AnalyticSurface& surface, int degree,
                            const ReferenceBasis& basis,
                            const std::vector<std::vector<Vec3>>& edge_nodes) {
  const auto& tri = mesh.triangles[t];
  LiftedElement elem;
  elem.degree = degree;
  elem.flat_vertices = {mesh.vertices[tri[0]], mesh.vertices[tri[1]],
                        mesh.vertices[tri[2]]};
  elem.nodes.resize(basis.n_nodes, 3);
  for (int v = 0; v < 3; ++v)
    elem.nodes.row(v) = elem.flat_vertices[v].transpose();
  for (int s = 0; s < 3; ++s) {
    const int a = tri[s];
    const int b = tri[(s + 1) % 3];
    const auto& shared = edge_nodes[mesh.tri_edges[t][s]];
    for (int j = 1; j < degree; ++j) {
      const int slot = a < b ? j - 1 : degree - 1 - j;
      elem.nodes.row(3 + s * (degree - 1) + (j - 1)) =
          shared[slot].transpose();
    }
  }
  const int interior_offset = 3 + 3 * (degree - 1);
  for (int j = interior_offset; j < basis.n_nodes; ++j) {
    const Vec3 flat = elem.chart(basis.nodes.row(j));
    elem.nodes.row(j) = closest_point(surface, flat).transpose();
  }
  // Reject folded charts early: the chart must be non-degenerate and keep the
  // flat outward orientation at the nodes and the barycenter.
  const Vec3 nf = elem.flat_normal();
  const double scale =
      2.0 * 0.5 *
      (elem.flat_vertices[1] - elem.flat_vertices[0])
          .cross(elem.flat_vertices[2] - elem.flat_vertices[0])
          .norm();
  auto check = [&](const Eigen::Vector2d& xi) {
    const LiftPoint lp = eval_lift(elem, basis, xi);
    if (lp.mu_ref <= 1e-10 * scale || lp.normal.dot(nf) <= 0.0)
      throw DegenerateLift("chart folds; mesh too coarse for the curvature");
  };
  if (degree > 1) {
    for (int j = 0; j < basis.n_nodes; ++j) check(basis.nodes.row(j));
    check(Eigen::Vector2d(1.0 / 3.0, 1.0 / 3.0));
  }
  return elem;
}

}  // namespace

std::vector<LiftedElement> lift_all_elements(const BaseMesh& mesh,
                                             const AnalyticSurface& surface,
                                             int degree) {
  if (degree < 1) throw UnsupportedDegree("lift degree must be >= 1");
  const ReferenceBasis basis = reference_basis(degree);
  std::vector<std::vector<Vec3>> edge_nodes(mesh.n_edges());
  if (degree > 1)
    for (int e = 0; e < mesh.n_edges(); ++e)
      edge_nodes[e] =
          canonical_edge_nodes(mesh.vertices[mesh.edges[e].v[0]],
                               mesh.vertices[mesh.edges[e].v[1]], surface,
                               degree);
  std::vector<LiftedElement> lifts(mesh.n_triangles());
  for (int t = 0; t < mesh.n_triangles(); ++t)
    lifts[t] = assemble_lift(mesh, t, surface, degree, basis, edge_nodes);
  return lifts;
}

LiftedElement lift_element(const BaseMesh& mesh, int triangle,
                           const AnalyticSurface& surface, int degree) {
  if (degree < 1) throw UnsupportedDegree("lift degree must be >= 1");
  const ReferenceBasis basis = reference_basis(degree);
  std::vector<std::vector<Vec3>> edge_nodes(mesh.n_edges());
  if (degree > 1)
    for (int s = 0; s < 3; ++s) {
      const int e = mesh.tri_edges[triangle][s];
      edge_nodes[e] =
          canonical_edge_nodes(mesh.vertices[mesh.edges[e].v[0]],
                               mesh.vertices[mesh.edges[e].v[1]], surface,
                               degree);
    }
  return assemble_lift(mesh, triangle, surface, degree, basis, edge_nodes);
}

LiftPoint eval_lift(const LiftedElement& elem, const ReferenceBasis& geom_basis,
                    const Eigen::Vector2d& xi) {
  const Eigen::VectorXd phi = geom_basis.values(xi);
  const auto dphi = geom_basis.gradients(xi);
  LiftPoint lp;
  lp.x = elem.nodes.transpose() * phi;
  lp.J = elem.nodes.transpose() * dphi;
  const Vec3 c = lp.J.col(0).cross(lp.J.col(1));
  lp.mu_ref = c.norm();
  if (lp.mu_ref <= 0.0)
    throw DegenerateLift("chart Jacobian is rank deficient");
  lp.normal = c / lp.mu_ref;
  return lp;
}

Vec3 discrete_normal(const LiftedElement& elem, const ReferenceBasis& geom_basis,
                     const Eigen::Vector2d& xi) {
  return eval_lift(elem, geom_basis, xi).normal;
}

namespace {

Mat3 weingarten_from_tables(const LiftedElement& elem,
                            const Eigen::Matrix<double, 3, 2>& J,
                            const Vec3& normal, double mu,
                            const Eigen::Matrix<double, Eigen::Dynamic, 3>& hess) {
  // Second derivatives of the chart: d2x[s] = d^2 x / dxi_a dxi_b for
  // (a,b) = (1,1), (1,2), (2,2).
  std::array<Vec3, 3> d2x;
  for (int s = 0; s < 3; ++s) d2x[s] = elem.nodes.transpose() * hess.col(s);
  // dc/dxi_a with c = J1 x J2
  const Vec3 dc1 = d2x[0].cross(J.col(1)) + J.col(0).cross(d2x[1]);
  const Vec3 dc2 = d2x[1].cross(J.col(1)) + J.col(0).cross(d2x[2]);
  const Mat3 tangential = Mat3::Identity() - normal * normal.transpose();
  Eigen::Matrix<double, 3, 2> dn;
  dn.col(0) = tangential * dc1 / mu;
  dn.col(1) = tangential * dc2 / mu;
  const Eigen::Matrix2d metric = J.transpose() * J;
  return dn * metric.ldlt().solve(J.transpose());
}

}  // namespace

Mat3 discrete_weingarten(const LiftedElement& elem,
                         const ReferenceBasis& geom_basis,
                         const Eigen::Vector2d& xi) {
  if (elem.degree == 1) return Mat3::Zero();
  const LiftPoint lp = eval_lift(elem, geom_basis, xi);
  return weingarten_from_tables(elem, lp.J, lp.normal, lp.mu_ref,
                                geom_basis.hessians(xi));
}

LiftQuadData lift_quad_data(const LiftedElement& elem, const BasisTab& geom_tab,
                            bool with_weingarten) {
  const int nq = static_cast<int>(geom_tab.val.rows());
  LiftQuadData data;
  data.x.resize(nq, 3);
  data.J.resize(nq);
  data.mu.resize(nq);
  data.normal.resize(nq, 3);
  if (with_weingarten) data.weingarten.resize(nq);
  for (int q = 0; q < nq; ++q) {
    data.x.row(q) = geom_tab.val.row(q) * elem.nodes;
    data.J[q] = elem.nodes.transpose() * geom_tab.grad[q];
    const Vec3 c = data.J[q].col(0).cross(data.J[q].col(1));
    const double mu = c.norm();
    if (mu <= 0.0) throw DegenerateLift("chart Jacobian is rank deficient");
    data.mu[q] = mu;
    data.normal.row(q) = (c / mu).transpose();
    if (with_weingarten) {
      data.weingarten[q] =
          elem.degree == 1
              ? Mat3::Zero()
              : weingarten_from_tables(elem, data.J[q], data.normal.row(q),
                                       mu, geom_tab.hess[q]);
    }
  }
  return data;
}

ImprovedNormalField build_improved_normal(
    const AnalyticSurface& surface, const std::vector<LiftedElement>& lifts,
    const DofMap& velocity_dofmap, const ReferenceBasis& velocity_basis,
    const ReferenceBasis& geom_basis) {
  if (lifts.empty()) throw ConfigError("improved normal needs elements");
  if (velocity_basis.degree < lifts.front().degree)
    throw ConfigError(
        "improved normal needs velocity degree m >= geometry degree k");
  ImprovedNormalField field;
  field.degree = velocity_basis.degree;
  field.coeffs.resize(velocity_dofmap.n_scalar, 3);
  std::vector<char> seen(velocity_dofmap.n_scalar, 0);
  for (size_t t = 0; t < lifts.size(); ++t) {
    for (int j = 0; j < velocity_basis.n_nodes; ++j) {
      const int g = velocity_dofmap.element_dofs(static_cast<int>(t), j);
      if (seen[g]) continue;
      seen[g] = 1;
      const LiftPoint lp =
          eval_lift(lifts[t], geom_basis, velocity_basis.nodes.row(j));
      field.coeffs.row(g) =
          exact_normal_extension(surface, lp.x).transpose();
    }
  }
  return field;
}

GeometricAccuracy measure_geometric_accuracy(const BaseMesh& mesh,
                                             const AnalyticSurface& surface,
                                             int degree, int quad_exactness) {
  const ReferenceBasis basis = reference_basis(degree);
  const QuadratureRule rule = quadrature(quad_exactness);
  const BasisTab tab = tabulate(basis, rule, /*with_hessians=*/true);
  const auto lifts = lift_all_elements(mesh, surface, degree);

  struct Partial {
    double d = 0, n = 0, w = 0, area = 0;
  };
  std::vector<Partial> partial(lifts.size());
  parallel_for(static_cast<int>(lifts.size()), [&](int t) {
    const LiftQuadData data = lift_quad_data(lifts[t], tab, true);
    Partial p;
    for (int q = 0; q < rule.n_points(); ++q) {
      const Vec3 x = data.x.row(q);
      const GeometricData g = geometric_data(surface, x);
      const GeometricData gs = geometric_data(surface, g.pi_x);
      p.d = std::max(p.d, std::abs(g.d));
      p.n = std::max(p.n, (g.n - Vec3(data.normal.row(q))).norm());
      p.w = std::max(p.w, (gs.H - data.weingarten[q]).norm());
      p.area += rule.weights[q] * data.mu[q];
    }
    partial[t] = p;
  });
  GeometricAccuracy acc;
  for (const auto& p : partial) {
    acc.sup_distance = std::max(acc.sup_distance, p.d);
    acc.sup_normal_error = std::max(acc.sup_normal_error, p.n);
    acc.sup_weingarten_error = std::max(acc.sup_weingarten_error, p.w);
    acc.lifted_area += p.area;
  }
  return acc;
}

double measure_improved_normal_error(const AnalyticSurface& surface,
                                     const std::vector<LiftedElement>& lifts,
                                     const ImprovedNormalField& nhat,
                                     const DofMap& velocity_dofmap,
                                     const ReferenceBasis& velocity_basis,
                                     const ReferenceBasis& geom_basis,
                                     const QuadratureRule& rule) {
  const BasisTab vel_tab = tabulate(velocity_basis, rule);
  const ReferenceBasis gb = geom_basis;
  const BasisTab geom_tab = tabulate(gb, rule);
  std::vector<double> partial(lifts.size(), 0.0);
  parallel_for(static_cast<int>(lifts.size()), [&](int t) {
    const LiftQuadData data = lift_quad_data(lifts[t], geom_tab, false);
    double sup = 0.0;
    for (int q = 0; q < rule.n_points(); ++q) {
      Vec3 approx = Vec3::Zero();
      for (int j = 0; j < velocity_basis.n_nodes; ++j)
        approx += vel_tab.val(q, j) *
                  nhat.coeffs.row(velocity_dofmap.element_dofs(t, j))
                      .transpose();
      const Vec3 exact = exact_normal_extension(surface, data.x.row(q));
      sup = std::max(sup, (approx - exact).norm());
    }
    partial[t] = sup;
  });
  double sup = 0.0;
  for (double v : partial) sup = std::max(sup, v);
  return sup;
}

}  // namespace surfstokes
