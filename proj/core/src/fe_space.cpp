#include "surfstokes/fe_space.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "surfstokes/param_lift.hpp"

namespace surfstokes {

namespace {

// Value and first two derivatives of P_a(t) = prod_{r<a} (m t - r)/(a - r),
// the one-dimensional factor of the equispaced Lagrange basis.
std::array<double, 3> silvester(int a, double t, int m) {
  double p = 1.0, dp = 0.0, ddp = 0.0;
  for (int r = 0; r < a; ++r) {
    const double f = (m * t - r) / static_cast<double>(a - r);
    const double df = static_cast<double>(m) / static_cast<double>(a - r);
    ddp = ddp * f + 2.0 * dp * df;
    dp = dp * f + p * df;
    p = p * f;
  }
  return {p, dp, ddp};
}

// Gradients of the barycentric coordinates w.r.t. reference coordinates.
constexpr double kLambdaGrad[3][2] = {{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}};

}  // namespace

Eigen::VectorXd ReferenceBasis::values(const Eigen::Vector2d& xi) const {
  const double lambda[3] = {1.0 - xi[0] - xi[1], xi[0], xi[1]};
  Eigen::VectorXd out(n_nodes);
  for (int j = 0; j < n_nodes; ++j) {
    double v = 1.0;
    for (int c = 0; c < 3; ++c)
      v *= silvester(barycentric_index[j][c], lambda[c], degree)[0];
    out[j] = v;
  }
  return out;
}

Eigen::Matrix<double, Eigen::Dynamic, 2> ReferenceBasis::gradients(
    const Eigen::Vector2d& xi) const {
  const double lambda[3] = {1.0 - xi[0] - xi[1], xi[0], xi[1]};
  Eigen::Matrix<double, Eigen::Dynamic, 2> out(n_nodes, 2);
  for (int j = 0; j < n_nodes; ++j) {
    std::array<std::array<double, 3>, 3> f;
    for (int c = 0; c < 3; ++c)
      f[c] = silvester(barycentric_index[j][c], lambda[c], degree);
    for (int a = 0; a < 2; ++a) {
      double g = 0.0;
      for (int c = 0; c < 3; ++c) {
        double term = f[c][1] * kLambdaGrad[c][a];
        for (int o = 0; o < 3; ++o)
          if (o != c) term *= f[o][0];
        g += term;
      }
      out(j, a) = g;
    }
  }
  return out;
}

Eigen::Matrix<double, Eigen::Dynamic, 3> ReferenceBasis::hessians(
    const Eigen::Vector2d& xi) const {
  const double lambda[3] = {1.0 - xi[0] - xi[1], xi[0], xi[1]};
  Eigen::Matrix<double, Eigen::Dynamic, 3> out(n_nodes, 3);
  for (int j = 0; j < n_nodes; ++j) {
    std::array<std::array<double, 3>, 3> f;
    for (int c = 0; c < 3; ++c)
      f[c] = silvester(barycentric_index[j][c], lambda[c], degree);
    // d2 phi / dxi_a dxi_b via the product rule over the three factors
    const int pairs[3][2] = {{0, 0}, {0, 1}, {1, 1}};
    for (int s = 0; s < 3; ++s) {
      const int a = pairs[s][0], b = pairs[s][1];
      double h = 0.0;
      for (int c = 0; c < 3; ++c) {
        double term = f[c][2] * kLambdaGrad[c][a] * kLambdaGrad[c][b];
        for (int o = 0; o < 3; ++o)
          if (o != c) term *= f[o][0];
        h += term;
      }
      for (int c = 0; c < 3; ++c) {
        for (int d = c + 1; d < 3; ++d) {
          const int e = 3 - c - d;
          h += f[c][1] * f[d][1] * f[e][0] *
               (kLambdaGrad[c][a] * kLambdaGrad[d][b] +
                kLambdaGrad[d][a] * kLambdaGrad[c][b]);
        }
      }
      out(j, s) = h;
    }
  }
  return out;
}

ReferenceBasis reference_basis(int degree) {
  if (degree < 1 || degree > 4)
    throw UnsupportedDegree("Lagrange degree must be in 1..4");
  ReferenceBasis basis;
  basis.degree = degree;
  basis.n_nodes = (degree + 1) * (degree + 2) / 2;
  basis.nodes.resize(basis.n_nodes, 2);
  basis.barycentric_index.reserve(basis.n_nodes);
  const int m = degree;
  auto push = [&](int a0, int a1, int a2) {
    const int j = static_cast<int>(basis.barycentric_index.size());
    basis.barycentric_index.push_back({a0, a1, a2});
    basis.nodes(j, 0) = static_cast<double>(a1) / m;
    basis.nodes(j, 1) = static_cast<double>(a2) / m;
  };
  push(m, 0, 0);
  push(0, m, 0);
  push(0, 0, m);
  for (int j = 1; j < m; ++j) push(m - j, j, 0);  // edge (v0,v1)
  for (int j = 1; j < m; ++j) push(0, m - j, j);  // edge (v1,v2)
  for (int j = 1; j < m; ++j) push(j, 0, m - j);  // edge (v2,v0)
  for (int a1 = 1; a1 <= m - 2; ++a1)
    for (int a2 = 1; a2 <= m - 1 - a1; ++a2) push(m - a1 - a2, a1, a2);
  return basis;
}

namespace {

// Golub-Welsch nodes/weights from the symmetric Jacobi matrix of a weight
// with moment mu0 and recurrence coefficients (diag, offdiag).
void golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag,
                  double mu0, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, offdiag,
                                Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success)
    throw EigenFailure("Golub-Welsch eigenvalue computation failed");
  nodes = solver.eigenvalues();
  weights = mu0 * solver.eigenvectors().row(0).transpose().array().square();
}

// n-point Gauss-Legendre on [0,1].
void gauss_legendre01(int n, Eigen::VectorXd& t, Eigen::VectorXd& w) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd off(n - 1 > 0 ? n - 1 : 0);
  for (int k = 1; k < n; ++k) off[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  Eigen::VectorXd x, wx;
  golub_welsch(diag, off, 2.0, x, wx);
  t = (x.array() + 1.0) / 2.0;
  w = wx / 2.0;
}

// n-point Gauss-Jacobi for weight (1-t) on [0,1].
void gauss_jacobi10_01(int n, Eigen::VectorXd& t, Eigen::VectorXd& w) {
  Eigen::VectorXd diag(n);
  for (int k = 0; k < n; ++k)
    diag[k] = -1.0 / ((2.0 * k + 1.0) * (2.0 * k + 3.0));
  Eigen::VectorXd off(n - 1 > 0 ? n - 1 : 0);
  for (int k = 1; k < n; ++k) {
    const double bk = k * (k + 1.0) / ((2.0 * k + 1.0) * (2.0 * k + 1.0));
    off[k - 1] = std::sqrt(bk);
  }
  Eigen::VectorXd x, wx;
  golub_welsch(diag, off, 2.0, x, wx);
  t = (x.array() + 1.0) / 2.0;
  w = wx / 4.0;  // accounts for the affine map of both measure and weight
}

// Average over the six barycentric permutations; keeps exactness and positive
// weights and makes the rule invariant under relabeling of element vertices.
QuadratureRule symmetrize(const QuadratureRule& rule) {
  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                  {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  QuadratureRule out;
  out.exactness = rule.exactness;
  const int nq = rule.n_points();
  out.points.resize(6 * nq, 2);
  out.weights.resize(6 * nq);
  for (int q = 0; q < nq; ++q) {
    const double lambda[3] = {1.0 - rule.points(q, 0) - rule.points(q, 1),
                              rule.points(q, 0), rule.points(q, 1)};
    for (int s = 0; s < 6; ++s) {
      out.points(6 * q + s, 0) = lambda[perms[s][1]];
      out.points(6 * q + s, 1) = lambda[perms[s][2]];
      out.weights[6 * q + s] = rule.weights[q] / 6.0;
    }
  }
  return out;
}

}  // namespace

QuadratureRule quadrature(int exactness) {
  if (exactness > 20)
    throw UnsupportedExactness("quadrature exactness is limited to 20");
  if (exactness < 1) exactness = 1;
  QuadratureRule rule;
  if (exactness == 1) {
    rule.exactness = 1;
    rule.points.resize(1, 2);
    rule.points << 1.0 / 3.0, 1.0 / 3.0;
    rule.weights.resize(1);
    rule.weights << 0.5;
    return rule;
  }
  if (exactness == 2) {
    rule.exactness = 2;
    rule.points.resize(3, 2);
    rule.points << 1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0,
        2.0 / 3.0;
    rule.weights = Eigen::VectorXd::Constant(3, 1.0 / 6.0);
    return rule;
  }
  // Conical product rule: exact to degree 2n-1 with positive weights.
  const int n = (exactness + 2) / 2;
  Eigen::VectorXd u, wu, v, wv;
  gauss_legendre01(n, u, wu);
  gauss_jacobi10_01(n, v, wv);
  rule.exactness = std::max(exactness, 2 * n - 1);
  rule.points.resize(n * n, 2);
  rule.weights.resize(n * n);
  int idx = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j, ++idx) {
      rule.points(idx, 0) = u[i] * (1.0 - v[j]);
      rule.points(idx, 1) = v[j];
      rule.weights[idx] = wu[i] * wv[j];
    }
  }
  return symmetrize(rule);
}

BasisTab tabulate(const ReferenceBasis& basis, const QuadratureRule& rule,
                  bool with_hessians) {
  BasisTab tab;
  const int nq = rule.n_points();
  tab.val.resize(nq, basis.n_nodes);
  tab.grad.resize(nq);
  if (with_hessians) tab.hess.resize(nq);
  for (int q = 0; q < nq; ++q) {
    const Eigen::Vector2d xi = rule.points.row(q);
    tab.val.row(q) = basis.values(xi).transpose();
    tab.grad[q] = basis.gradients(xi);
    if (with_hessians) tab.hess[q] = basis.hessians(xi);
  }
  return tab;
}

int scalar_space_dimension(const BaseMesh& mesh, int degree) {
  return mesh.n_vertices() + (degree - 1) * mesh.n_edges() +
         (degree - 1) * (degree - 2) / 2 * mesh.n_triangles();
}

DofMap build_dofmap(const BaseMesh& mesh, int degree) {
  if (degree < 1 || degree > 4)
    throw UnsupportedDegree("dof map degree must be in 1..4");
  DofMap dof;
  dof.degree = degree;
  const int m = degree;
  const int n_local = (m + 1) * (m + 2) / 2;
  const int n_interior = (m - 1) * (m - 2) / 2;
  dof.element_dofs.resize(mesh.n_triangles(), n_local);
  const int edge_base = mesh.n_vertices();
  const int face_base = edge_base + (m - 1) * mesh.n_edges();
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int s = 0; s < 3; ++s) dof.element_dofs(t, s) = tri[s];
    for (int s = 0; s < 3; ++s) {
      const int a = tri[s];
      const int b = tri[(s + 1) % 3];
      const int eid = mesh.tri_edges[t][s];
      for (int j = 1; j < m; ++j) {
        // Edge dofs are stored from the smaller to the larger vertex id, so
        // the two adjacent elements agree on the numbering.
        const int slot = a < b ? j - 1 : m - 1 - j;
        dof.element_dofs(t, 3 + s * (m - 1) + (j - 1)) =
            edge_base + eid * (m - 1) + slot;
      }
    }
    for (int i = 0; i < n_interior; ++i)
      dof.element_dofs(t, 3 + 3 * (m - 1) + i) =
          face_base + t * n_interior + i;
  }
  dof.n_scalar = scalar_space_dimension(mesh, degree);
  return dof;
}

FeValue eval_fe(const Eigen::VectorXd& coeffs, const DofMap& dofmap,
                int element, const LiftedElement& lift,
                const ReferenceBasis& basis, const ReferenceBasis& geom_basis,
                const Eigen::Vector2d& xi) {
  if (coeffs.size() != dofmap.n_scalar)
    throw DimensionMismatch("coefficient vector does not match the space");
  const LiftPoint lp = eval_lift(lift, geom_basis, xi);
  const Eigen::VectorXd phi = basis.values(xi);
  const auto dphi = basis.gradients(xi);
  FeValue out;
  Eigen::Vector2d grad_ref = Eigen::Vector2d::Zero();
  for (int j = 0; j < basis.n_nodes; ++j) {
    const double c = coeffs[dofmap.element_dofs(element, j)];
    out.value += c * phi[j];
    grad_ref += c * dphi.row(j).transpose();
  }
  const Eigen::Matrix2d metric = lp.J.transpose() * lp.J;
  out.surface_gradient = lp.J * metric.ldlt().solve(grad_ref);
  return out;
}

}  // namespace surfstokes
