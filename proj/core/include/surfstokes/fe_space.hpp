#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "surfstokes/errors.hpp"
#include "surfstokes/mesh.hpp"

namespace surfstokes {

/// Lagrange basis of degree m on the reference triangle with equispaced
/// nodes. Node order: the three vertices, then the interior nodes of local
/// edges (v0,v1), (v1,v2), (v2,v0) walked from first to second endpoint, then
/// the interior nodes lexicographically. Values and derivatives come from the
/// closed-form product representation in barycentric coordinates, so no
/// Vandermonde solve is involved.
struct ReferenceBasis {
  int degree = 0;
  int n_nodes = 0;
  Eigen::Matrix<double, Eigen::Dynamic, 2> nodes;       // reference coords
  std::vector<std::array<int, 3>> barycentric_index;    // exponents per node

  Eigen::VectorXd values(const Eigen::Vector2d& xi) const;
  // Rows are reference gradients (d/dxi1, d/dxi2).
  Eigen::Matrix<double, Eigen::Dynamic, 2> gradients(
      const Eigen::Vector2d& xi) const;
  // Rows are (d11, d12, d22) second derivatives.
  Eigen::Matrix<double, Eigen::Dynamic, 3> hessians(
      const Eigen::Vector2d& xi) const;
};

/// Degrees 1..4 are supported (Taylor-Hood velocity up to P4).
ReferenceBasis reference_basis(int degree);

/// Positive-weight rule on the reference triangle, invariant under the six
/// affine symmetries, exact for all polynomials up to `exactness`.
struct QuadratureRule {
  int exactness = 0;
  Eigen::Matrix<double, Eigen::Dynamic, 2> points;
  Eigen::VectorXd weights;

  int n_points() const { return static_cast<int>(weights.size()); }
};

/// Requested exactness must be <= 20.
QuadratureRule quadrature(int exactness);

/// Basis tables at the points of a quadrature rule.
struct BasisTab {
  Eigen::MatrixXd val;  // n_points x n_nodes
  std::vector<Eigen::Matrix<double, Eigen::Dynamic, 2>> grad;
  std::vector<Eigen::Matrix<double, Eigen::Dynamic, 3>> hess;
};

BasisTab tabulate(const ReferenceBasis& basis, const QuadratureRule& rule,
                  bool with_hessians = false);

/// Global numbering of the continuous scalar Lagrange space of degree m over
/// the mesh: vertex dofs first, then (m-1) per edge ordered from the smaller
/// to the larger global vertex id, then interior dofs per triangle. Shared
/// nodes receive the same index from both adjacent elements.
struct DofMap {
  int degree = 0;
  int n_scalar = 0;
  Eigen::MatrixXi element_dofs;  // n_triangles x n_local

  int n_local() const { return static_cast<int>(element_dofs.cols()); }
};

DofMap build_dofmap(const BaseMesh& mesh, int degree);

/// dim of the scalar degree-m space: V + (m-1) E + (m-1)(m-2)/2 F.
int scalar_space_dimension(const BaseMesh& mesh, int degree);

struct LiftedElement;  // param_lift.hpp

struct FeValue {
  double value = 0.0;
  Vec3 surface_gradient = Vec3::Zero();  // tangential to the lifted element
};

/// Evaluates a scalar FE function and its surface gradient on the lifted
/// element: value = sum c_j phi_j, gradient = J (J^T J)^{-1} grad_ref.
FeValue eval_fe(const Eigen::VectorXd& coeffs, const DofMap& dofmap,
                int element, const LiftedElement& lift,
                const ReferenceBasis& basis, const ReferenceBasis& geom_basis,
                const Eigen::Vector2d& xi);

}  // namespace surfstokes
