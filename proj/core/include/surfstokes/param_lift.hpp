#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "surfstokes/fe_space.hpp"
#include "surfstokes/geometry.hpp"
#include "surfstokes/mesh.hpp"

namespace surfstokes {

/// Degree-k parametric chart of one flat triangle onto the lifted surface:
/// the Lagrange nodes of the flat triangle mapped through the closest-point
/// projection. Nodes follow the ReferenceBasis order; nodes on an edge are
/// generated from the edge endpoints in ascending global-vertex order, so
/// both adjacent elements lift the identical point and the lifted surface is
/// continuous. For k = 1 the chart is the identity on the flat triangle.
struct LiftedElement {
  std::array<Vec3, 3> flat_vertices;
  int degree = 1;
  Eigen::Matrix<double, Eigen::Dynamic, 3> nodes;  // lifted nodes, row-wise

  /// Affine chart from the reference triangle to the flat triangle.
  Vec3 chart(const Eigen::Vector2d& xi) const {
    return flat_vertices[0] + xi[0] * (flat_vertices[1] - flat_vertices[0]) +
           xi[1] * (flat_vertices[2] - flat_vertices[0]);
  }
  Vec3 flat_normal() const {
    return (flat_vertices[1] - flat_vertices[0])
        .cross(flat_vertices[2] - flat_vertices[0])
        .normalized();
  }
};

LiftedElement lift_element(const BaseMesh& mesh, int triangle,
                           const AnalyticSurface& surface, int degree);

/// All elements at once; edge nodes are computed once per global edge.
std::vector<LiftedElement> lift_all_elements(const BaseMesh& mesh,
                                             const AnalyticSurface& surface,
                                             int degree);

/// Chart evaluation data at one reference point.
struct LiftPoint {
  Vec3 x;                         // point on the lifted surface
  Eigen::Matrix<double, 3, 2> J;  // chart Jacobian
  double mu_ref = 0.0;            // area element w.r.t. the reference triangle
  Vec3 normal;                    // unit normal of the lifted element
};

LiftPoint eval_lift(const LiftedElement& elem, const ReferenceBasis& geom_basis,
                    const Eigen::Vector2d& xi);

Vec3 discrete_normal(const LiftedElement& elem, const ReferenceBasis& geom_basis,
                     const Eigen::Vector2d& xi);

/// Weingarten map of the lifted element: tangential derivative of the unit
/// normal field, computed from first and second derivatives of the chart.
/// Zero for degree 1.
Mat3 discrete_weingarten(const LiftedElement& elem,
                         const ReferenceBasis& geom_basis,
                         const Eigen::Vector2d& xi);

/// Per-quadrature-point chart data for one element, from tabulated bases.
struct LiftQuadData {
  Eigen::Matrix<double, Eigen::Dynamic, 3> x;
  std::vector<Eigen::Matrix<double, 3, 2>> J;
  Eigen::VectorXd mu;
  Eigen::Matrix<double, Eigen::Dynamic, 3> normal;
  std::vector<Mat3> weingarten;  // empty unless requested
};

LiftQuadData lift_quad_data(const LiftedElement& elem, const BasisTab& geom_tab,
                            bool with_weingarten);

/// Componentwise Lagrange interpolant of the exact normal in the degree-m
/// scalar space over the lifted surface. Reproduces n(pi(p)) exactly at every
/// node p and approximates the exact normal to order m+1 >= k+1.
struct ImprovedNormalField {
  int degree = 0;
  Eigen::Matrix<double, Eigen::Dynamic, 3> coeffs;  // n_scalar x 3
};

/// Requires m >= k; with m < k the interpolant cannot reach order k+1.
ImprovedNormalField build_improved_normal(
    const AnalyticSurface& surface, const std::vector<LiftedElement>& lifts,
    const DofMap& velocity_dofmap, const ReferenceBasis& velocity_basis,
    const ReferenceBasis& geom_basis);

/// Sup-norm geometry-approximation errors sampled at quadrature points.
struct GeometricAccuracy {
  double sup_distance = 0.0;
  double sup_normal_error = 0.0;
  double sup_weingarten_error = 0.0;
  double lifted_area = 0.0;
};

GeometricAccuracy measure_geometric_accuracy(const BaseMesh& mesh,
                                             const AnalyticSurface& surface,
                                             int degree, int quad_exactness);

double measure_improved_normal_error(const AnalyticSurface& surface,
                                     const std::vector<LiftedElement>& lifts,
                                     const ImprovedNormalField& nhat,
                                     const DofMap& velocity_dofmap,
                                     const ReferenceBasis& velocity_basis,
                                     const ReferenceBasis& geom_basis,
                                     const QuadratureRule& rule);

}  // namespace surfstokes
