#pragma once

#include <Eigen/Sparse>
#include <iosfwd>

#include "surfstokes/fe_space.hpp"
#include "surfstokes/mesh.hpp"
#include "surfstokes/mms.hpp"
#include "surfstokes/param_lift.hpp"

namespace surfstokes {

/// Compressed-row sparse matrix with sorted, duplicate-free entries.
using SparseMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

bool is_symmetric(const SparseMat& m, double rel_tol = 1e-12);

/// MatrixMarket coordinate export, 1-based indices.
void write_matrix_market(const SparseMat& m, std::ostream& out);

enum class PenaltyNormal { Improved, Discrete };

struct AssemblyConfig {
  int geom_degree = 2;      // k
  int velocity_degree = 2;  // m (pressure degree is m-1)
  PenaltyNormal penalty_normal = PenaltyNormal::Improved;
  int penalty_exponent = 2;      // eta = h^-exponent
  int quadrature_exactness = 0;  // 0 selects the 2m+2k default
  int threads = 0;               // 0 selects the thread budget
};

/// Everything fixed once mesh and degrees are chosen: lifted elements,
/// reference bases with quadrature tables, dof maps, improved normal.
struct Discretization {
  AnalyticSurface surface;
  BaseMesh mesh;
  AssemblyConfig config;
  ReferenceBasis geom_basis, velocity_basis, pressure_basis;
  QuadratureRule quad;
  BasisTab geom_tab, velocity_tab, pressure_tab;
  std::vector<LiftedElement> lifts;
  DofMap dof_velocity, dof_pressure;
  ImprovedNormalField improved_normal;
  double h = 0.0;

  int n_u() const { return 3 * dof_velocity.n_scalar; }
  int n_p() const { return dof_pressure.n_scalar; }
  /// Velocity dofs are component-major: component c of scalar dof s.
  int velocity_dof(int s, int c) const { return c * dof_velocity.n_scalar + s; }

  Discretization(const AnalyticSurface& s)
      : surface(s) {}
};

Discretization build_discretization(const BaseMesh& mesh,
                                    const AnalyticSurface& surface,
                                    const AssemblyConfig& config);

/// The assembled saddle-point system
///   [ A  B^T ] [u]   [rhs_f]
///   [ B   0  ] [p] = [rhs_g]
/// with A = a_h + k_h, B the pressure-gradient form, and the velocity and
/// pressure mass matrices. mean_vec = M_p 1 carries the zero-mean constraint.
struct SaddleSystem {
  SparseMat A, B, M_u, M_p;
  Eigen::VectorXd rhs_f, rhs_g, mean_vec;
  double h = 0.0;
  double eta = 0.0;
  AssemblyConfig config;
  int n_u = 0, n_p = 0;
};

/// mms == nullptr assembles zero right-hand sides. The source g is extended
/// as g(pi(x)) and mean-corrected on the lifted surface so that the system is
/// compatible.
SaddleSystem assemble_system(const Discretization& disc,
                             const ManufacturedCase* mms);

/// E_{T,h} of the vector basis function phi_j e_c at a reference point:
/// the symmetrized projected gradient minus (phi_j n_c) H_h.
Mat3 strain_ET(const Discretization& disc, int element, int local_basis,
               int component, const Eigen::Vector2d& xi);

/// <A u, v> with dimension checks.
double energy_product(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                      const SaddleSystem& system);

/// b_h^*(v, q) = -int div_G v q over the lifted surface.
double apply_b_star(const Discretization& disc, const Eigen::VectorXd& u,
                    const Eigen::VectorXd& q);

/// Exact field with its ambient gradient, for norm evaluation off the
/// discrete spaces.
struct VectorField {
  std::function<Vec3(const Vec3&)> value;
  std::function<Mat3(const Vec3&)> gradient;  // (grad v)_{ic} = d v_i / d x_c
};

struct EnergyNormParts {
  double l2_sq = 0.0;
  double h1_semi_sq = 0.0;
  double normal_sq = 0.0;  // h^-2 weighted, exact normal

  double norm() const { return std::sqrt(l2_sq + h1_semi_sq + normal_sq); }
};

/// |||v|||_k^2 = ||v||_{H1}^2 + h^-2 ||n . v||_{L2}^2 on the lifted surface;
/// the H1 part uses the surface gradients of all three components, the
/// penalty part the exact normal.
EnergyNormParts energy_norm_parts(const Discretization& disc,
                                  const Eigen::VectorXd& u);
EnergyNormParts energy_norm_parts(const Discretization& disc,
                                  const VectorField& field);
double energy_norm(const Discretization& disc, const Eigen::VectorXd& u);
double energy_norm(const Discretization& disc, const VectorField& field);

/// Gram matrix of |||.|||_k on the velocity space (for repeated evaluations).
SparseMat assemble_energy_gram(const Discretization& disc);

/// k_h(u, u): the penalty part of the energy product.
double penalty_product(const Discretization& disc, const SaddleSystem& system,
                       const Eigen::VectorXd& u);

}  // namespace surfstokes
