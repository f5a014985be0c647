#pragma once

#include "surfstokes/assembly.hpp"
#include "surfstokes/solver.hpp"

namespace surfstokes {

struct ErrorReport {
  double energy_error = 0.0;  // |||u^e - u_h|||_k
  double pressure_l2 = 0.0;   // with the L2-optimal constant shift
  double velocity_l2 = 0.0;   // informational
  double tangential_h1 = 0.0;  // informational
  int level = 0;
  double h = 0.0;
  int n_u = 0;
  int n_p = 0;
};

/// Errors of a discrete solution against the manufactured fields, integrated
/// with the assembly quadrature on the lifted surface. The pressure error
/// removes the measure-mismatch constant (both representatives are mean-zero
/// in different measures).
ErrorReport eval_errors(const SolveResult& result, const ManufacturedCase& mms,
                        const Discretization& disc);

/// Nodal interpolants of exact fields into the discrete spaces. The fields
/// take points on the exact surface; nodes are evaluated through the
/// closest-point map.
Eigen::VectorXd interpolate_velocity(
    const Discretization& disc, const std::function<Vec3(const Vec3&)>& field);
Eigen::VectorXd interpolate_pressure(
    const Discretization& disc,
    const std::function<double(const Vec3&)>& field);

}  // namespace surfstokes
