#pragma once

#include <vector>

#include "surfstokes/assembly.hpp"

namespace surfstokes {

struct SolveResult {
  Eigen::VectorXd u;
  Eigen::VectorXd p;  // satisfies <M_p p, 1> = 0
  int iterations = 0;  // 0 for the direct solver
  double relative_residual = 0.0;
  double wall_time_s = 0.0;
  // preconditioned residual estimates per MINRES iteration (monotone)
  std::vector<double> precond_residual_history;
};

/// Direct solve of the singular saddle system with one extra Lagrange
/// multiplier row carrying mean_vec, which pins <M_p p, 1> = 0.
SolveResult solve_direct(const SaddleSystem& system);

enum class PrecondA { ExactFactorization, Diagonal };

struct MinresOptions {
  PrecondA preconditioner = PrecondA::ExactFactorization;
  double tol = 1e-10;  // relative residual of the saddle system
  int max_iterations = 4000;
};

/// MINRES on the singular system with the block preconditioner
/// Q = diag(Q_A, M_p). The right-hand side and the Krylov vectors are kept
/// orthogonal to the kernel (0, 1); the returned pressure is projected onto
/// the zero-mean subspace.
SolveResult solve_minres(const SaddleSystem& system,
                         const MinresOptions& options = {});

struct SpectrumEstimate {
  double min = 0.0;
  double max = 0.0;
  enum class Method { Dense, Iterative } method = Method::Dense;
};

/// Extreme generalized eigenvalues of (S, M_p) with S = B A^-1 B^T,
/// restricted to the complement of the constant pressure. Dense for
/// n_p <= 4000, Lanczos with full reorthogonalization beyond.
SpectrumEstimate schur_spectrum(const SaddleSystem& system);

/// Extreme generalized eigenvalues of (A, M_u).
SpectrumEstimate a_condition(const SaddleSystem& system);

/// Removes the M_p-mean from a pressure vector.
Eigen::VectorXd project_zero_mean(const SaddleSystem& system,
                                  const Eigen::VectorXd& p);

/// Forces the iterative spectrum path regardless of size (used to
/// cross-check the dense path).
SpectrumEstimate schur_spectrum_iterative(const SaddleSystem& system);
SpectrumEstimate a_condition_iterative(const SaddleSystem& system);

}  // namespace surfstokes
