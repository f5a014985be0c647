#include "surfstokes/solver.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <chrono>
#include <cmath>
#include <random>

namespace surfstokes {

namespace {

using Clock = std::chrono::steady_clock;
using ColMajor = Eigen::SparseMatrix<double>;

double seconds_since(const Clock::time_point& start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// y = [A B^T; B 0] x
Eigen::VectorXd apply_saddle(const SaddleSystem& sys, const Eigen::VectorXd& x) {
  Eigen::VectorXd y(sys.n_u + sys.n_p);
  y.head(sys.n_u) =
      sys.A * x.head(sys.n_u) + sys.B.transpose() * x.tail(sys.n_p);
  y.tail(sys.n_p) = sys.B * x.head(sys.n_u);
  return y;
}

}  // namespace

Eigen::VectorXd project_zero_mean(const SaddleSystem& system,
                                  const Eigen::VectorXd& p) {
  const double mass = system.mean_vec.sum();  // <M_p 1, 1>
  return p - (system.mean_vec.dot(p) / mass) * Eigen::VectorXd::Ones(p.size());
}

SolveResult solve_direct(const SaddleSystem& system) {
  const auto start = Clock::now();
  const int nu = system.n_u, np = system.n_p;
  const int n = nu + np + 1;

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(system.A.nonZeros() + 2 * system.B.nonZeros() + 2 * np);
  for (int r = 0; r < system.A.outerSize(); ++r)
    for (SparseMat::InnerIterator it(system.A, r); it; ++it)
      trips.emplace_back(it.row(), it.col(), it.value());
  for (int r = 0; r < system.B.outerSize(); ++r)
    for (SparseMat::InnerIterator it(system.B, r); it; ++it) {
      trips.emplace_back(nu + it.row(), it.col(), it.value());
      trips.emplace_back(it.col(), nu + it.row(), it.value());
    }
  for (int i = 0; i < np; ++i) {
    trips.emplace_back(nu + i, nu + np, system.mean_vec[i]);
    trips.emplace_back(nu + np, nu + i, system.mean_vec[i]);
  }
  ColMajor augmented(n, n);
  augmented.setFromTriplets(trips.begin(), trips.end());

  Eigen::VectorXd rhs(n);
  rhs.head(nu) = system.rhs_f;
  rhs.segment(nu, np) = system.rhs_g;
  rhs[n - 1] = 0.0;

  Eigen::VectorXd solution;
  Eigen::SparseLU<ColMajor> lu;
  lu.compute(augmented);
  if (lu.info() == Eigen::Success) {
    solution = lu.solve(rhs);
  } else if (n <= 5000) {
    // dense fallback with an explicit rank check
    Eigen::MatrixXd dense(augmented);
    Eigen::FullPivLU<Eigen::MatrixXd> flu(dense);
    if (flu.rank() < n)
      throw SingularSystem("saddle system is singular beyond the known kernel");
    solution = flu.solve(rhs);
  } else {
    throw SingularSystem("sparse factorization of the saddle system failed");
  }

  SolveResult result;
  result.u = solution.head(nu);
  result.p = project_zero_mean(system, solution.segment(nu, np));
  result.iterations = 0;
  Eigen::VectorXd b(nu + np);
  b.head(nu) = system.rhs_f;
  b.tail(np) = system.rhs_g;
  Eigen::VectorXd x(nu + np);
  x.head(nu) = result.u;
  x.tail(np) = result.p;
  const double bnorm = b.norm();
  result.relative_residual =
      bnorm > 0.0 ? (apply_saddle(system, x) - b).norm() / bnorm : 0.0;
  result.wall_time_s = seconds_since(start);
  return result;
}

SolveResult solve_minres(const SaddleSystem& system,
                         const MinresOptions& options) {
  const auto start = Clock::now();
  const int nu = system.n_u, np = system.n_p;
  const int n = nu + np;

  // Preconditioner blocks: Q_A (exact factorization or diagonal) and M_p.
  Eigen::SimplicialLDLT<ColMajor> a_solver, mp_solver;
  Eigen::VectorXd a_diag_inv;
  if (options.preconditioner == PrecondA::ExactFactorization) {
    a_solver.compute(ColMajor(system.A));
    if (a_solver.info() != Eigen::Success)
      throw SingularSystem("factorization of the A block failed");
  } else {
    a_diag_inv = system.A.diagonal().cwiseInverse();
    if (!a_diag_inv.allFinite())
      throw SingularSystem("A block has zero diagonal entries");
  }
  mp_solver.compute(ColMajor(system.M_p));
  if (mp_solver.info() != Eigen::Success)
    throw SingularSystem("factorization of the pressure mass matrix failed");

  auto apply_qinv = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd out(n);
    if (options.preconditioner == PrecondA::ExactFactorization)
      out.head(nu) = a_solver.solve(v.head(nu));
    else
      out.head(nu) = a_diag_inv.cwiseProduct(v.head(nu));
    out.tail(np) = mp_solver.solve(v.tail(np));
    return out;
  };
  // Kernel of the saddle matrix: the constant pressure direction.
  auto deflate = [&](Eigen::VectorXd& v) {
    const double mean = v.tail(np).sum() / np;
    v.tail(np).array() -= mean;
  };

  Eigen::VectorXd b(n);
  b.head(nu) = system.rhs_f;
  b.tail(np) = system.rhs_g;
  deflate(b);
  const double bnorm = b.norm();

  SolveResult result;
  if (bnorm == 0.0) {
    result.u = Eigen::VectorXd::Zero(nu);
    result.p = Eigen::VectorXd::Zero(np);
    result.wall_time_s = seconds_since(start);
    return result;
  }

  // Preconditioned MINRES (Paige-Saunders recurrence).
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r1 = b;
  Eigen::VectorXd y = apply_qinv(r1);
  double beta1 = r1.dot(y);
  if (beta1 <= 0.0) throw SingularSystem("preconditioner is not positive");
  beta1 = std::sqrt(beta1);

  double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0;
  double phibar = beta1, cs = -1.0, sn = 0.0;
  Eigen::VectorXd r2 = r1;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd w2 = Eigen::VectorXd::Zero(n);

  bool converged = false;
  int itn = 0;
  result.precond_residual_history.push_back(1.0);
  while (itn < options.max_iterations) {
    ++itn;
    const double s = 1.0 / beta;
    const Eigen::VectorXd v = s * y;
    y = apply_saddle(system, v);
    deflate(y);
    if (itn >= 2) y -= (beta / oldb) * r1;
    const double alfa = v.dot(y);
    y -= (alfa / beta) * r2;
    r1 = r2;
    r2 = y;
    y = apply_qinv(r2);
    oldb = beta;
    beta = r2.dot(y);
    if (beta < 0.0) throw SingularSystem("preconditioner lost positivity");
    beta = std::sqrt(beta);

    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alfa;
    const double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    double gamma = std::hypot(gbar, beta);
    gamma = std::max(gamma, 1e-300);
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar = sn * phibar;

    const Eigen::VectorXd w1 = w2;
    w2 = w;
    w = (v - oldeps * w1 - delta * w2) / gamma;
    x += phi * w;

    result.precond_residual_history.push_back(phibar / beta1);
    if (phibar <= options.tol * beta1) {
      // verify against the true residual before declaring convergence
      const double true_rel = (apply_saddle(system, x) - b).norm() / bnorm;
      if (true_rel <= options.tol) {
        converged = true;
        result.relative_residual = true_rel;
        break;
      }
    }
  }
  if (!converged)
    throw NoConvergence("MINRES did not reach the requested tolerance in " +
                        std::to_string(options.max_iterations) +
                        " iterations");

  result.u = x.head(nu);
  result.p = project_zero_mean(system, x.tail(np));
  result.iterations = itn;
  result.wall_time_s = seconds_since(start);
  return result;
}

namespace {

// Extreme generalized eigenvalues of K x = lambda M x for symmetric K and
// SPD M, by Lanczos in the M inner product with full reorthogonalization.
// An optional deflation vector removes a known kernel direction of K.
struct PencilOps {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> apply_k;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> apply_m;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> solve_m;
};

std::pair<double, double> lanczos_extremes(int n, const PencilOps& ops,
                                           const Eigen::VectorXd* deflate,
                                           double tol, int max_iterations) {
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd q(n);
  for (int i = 0; i < n; ++i) q[i] = gauss(rng);

  Eigen::VectorXd m_deflate;
  double deflate_mass = 0.0;
  if (deflate) {
    m_deflate = ops.apply_m(*deflate);
    deflate_mass = deflate->dot(m_deflate);
  }
  auto project = [&](Eigen::VectorXd& v) {
    if (deflate) v -= (m_deflate.dot(v) / deflate_mass) * (*deflate);
  };
  project(q);

  std::vector<Eigen::VectorXd> basis, m_basis;
  Eigen::VectorXd mq = ops.apply_m(q);
  double norm = std::sqrt(q.dot(mq));
  if (norm <= 0.0) throw EigenFailure("Lanczos start vector vanished");
  q /= norm;
  mq /= norm;
  basis.push_back(q);
  m_basis.push_back(mq);

  std::vector<double> alphas, betas;
  double prev_min = 0.0, prev_max = 0.0;
  for (int j = 0; j < max_iterations; ++j) {
    const Eigen::VectorXd kq = ops.apply_k(basis[j]);
    const double alpha = basis[j].dot(kq);
    Eigen::VectorXd w = ops.solve_m(kq);
    w -= alpha * basis[j];
    if (j > 0) w -= betas[j - 1] * basis[j - 1];
    for (int pass = 0; pass < 2; ++pass)
      for (size_t i = 0; i < basis.size(); ++i)
        w -= m_basis[i].dot(w) * basis[i];
    project(w);
    alphas.push_back(alpha);

    Eigen::VectorXd mw = ops.apply_m(w);
    const double beta = std::sqrt(std::max(w.dot(mw), 0.0));

    // Ritz values of the tridiagonal section
    const int k = static_cast<int>(alphas.size());
    Eigen::VectorXd diag(k), off(std::max(k - 1, 0));
    for (int i = 0; i < k; ++i) diag[i] = alphas[i];
    for (int i = 0; i + 1 < k; ++i) off[i] = betas[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success)
      throw EigenFailure("tridiagonal eigenvalue solve failed");
    const double theta_min = es.eigenvalues()[0];
    const double theta_max = es.eigenvalues()[k - 1];
    const double res_min = beta * std::abs(es.eigenvectors()(k - 1, 0));
    const double res_max = beta * std::abs(es.eigenvectors()(k - 1, k - 1));
    const double scale = std::max(std::abs(theta_min), std::abs(theta_max));

    const bool settled = k > 2 && std::abs(theta_min - prev_min) <= tol * scale &&
                         std::abs(theta_max - prev_max) <= tol * scale;
    if ((res_min <= tol * scale && res_max <= tol * scale && k > 2) ||
        settled || beta <= 1e-14 * scale || k >= n - (deflate ? 1 : 0)) {
      return {theta_min, theta_max};
    }
    prev_min = theta_min;
    prev_max = theta_max;
    betas.push_back(beta);
    basis.push_back(w / beta);
    m_basis.push_back(mw / beta);
  }
  throw EigenFailure("Lanczos did not converge");
}

Eigen::MatrixXd dense_schur(const SaddleSystem& system) {
  Eigen::SimplicialLDLT<ColMajor> a_solver(ColMajor(system.A));
  if (a_solver.info() != Eigen::Success)
    throw EigenFailure("factorization of A failed");
  const Eigen::MatrixXd bt = Eigen::MatrixXd(system.B).transpose();
  Eigen::MatrixXd x(system.n_u, system.n_p);
  for (int c = 0; c < system.n_p; ++c) x.col(c) = a_solver.solve(bt.col(c));
  Eigen::MatrixXd s = Eigen::MatrixXd(system.B) * x;
  return 0.5 * (s + s.transpose());
}

SpectrumEstimate schur_iterative_impl(const SaddleSystem& system) {
  Eigen::SimplicialLDLT<ColMajor> a_solver(ColMajor(system.A));
  if (a_solver.info() != Eigen::Success)
    throw EigenFailure("factorization of A failed");
  const ColMajor mp(system.M_p);
  Eigen::SimplicialLDLT<ColMajor> mp_solver(mp);
  if (mp_solver.info() != Eigen::Success)
    throw EigenFailure("factorization of M_p failed");
  PencilOps ops;
  ops.apply_k = [&](const Eigen::VectorXd& v) {
    return Eigen::VectorXd(system.B *
                           a_solver.solve(system.B.transpose() * v));
  };
  ops.apply_m = [&](const Eigen::VectorXd& v) {
    return Eigen::VectorXd(mp * v);
  };
  ops.solve_m = [&](const Eigen::VectorXd& v) { return mp_solver.solve(v); };
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(system.n_p);
  const auto [mn, mx] = lanczos_extremes(system.n_p, ops, &ones, 1e-8,
                                         std::min(system.n_p, 600));
  SpectrumEstimate est;
  est.min = mn;
  est.max = mx;
  est.method = SpectrumEstimate::Method::Iterative;
  if (!(est.min > 0.0))
    throw EigenFailure("Schur spectrum lost positivity");
  return est;
}

SpectrumEstimate a_condition_iterative_impl(const SaddleSystem& system) {
  const ColMajor a(system.A), mu(system.M_u);
  Eigen::SimplicialLDLT<ColMajor> a_solver(a), mu_solver(mu);
  if (a_solver.info() != Eigen::Success || mu_solver.info() != Eigen::Success)
    throw EigenFailure("factorization failed");
  SpectrumEstimate est;
  est.method = SpectrumEstimate::Method::Iterative;
  {
    PencilOps ops;
    ops.apply_k = [&](const Eigen::VectorXd& v) {
      return Eigen::VectorXd(a * v);
    };
    ops.apply_m = [&](const Eigen::VectorXd& v) {
      return Eigen::VectorXd(mu * v);
    };
    ops.solve_m = [&](const Eigen::VectorXd& v) { return mu_solver.solve(v); };
    est.max = lanczos_extremes(system.n_u, ops, nullptr, 1e-8,
                               std::min(system.n_u, 600))
                  .second;
  }
  {
    // the smallest eigenvalue of (A, M_u) is 1/max of the flipped pencil
    PencilOps ops;
    ops.apply_k = [&](const Eigen::VectorXd& v) {
      return Eigen::VectorXd(mu * v);
    };
    ops.apply_m = [&](const Eigen::VectorXd& v) {
      return Eigen::VectorXd(a * v);
    };
    ops.solve_m = [&](const Eigen::VectorXd& v) { return a_solver.solve(v); };
    const double flipped_max =
        lanczos_extremes(system.n_u, ops, nullptr, 1e-8,
                         std::min(system.n_u, 600))
            .second;
    est.min = 1.0 / flipped_max;
  }
  if (!(est.min > 0.0 && est.min <= est.max))
    throw EigenFailure("A spectrum estimate is inconsistent");
  return est;
}

}  // namespace

SpectrumEstimate schur_spectrum(const SaddleSystem& system) {
  if (system.n_p > 4000) return schur_iterative_impl(system);
  const Eigen::MatrixXd s = dense_schur(system);
  const Eigen::MatrixXd mp(system.M_p);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(s, mp);
  if (ges.info() != Eigen::Success)
    throw EigenFailure("generalized eigenvalue solve failed");
  const auto& ev = ges.eigenvalues();
  const double largest = ev[system.n_p - 1];
  // the constant pressure is a structural kernel vector of S
  if (std::abs(ev[0]) > 1e-8 * largest)
    throw EigenFailure("constant-pressure kernel of S not found");
  SpectrumEstimate est;
  est.min = ev[1];
  est.max = largest;
  est.method = SpectrumEstimate::Method::Dense;
  return est;
}

SpectrumEstimate a_condition(const SaddleSystem& system) {
  if (system.n_u > 4000) return a_condition_iterative_impl(system);
  const Eigen::MatrixXd a(system.A);
  const Eigen::MatrixXd mu(system.M_u);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(a, mu);
  if (ges.info() != Eigen::Success)
    throw EigenFailure("generalized eigenvalue solve failed");
  SpectrumEstimate est;
  est.min = ges.eigenvalues()[0];
  est.max = ges.eigenvalues()[system.n_u - 1];
  est.method = SpectrumEstimate::Method::Dense;
  return est;
}

SpectrumEstimate schur_spectrum_iterative(const SaddleSystem& system) {
  return schur_iterative_impl(system);
}

SpectrumEstimate a_condition_iterative(const SaddleSystem& system) {
  return a_condition_iterative_impl(system);
}

}  // namespace surfstokes
