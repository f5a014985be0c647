#include "surfstokes/assembly.hpp"

#include <cmath>
#include <ostream>

#include "surfstokes/parallel.hpp"

namespace surfstokes {

bool is_symmetric(const SparseMat& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  SparseMat diff = SparseMat(m.transpose()) - m;
  double max_abs = 0.0, max_diff = 0.0;
  for (int r = 0; r < m.outerSize(); ++r)
    for (SparseMat::InnerIterator it(m, r); it; ++it)
      max_abs = std::max(max_abs, std::abs(it.value()));
  for (int r = 0; r < diff.outerSize(); ++r)
    for (SparseMat::InnerIterator it(diff, r); it; ++it)
      max_diff = std::max(max_diff, std::abs(it.value()));
  return max_diff <= rel_tol * std::max(max_abs, 1e-300);
}

void write_matrix_market(const SparseMat& m, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  out.precision(17);
  for (int r = 0; r < m.outerSize(); ++r)
    for (SparseMat::InnerIterator it(m, r); it; ++it)
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
  if (!out) throw IoError("failed to write MatrixMarket output");
}

Discretization build_discretization(const BaseMesh& mesh,
                                    const AnalyticSurface& surface,
                                    const AssemblyConfig& config) {
  if (config.velocity_degree < 2)
    throw ConfigError("Taylor-Hood requires velocity degree m >= 2");
  if (config.penalty_normal == PenaltyNormal::Improved &&
      config.velocity_degree < config.geom_degree)
    throw ConfigError("the improved penalty normal requires m >= k");
  Discretization disc(surface);
  disc.mesh = mesh;
  disc.config = config;
  disc.geom_basis = reference_basis(config.geom_degree);
  disc.velocity_basis = reference_basis(config.velocity_degree);
  disc.pressure_basis = reference_basis(config.velocity_degree - 1);
  const int exactness = config.quadrature_exactness > 0
                            ? config.quadrature_exactness
                            : 2 * config.velocity_degree + 2 * config.geom_degree;
  disc.quad = quadrature(exactness);
  disc.geom_tab = tabulate(disc.geom_basis, disc.quad, /*with_hessians=*/true);
  disc.velocity_tab = tabulate(disc.velocity_basis, disc.quad);
  disc.pressure_tab = tabulate(disc.pressure_basis, disc.quad);
  disc.lifts = lift_all_elements(mesh, surface, config.geom_degree);
  disc.dof_velocity = build_dofmap(mesh, config.velocity_degree);
  disc.dof_pressure = build_dofmap(mesh, config.velocity_degree - 1);
  if (config.velocity_degree >= config.geom_degree)
    disc.improved_normal =
        build_improved_normal(surface, disc.lifts, disc.dof_velocity,
                              disc.velocity_basis, disc.geom_basis);
  disc.h = mesh.h_max;
  return disc;
}

namespace {

// E_{T,h} of the basis function phi e_c from pointwise pieces: the projected
// symmetrized gradient minus the normal-component curvature term.
inline Mat3 strain_et_term(const Mat3& tangential_projector,
                           const Mat3& weingarten, const Vec3& normal,
                           const Vec3& surface_grad, double value, int c) {
  const Vec3 pc = tangential_projector.col(c);
  Mat3 e = 0.5 * (pc * surface_grad.transpose() + surface_grad * pc.transpose());
  e -= (value * normal[c]) * weingarten;
  return e;
}

// Per-point element data shared by the assembly loops.
struct PointData {
  double weight = 0.0;  // quadrature weight times area element
  Vec3 x;
  Vec3 normal;
  Mat3 projector;
  Mat3 weingarten;
  Vec3 nhat;
  Eigen::Matrix<double, 3, Eigen::Dynamic> vel_grad;   // per local basis fn
  Eigen::Matrix<double, 3, Eigen::Dynamic> pres_grad;
};

PointData point_data(const Discretization& disc, int t,
                     const LiftQuadData& lifted, int q) {
  PointData pd;
  pd.weight = disc.quad.weights[q] * lifted.mu[q];
  pd.x = lifted.x.row(q);
  pd.normal = lifted.normal.row(q);
  pd.projector = Mat3::Identity() - pd.normal * pd.normal.transpose();
  pd.weingarten =
      lifted.weingarten.empty() ? Mat3::Zero() : lifted.weingarten[q];

  const Eigen::Matrix2d metric = lifted.J[q].transpose() * lifted.J[q];
  const Eigen::Matrix<double, 3, 2> push =
      lifted.J[q] * metric.inverse();
  pd.vel_grad = push * disc.velocity_tab.grad[q].transpose();
  pd.pres_grad = push * disc.pressure_tab.grad[q].transpose();

  if (disc.config.penalty_normal == PenaltyNormal::Improved) {
    Vec3 nh = Vec3::Zero();
    for (int j = 0; j < disc.velocity_basis.n_nodes; ++j)
      nh += disc.velocity_tab.val(q, j) *
            disc.improved_normal.coeffs
                .row(disc.dof_velocity.element_dofs(t, j))
                .transpose();
    pd.nhat = nh;
  } else {
    pd.nhat = pd.normal;
  }
  return pd;
}

}  // namespace

SaddleSystem assemble_system(const Discretization& disc,
                             const ManufacturedCase* mms) {
  const int nv = disc.velocity_basis.n_nodes;
  const int np = disc.pressure_basis.n_nodes;
  const int n_elem = disc.mesh.n_triangles();
  const int nq = disc.quad.n_points();
  const int ns = disc.dof_velocity.n_scalar;

  SaddleSystem sys;
  sys.config = disc.config;
  sys.h = disc.h;
  sys.eta = std::pow(disc.h, -disc.config.penalty_exponent);
  sys.n_u = disc.n_u();
  sys.n_p = disc.n_p();

  // Mean correction of the source: g_h = g(pi(x)) - (int g / area).
  double g_shift = 0.0;
  if (mms) {
    std::vector<double> g_int(n_elem, 0.0), area(n_elem, 0.0);
    parallel_for(
        n_elem,
        [&](int t) {
          const LiftQuadData lifted =
              lift_quad_data(disc.lifts[t], disc.geom_tab, false);
          double gi = 0.0, ai = 0.0;
          for (int q = 0; q < nq; ++q) {
            const double w = disc.quad.weights[q] * lifted.mu[q];
            gi += w * mms->source(closest_point(disc.surface, lifted.x.row(q)));
            ai += w;
          }
          g_int[t] = gi;
          area[t] = ai;
        },
        disc.config.threads);
    double g_total = 0.0, area_total = 0.0;
    for (int t = 0; t < n_elem; ++t) {
      g_total += g_int[t];
      area_total += area[t];
    }
    g_shift = g_total / area_total;
  }

  using Triplet = Eigen::Triplet<double>;
  const int a_per = 3 * nv * 3 * nv;
  const int mu_per = 3 * nv * nv;
  const int b_per = np * 3 * nv;
  const int mp_per = np * np;
  std::vector<Triplet> a_trip(static_cast<size_t>(n_elem) * a_per);
  std::vector<Triplet> mu_trip(static_cast<size_t>(n_elem) * mu_per);
  std::vector<Triplet> b_trip(static_cast<size_t>(n_elem) * b_per);
  std::vector<Triplet> mp_trip(static_cast<size_t>(n_elem) * mp_per);
  std::vector<Eigen::VectorXd> f_local(n_elem), g_local(n_elem);

  parallel_for(
      n_elem,
      [&](int t) {
        const LiftQuadData lifted =
            lift_quad_data(disc.lifts[t], disc.geom_tab,
                           disc.config.geom_degree > 1);
        Eigen::MatrixXd a_loc = Eigen::MatrixXd::Zero(3 * nv, 3 * nv);
        Eigen::MatrixXd mu_loc = Eigen::MatrixXd::Zero(nv, nv);
        Eigen::MatrixXd b_loc = Eigen::MatrixXd::Zero(np, 3 * nv);
        Eigen::MatrixXd mp_loc = Eigen::MatrixXd::Zero(np, np);
        Eigen::VectorXd f_loc = Eigen::VectorXd::Zero(3 * nv);
        Eigen::VectorXd g_loc = Eigen::VectorXd::Zero(np);
        std::vector<Mat3> strain(3 * nv);

        for (int q = 0; q < nq; ++q) {
          const PointData pd = point_data(disc, t, lifted, q);
          const auto& vval = disc.velocity_tab.val;
          const auto& pval = disc.pressure_tab.val;

          for (int c = 0; c < 3; ++c)
            for (int j = 0; j < nv; ++j)
              strain[c * nv + j] =
                  strain_et_term(pd.projector, pd.weingarten, pd.normal,
                                 pd.vel_grad.col(j), vval(q, j), c);

          // velocity-velocity blocks
          for (int bc = 0; bc < 3; ++bc) {
            for (int i = 0; i < nv; ++i) {
              const int row = bc * nv + i;
              for (int cc = bc; cc < 3; ++cc) {
                for (int j = (cc == bc ? i : 0); j < nv; ++j) {
                  const int col = cc * nv + j;
                  const double et = strain[row].cwiseProduct(strain[col]).sum();
                  const double zero_order =
                      pd.projector(bc, cc) * vval(q, i) * vval(q, j);
                  const double penalty = sys.eta * pd.nhat[bc] * pd.nhat[cc] *
                                         vval(q, i) * vval(q, j);
                  const double v = pd.weight * (et + zero_order + penalty);
                  a_loc(row, col) += v;
                  if (row != col) a_loc(col, row) += v;
                }
              }
            }
          }
          for (int i = 0; i < nv; ++i)
            for (int j = i; j < nv; ++j) {
              const double v = pd.weight * vval(q, i) * vval(q, j);
              mu_loc(i, j) += v;
              if (i != j) mu_loc(j, i) += v;
            }
          for (int i = 0; i < np; ++i) {
            for (int c = 0; c < 3; ++c)
              for (int j = 0; j < nv; ++j)
                b_loc(i, c * nv + j) +=
                    pd.weight * vval(q, j) * pd.pres_grad(c, i);
            for (int j = i; j < np; ++j) {
              const double v = pd.weight * pval(q, i) * pval(q, j);
              mp_loc(i, j) += v;
              if (i != j) mp_loc(j, i) += v;
            }
          }
          if (mms) {
            const Vec3 pi_x = closest_point(disc.surface, pd.x);
            const Vec3 f = mms->forcing(pi_x);
            const double g = mms->source(pi_x) - g_shift;
            for (int c = 0; c < 3; ++c)
              for (int j = 0; j < nv; ++j)
                f_loc[c * nv + j] += pd.weight * f[c] * vval(q, j);
            for (int i = 0; i < np; ++i)
              g_loc[i] -= pd.weight * g * pval(q, i);
          }
        }

        // scatter into the preallocated slices (deterministic order)
        std::array<int, 16> vdofs{};  // nv <= 15 for m <= 4
        for (int j = 0; j < nv; ++j)
          vdofs[j] = disc.dof_velocity.element_dofs(t, j);
        size_t base = static_cast<size_t>(t) * a_per;
        for (int bc = 0; bc < 3; ++bc)
          for (int i = 0; i < nv; ++i)
            for (int cc = 0; cc < 3; ++cc)
              for (int j = 0; j < nv; ++j)
                a_trip[base++] =
                    Triplet(disc.velocity_dof(vdofs[i], bc),
                            disc.velocity_dof(vdofs[j], cc),
                            a_loc(bc * nv + i, cc * nv + j));
        base = static_cast<size_t>(t) * mu_per;
        for (int c = 0; c < 3; ++c)
          for (int i = 0; i < nv; ++i)
            for (int j = 0; j < nv; ++j)
              mu_trip[base++] = Triplet(disc.velocity_dof(vdofs[i], c),
                                        disc.velocity_dof(vdofs[j], c),
                                        mu_loc(i, j));
        base = static_cast<size_t>(t) * b_per;
        for (int i = 0; i < np; ++i)
          for (int c = 0; c < 3; ++c)
            for (int j = 0; j < nv; ++j)
              b_trip[base++] = Triplet(disc.dof_pressure.element_dofs(t, i),
                                       disc.velocity_dof(vdofs[j], c),
                                       b_loc(i, c * nv + j));
        base = static_cast<size_t>(t) * mp_per;
        for (int i = 0; i < np; ++i)
          for (int j = 0; j < np; ++j)
            mp_trip[base++] = Triplet(disc.dof_pressure.element_dofs(t, i),
                                      disc.dof_pressure.element_dofs(t, j),
                                      mp_loc(i, j));
        f_local[t] = f_loc;
        g_local[t] = g_loc;
      },
      disc.config.threads);

  sys.A.resize(sys.n_u, sys.n_u);
  sys.A.setFromTriplets(a_trip.begin(), a_trip.end());
  sys.M_u.resize(sys.n_u, sys.n_u);
  sys.M_u.setFromTriplets(mu_trip.begin(), mu_trip.end());
  sys.B.resize(sys.n_p, sys.n_u);
  sys.B.setFromTriplets(b_trip.begin(), b_trip.end());
  sys.M_p.resize(sys.n_p, sys.n_p);
  sys.M_p.setFromTriplets(mp_trip.begin(), mp_trip.end());

  sys.rhs_f = Eigen::VectorXd::Zero(sys.n_u);
  sys.rhs_g = Eigen::VectorXd::Zero(sys.n_p);
  for (int t = 0; t < n_elem; ++t) {
    for (int c = 0; c < 3; ++c)
      for (int j = 0; j < nv; ++j)
        sys.rhs_f[disc.velocity_dof(disc.dof_velocity.element_dofs(t, j), c)] +=
            f_local[t][c * nv + j];
    for (int i = 0; i < np; ++i)
      sys.rhs_g[disc.dof_pressure.element_dofs(t, i)] += g_local[t][i];
  }

  sys.mean_vec = sys.M_p * Eigen::VectorXd::Ones(sys.n_p);
  return sys;
}

Mat3 strain_ET(const Discretization& disc, int element, int local_basis,
               int component, const Eigen::Vector2d& xi) {
  const LiftPoint lp = eval_lift(disc.lifts[element], disc.geom_basis, xi);
  const Mat3 projector = Mat3::Identity() - lp.normal * lp.normal.transpose();
  const Mat3 weingarten =
      discrete_weingarten(disc.lifts[element], disc.geom_basis, xi);
  const Eigen::VectorXd val = disc.velocity_basis.values(xi);
  const auto grad_ref = disc.velocity_basis.gradients(xi);
  const Eigen::Matrix2d metric = lp.J.transpose() * lp.J;
  const Vec3 surface_grad =
      lp.J * metric.ldlt().solve(grad_ref.row(local_basis).transpose());
  return strain_et_term(projector, weingarten, lp.normal, surface_grad,
                        val[local_basis], component);
}

double energy_product(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                      const SaddleSystem& system) {
  if (u.size() != system.n_u || v.size() != system.n_u)
    throw DimensionMismatch("energy_product expects velocity-sized vectors");
  return u.dot(system.A * v);
}

double apply_b_star(const Discretization& disc, const Eigen::VectorXd& u,
                    const Eigen::VectorXd& q) {
  if (u.size() != disc.n_u() || q.size() != disc.n_p())
    throw DimensionMismatch("apply_b_star expects (velocity, pressure) sizes");
  const int nv = disc.velocity_basis.n_nodes;
  const int np = disc.pressure_basis.n_nodes;
  const int n_elem = disc.mesh.n_triangles();
  std::vector<double> partial(n_elem, 0.0);
  parallel_for(
      n_elem,
      [&](int t) {
        const LiftQuadData lifted =
            lift_quad_data(disc.lifts[t], disc.geom_tab, false);
        double acc = 0.0;
        for (int qp = 0; qp < disc.quad.n_points(); ++qp) {
          const PointData pd = point_data(disc, t, lifted, qp);
          // div v = trace of the component-wise surface gradients
          double div = 0.0;
          for (int c = 0; c < 3; ++c)
            for (int j = 0; j < nv; ++j)
              div += u[disc.velocity_dof(disc.dof_velocity.element_dofs(t, j),
                                         c)] *
                     pd.vel_grad(c, j);
          double qval = 0.0;
          for (int i = 0; i < np; ++i)
            qval += q[disc.dof_pressure.element_dofs(t, i)] *
                    disc.pressure_tab.val(qp, i);
          acc -= pd.weight * div * qval;
        }
        partial[t] = acc;
      },
      disc.config.threads);
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

namespace {

template <typename ValueGrad>
EnergyNormParts integrate_energy_norm(const Discretization& disc,
                                      ValueGrad&& eval_point) {
  const int n_elem = disc.mesh.n_triangles();
  std::vector<EnergyNormParts> partial(n_elem);
  parallel_for(
      n_elem,
      [&](int t) {
        const LiftQuadData lifted =
            lift_quad_data(disc.lifts[t], disc.geom_tab, false);
        EnergyNormParts acc;
        for (int q = 0; q < disc.quad.n_points(); ++q) {
          const double w = disc.quad.weights[q] * lifted.mu[q];
          const Vec3 x = lifted.x.row(q);
          Vec3 value;
          Mat3 grad;  // rows are surface gradients of the components
          eval_point(t, q, lifted, value, grad);
          acc.l2_sq += w * value.squaredNorm();
          acc.h1_semi_sq += w * grad.squaredNorm();
          const Vec3 n_exact = exact_normal_extension(disc.surface, x);
          const double un = n_exact.dot(value);
          acc.normal_sq += w * un * un;
        }
        partial[t] = acc;
      },
      disc.config.threads);
  EnergyNormParts total;
  for (const auto& p : partial) {
    total.l2_sq += p.l2_sq;
    total.h1_semi_sq += p.h1_semi_sq;
    total.normal_sq += p.normal_sq;
  }
  total.normal_sq /= disc.h * disc.h;
  return total;
}

}  // namespace

EnergyNormParts energy_norm_parts(const Discretization& disc,
                                  const Eigen::VectorXd& u) {
  if (u.size() != disc.n_u())
    throw DimensionMismatch("energy norm expects a velocity vector");
  const int nv = disc.velocity_basis.n_nodes;
  return integrate_energy_norm(
      disc, [&](int t, int q, const LiftQuadData& lifted, Vec3& value,
                Mat3& grad) {
        const Eigen::Matrix2d metric = lifted.J[q].transpose() * lifted.J[q];
        const Eigen::Matrix<double, 3, 2> push = lifted.J[q] * metric.inverse();
        value.setZero();
        grad.setZero();
        for (int c = 0; c < 3; ++c) {
          Eigen::Vector2d gr = Eigen::Vector2d::Zero();
          for (int j = 0; j < nv; ++j) {
            const double coeff =
                u[disc.velocity_dof(disc.dof_velocity.element_dofs(t, j), c)];
            value[c] += coeff * disc.velocity_tab.val(q, j);
            gr += coeff * disc.velocity_tab.grad[q].row(j).transpose();
          }
          grad.row(c) = (push * gr).transpose();
        }
      });
}

EnergyNormParts energy_norm_parts(const Discretization& disc,
                                  const VectorField& field) {
  return integrate_energy_norm(
      disc, [&](int /*t*/, int q, const LiftQuadData& lifted, Vec3& value,
                Mat3& grad) {
        const Vec3 x = lifted.x.row(q);
        const Vec3 nh = lifted.normal.row(q);
        const Mat3 ph = Mat3::Identity() - nh * nh.transpose();
        value = field.value(x);
        grad = field.gradient(x) * ph;  // project each component gradient
      });
}

double energy_norm(const Discretization& disc, const Eigen::VectorXd& u) {
  return energy_norm_parts(disc, u).norm();
}

double energy_norm(const Discretization& disc, const VectorField& field) {
  return energy_norm_parts(disc, field).norm();
}

SparseMat assemble_energy_gram(const Discretization& disc) {
  const int nv = disc.velocity_basis.n_nodes;
  const int n_elem = disc.mesh.n_triangles();
  const int nq = disc.quad.n_points();
  const double inv_h2 = 1.0 / (disc.h * disc.h);
  using Triplet = Eigen::Triplet<double>;
  const int per = 3 * nv * 3 * nv;
  std::vector<Triplet> trips(static_cast<size_t>(n_elem) * per);
  parallel_for(
      n_elem,
      [&](int t) {
        const LiftQuadData lifted =
            lift_quad_data(disc.lifts[t], disc.geom_tab, false);
        Eigen::MatrixXd loc = Eigen::MatrixXd::Zero(3 * nv, 3 * nv);
        for (int q = 0; q < nq; ++q) {
          const double w = disc.quad.weights[q] * lifted.mu[q];
          const Eigen::Matrix2d metric = lifted.J[q].transpose() * lifted.J[q];
          const Eigen::Matrix<double, 3, 2> push =
              lifted.J[q] * metric.inverse();
          const Eigen::Matrix<double, 3, Eigen::Dynamic> grads =
              push * disc.velocity_tab.grad[q].transpose();
          const Vec3 n_exact =
              exact_normal_extension(disc.surface, lifted.x.row(q));
          for (int bc = 0; bc < 3; ++bc)
            for (int i = 0; i < nv; ++i)
              for (int cc = 0; cc < 3; ++cc)
                for (int j = 0; j < nv; ++j) {
                  double v = inv_h2 * n_exact[bc] * n_exact[cc] *
                             disc.velocity_tab.val(q, i) *
                             disc.velocity_tab.val(q, j);
                  if (bc == cc)
                    v += disc.velocity_tab.val(q, i) *
                             disc.velocity_tab.val(q, j) +
                         grads.col(i).dot(grads.col(j));
                  loc(bc * nv + i, cc * nv + j) += w * v;
                }
        }
        size_t base = static_cast<size_t>(t) * per;
        for (int bc = 0; bc < 3; ++bc)
          for (int i = 0; i < nv; ++i)
            for (int cc = 0; cc < 3; ++cc)
              for (int j = 0; j < nv; ++j)
                trips[base++] = Triplet(
                    disc.velocity_dof(disc.dof_velocity.element_dofs(t, i), bc),
                    disc.velocity_dof(disc.dof_velocity.element_dofs(t, j), cc),
                    loc(bc * nv + i, cc * nv + j));
      },
      disc.config.threads);
  SparseMat gram(disc.n_u(), disc.n_u());
  gram.setFromTriplets(trips.begin(), trips.end());
  return gram;
}

double penalty_product(const Discretization& disc, const SaddleSystem& system,
                       const Eigen::VectorXd& u) {
  if (u.size() != disc.n_u())
    throw DimensionMismatch("penalty_product expects a velocity vector");
  const int nv = disc.velocity_basis.n_nodes;
  const int n_elem = disc.mesh.n_triangles();
  std::vector<double> partial(n_elem, 0.0);
  parallel_for(
      n_elem,
      [&](int t) {
        const LiftQuadData lifted =
            lift_quad_data(disc.lifts[t], disc.geom_tab, false);
        double acc = 0.0;
        for (int q = 0; q < disc.quad.n_points(); ++q) {
          const PointData pd = point_data(disc, t, lifted, q);
          Vec3 value = Vec3::Zero();
          for (int c = 0; c < 3; ++c)
            for (int j = 0; j < nv; ++j)
              value[c] +=
                  u[disc.velocity_dof(disc.dof_velocity.element_dofs(t, j),
                                      c)] *
                  disc.velocity_tab.val(q, j);
          const double un = pd.nhat.dot(value);
          acc += pd.weight * un * un;
        }
        partial[t] = acc;
      },
      disc.config.threads);
  double total = 0.0;
  for (double v : partial) total += v;
  return system.eta * total;
}

}  // namespace surfstokes
