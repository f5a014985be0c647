#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "surfstokes/assembly.hpp"
#include "surfstokes/error_eval.hpp"
#include "test_util.hpp"

using namespace surfstokes;

namespace {

Discretization make_disc(const AnalyticSurface& surface, int level, int k,
                         int m, PenaltyNormal pn = PenaltyNormal::Improved) {
  BaseMesh mesh = build_base_mesh(surface);
  for (int l = 0; l < level; ++l) mesh = refine(mesh, surface);
  AssemblyConfig config;
  config.geom_degree = k;
  config.velocity_degree = m;
  config.penalty_normal = pn;
  return build_discretization(mesh, surface, config);
}

// combined E_{T,h} of an FE velocity at a reference point of one element
Mat3 combined_strain(const Discretization& disc, const Eigen::VectorXd& u,
                     int element, const Eigen::Vector2d& xi) {
  Mat3 e = Mat3::Zero();
  for (int c = 0; c < 3; ++c)
    for (int j = 0; j < disc.velocity_basis.n_nodes; ++j) {
      const double coeff = u[disc.velocity_dof(
          disc.dof_velocity.element_dofs(element, j), c)];
      if (coeff != 0.0) e += coeff * strain_ET(disc, element, j, c, xi);
    }
  return e;
}

double max_abs(const SparseMat& m) {
  double v = 0.0;
  for (int r = 0; r < m.outerSize(); ++r)
    for (SparseMat::InnerIterator it(m, r); it; ++it)
      v = std::max(v, std::abs(it.value()));
  return v;
}

}  // namespace

TEST_CASE("strain_ET is symmetric and vanishes for in-plane constants") {
  const auto s = AnalyticSurface::sphere(1.0);
  const auto disc = make_disc(s, 1, 2, 2);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uni(0.05, 0.3);
  for (int trial = 0; trial < 20; ++trial) {
    const int t = trial % disc.mesh.n_triangles();
    const Eigen::Vector2d xi(uni(rng), uni(rng));
    const Mat3 e = strain_ET(disc, t, trial % disc.velocity_basis.n_nodes,
                             trial % 3, xi);
    CHECK((e - e.transpose()).norm() <= 1e-14);
  }

  // flat element (k=1): a constant field in the triangle plane has E_{T,h}=0
  const auto flat = make_disc(s, 0, 1, 2);
  for (int t = 0; t < 5; ++t) {
    const Vec3 nf = flat.lifts[t].flat_normal();
    const Vec3 c = (Mat3::Identity() - nf * nf.transpose()) * Vec3(0.3, -1.2, 0.7);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(flat.n_u());
    for (int j = 0; j < flat.velocity_basis.n_nodes; ++j)
      for (int comp = 0; comp < 3; ++comp)
        u[flat.velocity_dof(flat.dof_velocity.element_dofs(t, j), comp)] =
            c[comp];
    const Mat3 e = combined_strain(flat, u, t, Eigen::Vector2d(0.3, 0.4));
    CHECK(e.norm() <= 1e-13 * c.norm());
  }
}

TEST_CASE("interpolated Killing field has vanishing discrete strain") {
  const auto s = AnalyticSurface::sphere(1.0);
  const auto mms = killing_case(s);
  std::vector<double> energies, hs;
  for (int level = 1; level <= 3; ++level) {
    const auto disc = make_disc(s, level, 2, 2);
    const Eigen::VectorXd u = interpolate_velocity(disc, mms.velocity);
    // ||E_{T,h}(u_I)||_{L2}^2 by quadrature over a few sample points per
    // element (the integrand is smooth; sampling suffices for the rate)
    const auto rule = quadrature(4);
    double total = 0.0;
    for (int t = 0; t < disc.mesh.n_triangles(); ++t) {
      const auto lifted = lift_quad_data(disc.lifts[t], disc.geom_tab, false);
      for (int q = 0; q < rule.n_points(); ++q) {
        const Eigen::Vector2d xi = rule.points.row(q);
        const Mat3 e = combined_strain(disc, u, t, xi);
        total += rule.weights[q] * e.squaredNorm();
      }
      (void)lifted;
    }
    energies.push_back(std::sqrt(total));
    hs.push_back(disc.h);
  }
  CHECK(test_util::ls_order(energies, hs) >= 2.0 - 0.3);  // min(m,k) = 2
}

TEST_CASE("algebraic identities of the assembled system") {
  const auto sphere = AnalyticSurface::sphere(1.0);
  const auto torus = AnalyticSurface::torus(2.0, 0.5);
  const auto mms = killing_case(sphere);

  auto check_system = [](const Discretization& disc, const SaddleSystem& sys) {
    CHECK(is_symmetric(sys.A));
    CHECK(is_symmetric(sys.M_u));
    CHECK(is_symmetric(sys.M_p));
    // B^T 1 = 0: the gradient of the constant pressure vanishes
    const Eigen::VectorXd bt1 =
        sys.B.transpose() * Eigen::VectorXd::Ones(sys.n_p);
    CHECK(bt1.lpNorm<Eigen::Infinity>() <= 1e-12 * max_abs(sys.B));
    // SPD mass and stiffness blocks
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt_mp(
        Eigen::SparseMatrix<double>(sys.M_p));
    CHECK(llt_mp.info() == Eigen::Success);
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt_a(
        Eigen::SparseMatrix<double>(sys.A));
    CHECK(llt_a.info() == Eigen::Success);
    CHECK(sys.eta == doctest::Approx(1.0 / (disc.h * disc.h)).epsilon(1e-14));
  };

  {
    const auto disc = make_disc(sphere, 1, 2, 2);
    const auto sys = assemble_system(disc, &mms);
    check_system(disc, sys);
    // compatible right-hand side: sum of rhs_g vanishes after the mean shift
    CHECK(std::abs(sys.rhs_g.sum()) <=
          1e-12 * std::max(sys.rhs_g.lpNorm<Eigen::Infinity>(), 1e-30));
  }
  {
    const auto disc = make_disc(sphere, 1, 1, 2);
    const auto sys = assemble_system(disc, &mms);
    check_system(disc, sys);
  }
  {
    const auto disc = make_disc(torus, 1, 2, 2);
    const auto sys = assemble_system(disc, nullptr);
    check_system(disc, sys);
    CHECK(sys.rhs_f.norm() == 0.0);
    CHECK(sys.rhs_g.norm() == 0.0);
  }
  {
    // Remark-style variant: discrete penalty normal with eta = 1/h
    auto disc = make_disc(sphere, 1, 2, 2, PenaltyNormal::Discrete);
    AssemblyConfig cfg = disc.config;
    cfg.penalty_exponent = 1;
    const auto disc2 = build_discretization(disc.mesh, sphere, cfg);
    const auto sys = assemble_system(disc2, &mms);
    CHECK(is_symmetric(sys.A));
    CHECK(sys.eta == doctest::Approx(1.0 / disc2.h).epsilon(1e-14));
  }
}

TEST_CASE("assembly configuration errors") {
  const auto s = AnalyticSurface::sphere(1.0);
  const auto mesh = build_base_mesh(s);
  AssemblyConfig config;
  config.velocity_degree = 1;
  CHECK_THROWS_AS(build_discretization(mesh, s, config), ConfigError);
  config.velocity_degree = 2;
  config.geom_degree = 3;  // improved normal needs m >= k
  CHECK_THROWS_AS(build_discretization(mesh, s, config), ConfigError);
  config.penalty_normal = PenaltyNormal::Discrete;
  CHECK_NOTHROW(build_discretization(mesh, s, config));
}

TEST_CASE("b_h versus b_h*: the discrepancy decays at first order") {
  const auto s = AnalyticSurface::sphere(1.0);
  // A pairing that does not vanish: b(P e1, x1) = int |P e1|^2 > 0. (Both
  // manufactured velocities pair to zero with x1 x2 x3 by parity, which
  // would reduce the quotient to roundoff noise.)
  auto v_field = [](const Vec3& x) { return Vec3(Vec3(1, 0, 0) - x[0] * x); };
  auto q_field = [](const Vec3& x) { return x[0]; };
  std::vector<double> ratios, hs;
  for (int level = 1; level <= 3; ++level) {
    const auto disc = make_disc(s, level, 2, 2);
    const auto sys = assemble_system(disc, nullptr);
    const Eigen::VectorXd v = interpolate_velocity(disc, v_field);
    const Eigen::VectorXd q = interpolate_pressure(disc, q_field);
    const double b_h = q.dot(sys.B * v);
    CHECK(std::abs(b_h) > 1.0);
    const double b_star = apply_b_star(disc, v, q);
    const double v_norm = energy_norm(disc, v);
    const double q_norm = std::sqrt(q.dot(sys.M_p * q));
    ratios.push_back(std::abs(b_h - b_star) / (v_norm * q_norm));
    hs.push_back(disc.h);
  }
  CHECK(test_util::ls_order(ratios, hs) >= 1.0);
  // b_h(v, const) = 0 while b_h*(v, const) is generally nonzero
  const auto mms = killing_case(s);
  const auto disc = make_disc(s, 1, 2, 2);
  const auto sys = assemble_system(disc, nullptr);
  const Eigen::VectorXd v = interpolate_velocity(disc, mms.velocity);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(disc.n_p());
  CHECK(std::abs(ones.dot(sys.B * v)) <= 1e-11 * v.norm());
}

TEST_CASE("energy norm: zero field, constants, exact tangential fields") {
  const auto s = AnalyticSurface::sphere(1.0);
  const auto disc = make_disc(s, 2, 2, 2);

  CHECK(energy_norm(disc, Eigen::VectorXd::Zero(disc.n_u())) == 0.0);

  // constant field (1,0,0): the L2+H1 part approaches |Gamma| = 4 pi
  Eigen::VectorXd constant = Eigen::VectorXd::Zero(disc.n_u());
  constant.head(disc.dof_velocity.n_scalar).setOnes();
  const auto parts = energy_norm_parts(disc, constant);
  CHECK(std::abs(parts.l2_sq + parts.h1_semi_sq - 4.0 * M_PI) < 1e-2);
  CHECK(parts.normal_sq > 0.0);

  // exact tangential field: the normal part vanishes identically
  const auto mms = killing_case(s);
  VectorField field;
  field.value = [&](const Vec3& x) { return mms.velocity_extension(x); };
  field.gradient = [&](const Vec3& x) {
    return mms.velocity_extension_gradient(x);
  };
  const auto exact_parts = energy_norm_parts(disc, field);
  CHECK(exact_parts.normal_sq <= 1e-20 * exact_parts.l2_sq);
}

TEST_CASE("energy gram matrix reproduces the quadrature norm") {
  const auto s = AnalyticSurface::sphere(1.0);
  const auto disc = make_disc(s, 1, 2, 2);
  const SparseMat gram = assemble_energy_gram(disc);
  CHECK(is_symmetric(gram));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd u(disc.n_u());
    for (int i = 0; i < u.size(); ++i) u[i] = gauss(rng);
    const double via_gram = std::sqrt(u.dot(gram * u));
    const double via_quadrature = energy_norm(disc, u);
    CHECK(via_gram == doctest::Approx(via_quadrature).epsilon(1e-11));
  }
}

TEST_CASE("penalty consistency: k_h of an interpolated tangential field") {
  const auto s = AnalyticSurface::sphere(1.0);
  // The polynomial case is the generic probe here. For the rotation field
  // k_h(u_I, u_I) vanishes identically: (e3 x a).b is antisymmetric, so the
  // interpolant is discretely orthogonal to the interpolated normal.
  const auto mms = polynomial_case(s);
  const auto rotation = killing_case(s);
  std::vector<double> penalties, hs;
  for (int level = 1; level <= 3; ++level) {
    const auto disc = make_disc(s, level, 2, 2);
    const auto sys = assemble_system(disc, nullptr);
    const Eigen::VectorXd u = interpolate_velocity(disc, mms.velocity);
    penalties.push_back(penalty_product(disc, sys, u));
    hs.push_back(disc.h);
    const Eigen::VectorXd rot = interpolate_velocity(disc, rotation.velocity);
    CHECK(penalty_product(disc, sys, rot) <= 1e-20);
  }
  CHECK(test_util::ls_order(penalties, hs) >= 2.0 * 2 - 0.4);  // order 2k
}

TEST_CASE("coercivity and continuity of A_h against the energy norm") {
  const auto s = AnalyticSurface::sphere(1.0);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss;
  std::vector<double> lower, upper;
  for (int level = 1; level <= 2; ++level) {
    const auto disc = make_disc(s, level, 2, 2);
    const auto sys = assemble_system(disc, nullptr);
    const SparseMat gram = assemble_energy_gram(disc);
    double c = 1e300, C = 0.0;
    for (int trial = 0; trial < 40; ++trial) {
      Eigen::VectorXd u(disc.n_u());
      for (int i = 0; i < u.size(); ++i) u[i] = gauss(rng);
      const double ratio = u.dot(sys.A * u) / u.dot(gram * u);
      c = std::min(c, ratio);
      C = std::max(C, ratio);
    }
    CHECK(c > 0.0);
    lower.push_back(c);
    upper.push_back(C);
  }
  CHECK(std::abs(lower[1] - lower[0]) <= 0.5 * lower[0]);
  CHECK(std::abs(upper[1] - upper[0]) <= 0.5 * upper[0]);
}

TEST_CASE("assembly is deterministic and thread-count independent") {
  const auto s = AnalyticSurface::sphere(1.0);
  const auto mms = killing_case(s);
  auto assemble_with = [&](int threads) {
    BaseMesh mesh = refine(build_base_mesh(s), s);
    AssemblyConfig config;
    config.threads = threads;
    const auto disc = build_discretization(mesh, s, config);
    return assemble_system(disc, &mms);
  };
  const auto sys1 = assemble_with(1);
  const auto sys2 = assemble_with(1);
  const auto sys4 = assemble_with(4);
  auto identical = [](const SparseMat& a, const SparseMat& b) {
    if (a.nonZeros() != b.nonZeros()) return false;
    for (int i = 0; i < a.nonZeros(); ++i) {
      if (a.valuePtr()[i] != b.valuePtr()[i]) return false;
      if (a.innerIndexPtr()[i] != b.innerIndexPtr()[i]) return false;
    }
    return true;
  };
  CHECK(identical(sys1.A, sys2.A));
  CHECK(identical(sys1.A, sys4.A));
  CHECK(identical(sys1.B, sys4.B));
  CHECK(sys1.rhs_f == sys2.rhs_f);
  CHECK(sys1.rhs_f == sys4.rhs_f);
  CHECK(sys1.rhs_g == sys4.rhs_g);
}

TEST_CASE("matrix market export layout") {
  const auto s = AnalyticSurface::sphere(1.0);
  const auto disc = make_disc(s, 0, 1, 2);
  const auto sys = assemble_system(disc, nullptr);
  std::ostringstream out;
  write_matrix_market(sys.M_p, out);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("%%MatrixMarket matrix coordinate real", 0) == 0);
  int rows = 0, cols = 0;
  long nnz = 0;
  in >> rows >> cols >> nnz;
  CHECK(rows == sys.n_p);
  CHECK(cols == sys.n_p);
  CHECK(nnz == sys.M_p.nonZeros());
  int r = 0, c = 0;
  double v = 0.0;
  long count = 0;
  double sum = 0.0;
  while (in >> r >> c >> v) {
    CHECK(r >= 1);
    CHECK(r <= rows);
    ++count;
    sum += v;
  }
  CHECK(count == nnz);
  // entries of the pressure mass matrix sum to the flat icosahedron area
  const double edge_sq = 16.0 / (10.0 + 2.0 * std::sqrt(5.0));
  const double icosahedron_area = 5.0 * std::sqrt(3.0) * edge_sq;
  CHECK(sum == doctest::Approx(icosahedron_area).epsilon(1e-12));
}

TEST_CASE("energy_product validates dimensions") {
  const auto s = AnalyticSurface::sphere(1.0);
  const auto disc = make_disc(s, 0, 1, 2);
  const auto sys = assemble_system(disc, nullptr);
  const Eigen::VectorXd good = Eigen::VectorXd::Zero(disc.n_u());
  const Eigen::VectorXd bad = Eigen::VectorXd::Zero(disc.n_u() + 1);
  CHECK(energy_product(good, good, sys) == 0.0);
  CHECK_THROWS_AS(energy_product(bad, good, sys), DimensionMismatch);
  CHECK_THROWS_AS(apply_b_star(disc, bad, Eigen::VectorXd::Zero(disc.n_p())),
                  DimensionMismatch);
}
