#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "surfstokes/fe_space.hpp"
#include "surfstokes/param_lift.hpp"
#include "test_util.hpp"

using namespace surfstokes;

namespace {

// exact integral of xi1^a xi2^b over the reference triangle
double monomial_integral(int a, int b) {
  auto factorial = [](int n) {
    double f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  };
  return factorial(a) * factorial(b) / factorial(a + b + 2);
}

Eigen::Vector2d random_ref_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double a = uni(rng), b = uni(rng);
  if (a + b > 1.0) {
    a = 1.0 - a;
    b = 1.0 - b;
  }
  return {a, b};
}

}  // namespace

TEST_CASE("reference basis: node counts and point values") {
  CHECK(reference_basis(2).n_nodes == 6);
  CHECK(reference_basis(3).n_nodes == 10);
  CHECK_THROWS_AS(reference_basis(0), UnsupportedDegree);
  CHECK_THROWS_AS(reference_basis(5), UnsupportedDegree);

  const auto p1 = reference_basis(1);
  const auto v = p1.values(Eigen::Vector2d(1.0 / 3.0, 1.0 / 3.0));
  for (int j = 0; j < 3; ++j) CHECK(v[j] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("reference basis: partition of unity, Kronecker, gradient sum") {
  std::mt19937_64 rng(3);
  for (int m = 1; m <= 4; ++m) {
    const auto basis = reference_basis(m);
    for (int trial = 0; trial < 50; ++trial) {
      const auto xi = random_ref_point(rng);
      CHECK(std::abs(basis.values(xi).sum() - 1.0) <= 1e-14);
      const auto grads = basis.gradients(xi);
      CHECK(grads.colwise().sum().norm() <= 1e-13);
      CHECK(basis.hessians(xi).colwise().sum().norm() <= 1e-12);
    }
    for (int i = 0; i < basis.n_nodes; ++i) {
      const auto vals = basis.values(basis.nodes.row(i));
      for (int j = 0; j < basis.n_nodes; ++j)
        CHECK(std::abs(vals[j] - (i == j ? 1.0 : 0.0)) <= 1e-13);
    }
  }
}

TEST_CASE("quadrature: special cases and invariants") {
  const auto r1 = quadrature(1);
  CHECK(r1.n_points() == 1);
  CHECK(r1.points(0, 0) == doctest::Approx(1.0 / 3.0));
  CHECK(r1.weights[0] == doctest::Approx(0.5));

  CHECK_THROWS_AS(quadrature(21), UnsupportedExactness);

  for (int e : {1, 2, 3, 4, 5, 8, 12, 16, 20}) {
    const auto rule = quadrature(e);
    CHECK(rule.exactness >= e);
    CHECK(std::abs(rule.weights.sum() - 0.5) <= 1e-14);
    for (int q = 0; q < rule.n_points(); ++q) {
      CHECK(rule.weights[q] > 0.0);
      CHECK(rule.points(q, 0) >= -1e-15);
      CHECK(rule.points(q, 1) >= -1e-15);
      CHECK(rule.points(q, 0) + rule.points(q, 1) <= 1.0 + 1e-15);
    }
  }
}

TEST_CASE("quadrature: exact on monomials up to the exactness degree") {
  for (int e : {2, 4, 7, 10, 14, 20}) {
    const auto rule = quadrature(e);
    for (int a = 0; a <= e; ++a) {
      for (int b = 0; a + b <= e; ++b) {
        double sum = 0;
        for (int q = 0; q < rule.n_points(); ++q)
          sum += rule.weights[q] * std::pow(rule.points(q, 0), a) *
                 std::pow(rule.points(q, 1), b);
        CHECK(std::abs(sum - monomial_integral(a, b)) <= 1e-14);
      }
    }
  }
  // the spec's spot value: exactness 4 integrates xi1^2 xi2^2 to 1/180
  CHECK(monomial_integral(2, 2) == doctest::Approx(1.0 / 180.0));
}

TEST_CASE("dof map dimensions") {
  const auto s = AnalyticSurface::sphere(1.0);
  auto mesh = build_base_mesh(s);
  CHECK(build_dofmap(mesh, 1).n_scalar == 12);
  CHECK(build_dofmap(mesh, 2).n_scalar == 42);
  CHECK(3 * build_dofmap(mesh, 2).n_scalar == 126);
  for (int level = 0; level < 4; ++level) mesh = refine(mesh, s);
  CHECK(mesh.n_vertices() == 2562);
  CHECK(mesh.n_edges() == 7680);
  CHECK(mesh.n_triangles() == 5120);
  CHECK(build_dofmap(mesh, 2).n_scalar == 10242);
}

TEST_CASE("dof map: shared edges get identical global dofs from both sides") {
  const auto s = AnalyticSurface::sphere(1.0);
  const auto mesh = refine(build_base_mesh(s), s);
  for (int m = 2; m <= 4; ++m) {
    const auto dof = build_dofmap(mesh, m);
    // collect the dof set each triangle assigns to each of its edges
    std::vector<std::set<int>> edge_sets(mesh.n_edges());
    std::vector<int> count(mesh.n_edges(), 0);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
      for (int sloc = 0; sloc < 3; ++sloc) {
        std::set<int> dofs;
        for (int j = 1; j < m; ++j)
          dofs.insert(dof.element_dofs(t, 3 + sloc * (m - 1) + (j - 1)));
        const int e = mesh.tri_edges[t][sloc];
        if (count[e] == 0)
          edge_sets[e] = dofs;
        else
          CHECK(edge_sets[e] == dofs);
        ++count[e];
      }
    }
    for (int c : count) CHECK(c == 2);
    // every dof index is in range and the map covers the space exactly
    std::set<int> all;
    for (int t = 0; t < mesh.n_triangles(); ++t)
      for (int j = 0; j < dof.n_local(); ++j) {
        const int g = dof.element_dofs(t, j);
        CHECK(g >= 0);
        CHECK(g < dof.n_scalar);
        all.insert(g);
      }
    CHECK(static_cast<int>(all.size()) == dof.n_scalar);
  }
}

TEST_CASE("eval_fe: constants, linears on flat elements, tangentiality") {
  const auto s = AnalyticSurface::sphere(1.0);
  const auto mesh = build_base_mesh(s);
  const auto lifts = lift_all_elements(mesh, s, 1);
  const auto geom_basis = reference_basis(1);
  const auto basis = reference_basis(2);
  const auto dof = build_dofmap(mesh, 2);

  std::mt19937_64 rng(11);
  // constant function: value reproduced, zero surface gradient
  Eigen::VectorXd ones = Eigen::VectorXd::Constant(dof.n_scalar, 3.25);
  for (int trial = 0; trial < 20; ++trial) {
    const auto xi = random_ref_point(rng);
    const auto fe = eval_fe(ones, dof, 0, lifts[0], basis, geom_basis, xi);
    CHECK(fe.value == doctest::Approx(3.25).epsilon(1e-13));
    CHECK(fe.surface_gradient.norm() <= 1e-12);
  }

  // interpolant of x1 on a flat element: gradient is P e1
  Eigen::VectorXd coeffs(dof.n_scalar);
  // nodal positions of the degree-2 space on the flat (k=1) elements
  for (int t = 0; t < mesh.n_triangles(); ++t)
    for (int j = 0; j < basis.n_nodes; ++j) {
      const Vec3 pos = lifts[t].chart(basis.nodes.row(j));
      coeffs[dof.element_dofs(t, j)] = pos[0];
    }
  for (int t = 0; t < 5; ++t) {
    const Vec3 nf = lifts[t].flat_normal();
    const Vec3 expected =
        (Mat3::Identity() - nf * nf.transpose()) * Vec3(1, 0, 0);
    const auto xi = random_ref_point(rng);
    const auto fe = eval_fe(coeffs, dof, t, lifts[t], basis, geom_basis, xi);
    CHECK((fe.surface_gradient - expected).norm() <= 1e-12);
    CHECK(std::abs(nf.dot(fe.surface_gradient)) <= 1e-12);

    // finite differences along two tangent directions of the flat triangle
    const Vec3 t1 = (lifts[t].flat_vertices[1] - lifts[t].flat_vertices[0]);
    const Eigen::Vector2d d1(1e-6, 0);
    const auto fp = eval_fe(coeffs, dof, t, lifts[t], basis, geom_basis,
                            xi + d1);
    const auto fm = eval_fe(coeffs, dof, t, lifts[t], basis, geom_basis,
                            xi - d1);
    const double directional = (fp.value - fm.value) / 2e-6;
    CHECK(directional ==
          doctest::Approx(fe.surface_gradient.dot(t1)).epsilon(1e-5));
  }
}

TEST_CASE("fe function continuity across shared edges") {
  const auto s = AnalyticSurface::sphere(1.0);
  const auto mesh = refine(build_base_mesh(s), s);
  const int k = 2, m = 3;
  const auto lifts = lift_all_elements(mesh, s, k);
  const auto geom_basis = reference_basis(k);
  const auto basis = reference_basis(m);
  const auto dof = build_dofmap(mesh, m);

  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd coeffs(dof.n_scalar);
  for (int i = 0; i < dof.n_scalar; ++i) coeffs[i] = gauss(rng);

  // evaluate from both sides of every fifth edge at 5 points
  for (int e = 0; e < mesh.n_edges(); e += 5) {
    const auto& edge = mesh.edges[e];
    for (int sample = 1; sample <= 5; ++sample) {
      const double u = sample / 6.0;
      double values[2];
      for (int side = 0; side < 2; ++side) {
        const int t = edge.tri[side];
        const auto& tri = mesh.triangles[t];
        int sloc = -1;
        for (int sidx = 0; sidx < 3; ++sidx)
          if (mesh.tri_edges[t][sidx] == e) sloc = sidx;
        REQUIRE(sloc >= 0);
        const int a = tri[sloc];
        // parameter measured from the smaller global vertex id
        const double ulocal = (a == edge.v[0]) ? u : 1.0 - u;
        static const Eigen::Vector2d ref_v[3] = {
            {0, 0}, {1, 0}, {0, 1}};
        const Eigen::Vector2d xi =
            ref_v[sloc] + ulocal * (ref_v[(sloc + 1) % 3] - ref_v[sloc]);
        values[side] =
            eval_fe(coeffs, dof, t, lifts[t], basis, geom_basis, xi).value;
      }
      CHECK(std::abs(values[0] - values[1]) <= 1e-12);
    }
  }
}

TEST_CASE("nodal interpolation converges at orders m+1 (L2) and m (H1)") {
  const auto s = AnalyticSurface::sphere(1.0);
  auto f = [](const Vec3& x) { return std::exp(x[0]) * x[1] + x[2] * x[2]; };
  const int k = 2;
  for (int m : {2, 3}) {
    std::vector<double> l2_errors, h1_errors, hs;
    auto mesh = build_base_mesh(s);
    for (int level = 1; level <= 3; ++level) {
      mesh = refine(mesh, s);
      const auto lifts = lift_all_elements(mesh, s, k);
      const auto geom_basis = reference_basis(k);
      const auto basis = reference_basis(m);
      const auto dof = build_dofmap(mesh, m);
      const auto rule = quadrature(2 * m + 2 * k);
      const auto geom_tab = tabulate(geom_basis, rule);
      const auto tab = tabulate(basis, rule);

      Eigen::VectorXd coeffs(dof.n_scalar);
      for (int t = 0; t < mesh.n_triangles(); ++t)
        for (int j = 0; j < basis.n_nodes; ++j) {
          const auto lp = eval_lift(lifts[t], geom_basis, basis.nodes.row(j));
          coeffs[dof.element_dofs(t, j)] = f(closest_point(s, lp.x));
        }

      double l2 = 0, h1 = 0;
      for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto data = lift_quad_data(lifts[t], geom_tab, false);
        for (int q = 0; q < rule.n_points(); ++q) {
          const Vec3 x = data.x.row(q);
          const auto g = geometric_data(s, x);
          // exact surface value and tangential gradient of the extension
          const double fx = f(g.pi_x);
          const double eps = 1e-6;
          Vec3 grad_f;
          for (int c = 0; c < 3; ++c) {
            Vec3 e = Vec3::Zero();
            e[c] = eps;
            grad_f[c] = (f(closest_point(s, x + e)) -
                         f(closest_point(s, x - e))) /
                        (2 * eps);
          }
          const Mat3 ph =
              Mat3::Identity() -
              Vec3(data.normal.row(q)) * Vec3(data.normal.row(q)).transpose();
          const Vec3 grad_exact = ph * grad_f;

          double val = 0;
          Eigen::Vector2d grad_ref = Eigen::Vector2d::Zero();
          for (int j = 0; j < basis.n_nodes; ++j) {
            const double c = coeffs[dof.element_dofs(t, j)];
            val += c * tab.val(q, j);
            grad_ref += c * tab.grad[q].row(j).transpose();
          }
          const Eigen::Matrix2d metric = data.J[q].transpose() * data.J[q];
          const Vec3 grad_fe = data.J[q] * metric.ldlt().solve(grad_ref);

          const double w = rule.weights[q] * data.mu[q];
          l2 += w * (val - fx) * (val - fx);
          h1 += w * (grad_fe - grad_exact).squaredNorm();
        }
      }
      l2_errors.push_back(std::sqrt(l2));
      h1_errors.push_back(std::sqrt(h1));
      hs.push_back(mesh.h_max);
    }
    const double l2_order = test_util::ls_order(l2_errors, hs);
    const double h1_order = test_util::ls_order(h1_errors, hs);
    CHECK(l2_order > m + 1 - 0.5);
    CHECK(h1_order > m - 0.5);
  }
}
