#pragma once

#include <Eigen/Dense>
#include <array>
#include <map>
#include <vector>

namespace surfstokes::detail {

// Trivariate polynomial with exact coefficient arithmetic at construction
// time. Used to build manufactured solutions: every surface operator applied
// to an ambient polynomial field stays polynomial once the projector
// P(x) = I - x x^T / R^2 is written out, so exact solutions and forcing terms
// evaluate to machine precision without a symbolic-algebra dependency.
class Poly3 {
 public:
  Poly3() = default;
  explicit Poly3(double c) {
    if (c != 0.0) terms_[{0, 0, 0}] = c;
  }
  static Poly3 monomial(int i, int j, int k, double c = 1.0) {
    Poly3 p;
    if (c != 0.0) p.terms_[{i, j, k}] = c;
    return p;
  }
  static Poly3 coordinate(int axis) {
    std::array<int, 3> e{0, 0, 0};
    e[axis] = 1;
    Poly3 p;
    p.terms_[e] = 1.0;
    return p;
  }

  Poly3& operator+=(const Poly3& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  Poly3& operator-=(const Poly3& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  friend Poly3 operator+(Poly3 a, const Poly3& b) { return a += b; }
  friend Poly3 operator-(Poly3 a, const Poly3& b) { return a -= b; }
  friend Poly3 operator*(const Poly3& a, const Poly3& b) {
    Poly3 out;
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_)
        out.add_term({ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]}, ca * cb);
    return out;
  }
  friend Poly3 operator*(double s, Poly3 p) {
    for (auto& [e, c] : p.terms_) c *= s;
    return p;
  }
  Poly3 operator-() const { return -1.0 * *this; }

  Poly3 derivative(int axis) const {
    Poly3 out;
    for (const auto& [e, c] : terms_) {
      if (e[axis] == 0) continue;
      std::array<int, 3> d = e;
      d[axis] -= 1;
      out.add_term(d, c * e[axis]);
    }
    return out;
  }

  double eval(const Eigen::Vector3d& x) const {
    int maxdeg = 0;
    for (const auto& [e, c] : terms_)
      maxdeg = std::max({maxdeg, e[0], e[1], e[2]});
    std::array<std::vector<double>, 3> pow;
    for (int a = 0; a < 3; ++a) {
      pow[a].assign(maxdeg + 1, 1.0);
      for (int d = 1; d <= maxdeg; ++d) pow[a][d] = pow[a][d - 1] * x[a];
    }
    double sum = 0.0;
    for (const auto& [e, c] : terms_)
      sum += c * pow[0][e[0]] * pow[1][e[1]] * pow[2][e[2]];
    return sum;
  }

 private:
  void add_term(const std::array<int, 3>& e, double c) {
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      if (c != 0.0) terms_[e] = c;
    } else {
      it->second += c;
      if (it->second == 0.0) terms_.erase(it);
    }
  }

  std::map<std::array<int, 3>, double> terms_;
};

using PolyVec = std::array<Poly3, 3>;
using PolyMat = std::array<std::array<Poly3, 3>, 3>;  // [row][col]

inline PolyVec poly_position() {
  return {Poly3::coordinate(0), Poly3::coordinate(1), Poly3::coordinate(2)};
}

// (jac v)[i][c] = d v_i / d x_c
inline PolyMat poly_jacobian(const PolyVec& v) {
  PolyMat j;
  for (int i = 0; i < 3; ++i)
    for (int c = 0; c < 3; ++c) j[i][c] = v[i].derivative(c);
  return j;
}

inline PolyVec poly_gradient(const Poly3& p) {
  return {p.derivative(0), p.derivative(1), p.derivative(2)};
}

inline PolyVec poly_matvec(const PolyMat& m, const PolyVec& v) {
  PolyVec out;
  for (int i = 0; i < 3; ++i)
    out[i] = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2];
  return out;
}

inline PolyMat poly_matmul(const PolyMat& a, const PolyMat& b) {
  PolyMat out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
  return out;
}

inline Poly3 poly_trace(const PolyMat& m) { return m[0][0] + m[1][1] + m[2][2]; }

inline Eigen::Vector3d eval(const PolyVec& v, const Eigen::Vector3d& x) {
  return {v[0].eval(x), v[1].eval(x), v[2].eval(x)};
}

inline Eigen::Matrix3d eval(const PolyMat& m, const Eigen::Vector3d& x) {
  Eigen::Matrix3d out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out(i, j) = m[i][j].eval(x);
  return out;
}

}  // namespace surfstokes::detail
