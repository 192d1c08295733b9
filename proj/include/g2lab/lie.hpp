#pragma once

// Matrices for u(1) and su(2): 1×1 or 2×2 complex, anti-Hermitian in the Lie
// algebra, unitary in the group. The trace form tr(XY) is negative definite.

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>

namespace g2lab {

using cplx = std::complex<double>;
using Lie = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, 0, 2, 2>;

inline Lie lie_zero(int rank) { return Lie::Zero(rank, rank); }
inline Lie lie_identity(int rank) { return Lie::Identity(rank, rank); }

/// su(2) basis τ_a = -(i/2)σ_a, with [τ_a, τ_b] = ε_abc τ_c and tr(τ_a τ_b) = -δ_ab/2.
inline Lie su2_generator(int a) {
  Lie t = lie_zero(2);
  const cplx I(0, 1);
  switch (a) {
  case 1: t(0, 1) = t(1, 0) = -0.5 * I; break;
  case 2: t(0, 1) = -0.5; t(1, 0) = 0.5; break;
  case 3: t(0, 0) = -0.5 * I; t(1, 1) = 0.5 * I; break;
  default: throw std::invalid_argument("su(2) generator index must be 1..3");
  }
  return t;
}

/// i·x as a u(1) element.
inline Lie u1_element(double x) {
  Lie t(1, 1);
  t(0, 0) = cplx(0, x);
  return t;
}

inline Lie commutator(const Lie &a, const Lie &b) { return a * b - b * a; }

/// Traceless anti-Hermitian part (plain anti-Hermitian part for rank 1).
inline Lie project_algebra(const Lie &m) {
  Lie a = 0.5 * (m - m.adjoint());
  if (m.rows() > 1) a -= (a.trace() / double(m.rows())) * lie_identity(int(m.rows()));
  return a;
}

/// exp of an element of u(1) or su(2), in closed form.
inline Lie lie_exp(const Lie &x) {
  if (x.rows() == 1) {
    Lie r(1, 1);
    r(0, 0) = std::exp(x(0, 0));
    return r;
  }
  // x = -i θ n·σ/…; x² = -θ² I for traceless anti-Hermitian x.
  double theta2 = -(x * x).trace().real() / 2.0;
  double theta = std::sqrt(std::max(theta2, 0.0));
  double s = theta < 1e-8 ? 1.0 - theta2 / 6.0 : std::sin(theta) / theta;
  return std::cos(theta) * lie_identity(2) + s * x;
}

/// Nearest group element: phase normalization for U(1), Gram–Schmidt with unit
/// determinant for SU(2).
inline Lie reunitarize(const Lie &u) {
  if (u.rows() == 1) {
    Lie r(1, 1);
    r(0, 0) = u(0, 0) / std::abs(u(0, 0));
    return r;
  }
  // SU(2) matrices have the form [[a, b], [-b*, a*]]; project onto it.
  cplx a = 0.5 * (u(0, 0) + std::conj(u(1, 1)));
  cplx b = 0.5 * (u(0, 1) - std::conj(u(1, 0)));
  double n = std::sqrt(std::norm(a) + std::norm(b));
  a /= n;
  b /= n;
  Lie r(2, 2);
  r << a, b, -std::conj(b), std::conj(a);
  return r;
}

/// max |U†U - I| and |det U - 1| for SU(2).
inline double unitarity_defect(const Lie &u) {
  double d = (u.adjoint() * u - lie_identity(int(u.rows()))).cwiseAbs().maxCoeff();
  if (u.rows() == 2) d = std::max(d, std::abs(u.determinant() - 1.0));
  return d;
}

} // namespace g2lab
