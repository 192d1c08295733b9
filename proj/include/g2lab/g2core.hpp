#pragma once

// G2-structures on R^7: the model 3-form, its metric and coassociative dual,
// and the Λ² = Λ²_7 ⊕ Λ²_14 splitting via T_φ(η) = ⋆(η ∧ φ).

#include "g2lab/exterior.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>
#include <string>

namespace g2lab {

/// The 3-form is not stable: its associated bilinear form is not definite.
class NonStableFormError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// T_φ could not be split into two clean eigenspaces of dimensions 7 and 14.
class EigenSplitError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// ω_1 = e12 - e34, ω_2 = e13 - e42, ω_3 = e14 - e23 on R^dim (dim 4 or 7).
/// With the orientation e1234 these span the -1 eigenspace of ⋆; they are the
/// fiber directions of the standard structure.
template <class S> ConstForm<S> omega(int k, int dim = 4) {
  static const int pairs[3][4] = {{1, 2, 3, 4}, {1, 3, 4, 2}, {1, 4, 2, 3}};
  const int *p = pairs[k - 1];
  return ConstForm<S>::basis_form(dim, {p[0], p[1]}) - ConstForm<S>::basis_form(dim, {p[2], p[3]});
}

/// The complementary forms e12 + e34, e13 + e42, e14 + e23 (⋆ω̄ = ω̄ for e1234).
template <class S> ConstForm<S> omega_bar(int k, int dim = 4) {
  static const int pairs[3][4] = {{1, 2, 3, 4}, {1, 3, 4, 2}, {1, 4, 2, 3}};
  const int *p = pairs[k - 1];
  return ConstForm<S>::basis_form(dim, {p[0], p[1]}) + ConstForm<S>::basis_form(dim, {p[2], p[3]});
}

/// φ_0 = e567 + ω_1∧e5 + ω_2∧e6 + ω_3∧e7.
template <class S> ConstForm<S> standard_phi() {
  ConstForm<S> phi = ConstForm<S>::basis_form(7, {5, 6, 7});
  for (int k = 1; k <= 3; ++k) phi += wedge(omega<S>(k, 7), ConstForm<S>::basis_form(7, {4 + k}));
  return phi;
}

template <class S> struct InducedMetric {
  Metric<S> metric;
  Orientation orientation; ///< always e1...e7
  ConstForm<S> vol;
  int form_sign = 1; ///< sign s with s·B positive definite
};

/// The symmetric matrix B_uv = (1/6) [(e_u⌟φ)∧(e_v⌟φ)∧φ]_{1..7}.
template <class S> Matrix<S> phi_bilinear(const ConstForm<S> &phi) {
  if (phi.dim() != 7 || phi.degree() != 3) throw DimensionError("expected a 3-form on R^7");
  std::vector<ConstForm<S>> contractions;
  for (int u = 1; u <= 7; ++u) contractions.push_back(interior(unit_vector<S>(7, u), phi));
  Matrix<S> B(7, 7);
  for (int u = 0; u < 7; ++u)
    for (int v = u; v < 7; ++v) {
      S c = top_coefficient(wedge(wedge(contractions[u], contractions[v]), phi)) / S(6);
      B(u, v) = c;
      B(v, u) = c;
    }
  return B;
}

/// Metric and volume form determined by a stable 3-form:
/// s<u,v> vol = (1/6)(u⌟φ)∧(v⌟φ)∧φ, normalized via g = sB / det(sB)^{1/9}
/// where s = ±1 makes B definite. The orientation of R^7 is kept fixed as
/// e1...e7; for φ0 itself s = -1, and the eigenvalue signs of T_φ are then
/// read off rather than assumed.
template <class S> InducedMetric<S> metric_from_phi(const ConstForm<S> &phi) {
  Matrix<S> B = phi_bilinear(phi);
  int sign = 0;
  if constexpr (ScalarTraits<S>::exact) {
    for (int s : {1, -1}) {
      bool definite = true;
      for (int k = 1; k <= 7 && definite; ++k) {
        std::vector<int> idx(k);
        for (int i = 0; i < k; ++i) idx[i] = i;
        definite = (B * S(s)).submatrix(idx, idx).determinant() > 0;
      }
      if (definite) {
        sign = s;
        break;
      }
    }
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B.to_eigen());
    const auto &ev = es.eigenvalues();
    double scale = ev.cwiseAbs().sum();
    if (ev.minCoeff() > 1e-10 * scale)
      sign = 1;
    else if (ev.maxCoeff() < -1e-10 * scale)
      sign = -1;
  }
  if (sign == 0)
    throw NonStableFormError("3-form is not stable: bilinear form B is not definite "
                             "(smallest eigenvalue relative to trace below 1e-10)");
  Matrix<S> Bp = B * S(sign);
  S root = ScalarTraits<S>::root(Bp.determinant(), 9);
  Matrix<S> g = Bp * (S(1) / root);
  ConstForm<S> vol(7, 7);
  vol.add(MultiIndex(0x7f), root);
  return {Metric<S>(g), Orientation::positive(), vol, sign};
}

/// A stable 3-form together with everything derived from it.
template <class S> struct G2Structure {
  ConstForm<S> phi;
  Metric<S> metric;
  Orientation orientation;
  ConstForm<S> vol;
  ConstForm<S> star_phi;
  S lambda7 = S(0), lambda14 = S(0);
  Matrix<S> t_matrix; ///< T_φ on Λ² (21×21, lexicographic basis)
  Matrix<S> p7, p14;  ///< orthogonal projectors onto Λ²_7 and Λ²_14
};

template <class S> ConstForm<S> t_phi(const ConstForm<S> &eta2, const G2Structure<S> &s) {
  if (eta2.degree() != 2 || eta2.dim() != 7) throw DimensionError("t_phi expects a 2-form on R^7");
  return hodge(wedge(eta2, s.phi), s.metric, s.orientation);
}

template <class S> ConstForm<S> l_star_phi(const ConstForm<S> &eta2, const G2Structure<S> &s) {
  if (eta2.degree() != 2 || eta2.dim() != 7) throw DimensionError("l_star_phi expects a 2-form on R^7");
  return wedge(eta2, s.star_phi);
}

namespace detail {

template <class S> Matrix<S> t_matrix_of(const ConstForm<S> &phi, const Metric<S> &g, Orientation o) {
  return operator_matrix<S>(7, 2, 2, [&](const ConstForm<S> &e) { return hodge(wedge(e, phi), g, o); });
}

} // namespace detail

/// Build the full G2Structure: metric, ⋆φ, eigenvalues of T_φ and the projectors.
/// Exact scalars read λ_7 off T(e_1⌟φ) and verify the minimal polynomial exactly;
/// doubles use a dense eigensolver with a 1e-8 gap requirement.
template <class S> G2Structure<S> eigen_split(const ConstForm<S> &phi) {
  auto [metric, orientation, vol, form_sign] = metric_from_phi(phi);
  G2Structure<S> s;
  s.phi = phi;
  s.metric = metric;
  s.orientation = orientation;
  s.vol = vol;
  s.star_phi = hodge(phi, metric, orientation);
  s.t_matrix = detail::t_matrix_of(phi, metric, orientation);
  const Matrix<S> &T = s.t_matrix;
  const Matrix<S> I = Matrix<S>::identity(21);

  if constexpr (ScalarTraits<S>::exact) {
    ConstForm<S> v = interior(unit_vector<S>(7, 1), phi);
    ConstForm<S> tv = apply_matrix(T, v, 2);
    auto it = v.terms().begin();
    if (it == v.terms().end()) throw EigenSplitError("e_1 ⌟ φ vanishes");
    S lam = tv.coeff(it->first) / it->second;
    if (!(tv == v * lam)) throw EigenSplitError("e_1 ⌟ φ is not an eigenvector of T_φ");
    s.lambda7 = lam;
    s.lambda14 = (T.trace() - S(7) * lam) / S(14);
    Matrix<S> residual = (T - I * s.lambda7) * (T - I * s.lambda14);
    if (residual.max_abs() != 0) throw EigenSplitError("T_φ does not satisfy a quadratic minimal polynomial");
  } else {
    Eigen::EigenSolver<Eigen::MatrixXd> es(T.to_eigen());
    std::vector<double> ev;
    for (int i = 0; i < 21; ++i) {
      auto z = es.eigenvalues()(i);
      if (std::fabs(z.imag()) > 1e-8) throw EigenSplitError("T_φ has complex eigenvalues");
      ev.push_back(z.real());
    }
    std::sort(ev.begin(), ev.end());
    // The two clusters are the 7 and 14 lowest/highest values, in one of two orders.
    auto spread = [&](int from, int to) { return ev[to - 1] - ev[from]; };
    auto mean = [&](int from, int to) {
      double m = 0;
      for (int i = from; i < to; ++i) m += ev[i];
      return m / (to - from);
    };
    double gap_a = ev[7] - ev[6], gap_b = ev[14] - ev[13];
    if (gap_a >= gap_b) {
      if (gap_a < 1e-8 || spread(0, 7) > 1e-8 || spread(7, 21) > 1e-8) throw EigenSplitError("eigenvalue clustering failure");
      s.lambda7 = mean(0, 7);
      s.lambda14 = mean(7, 21);
    } else {
      if (gap_b < 1e-8 || spread(0, 14) > 1e-8 || spread(14, 21) > 1e-8) throw EigenSplitError("eigenvalue clustering failure");
      s.lambda14 = mean(0, 14);
      s.lambda7 = mean(14, 21);
    }
  }
  s.p7 = (T - I * s.lambda14) * (S(1) / (s.lambda7 - s.lambda14));
  s.p14 = I - s.p7;
  return s;
}

template <class S> ConstForm<S> project7(const ConstForm<S> &a, const G2Structure<S> &s) { return apply_matrix(s.p7, a, 2); }
template <class S> ConstForm<S> project14(const ConstForm<S> &a, const G2Structure<S> &s) { return apply_matrix(s.p14, a, 2); }

/// Matrix of L_{⋆φ}: Λ² -> Λ⁶ (7×21).
template <class S> Matrix<S> l_star_phi_matrix(const G2Structure<S> &s) {
  return operator_matrix<S>(7, 2, 6, [&](const ConstForm<S> &e) { return l_star_phi(e, s); });
}

struct EnergyReport {
  double ym = 0, kappa = 0;
  double residual_f14 = 0; ///< ym - (-kappa/2 + 3/2 F14sq)
  double residual_f7 = 0;  ///< ym - (kappa + 3 F7sq)
};

/// Yang–Mills energy and the normalized charge κ = -2‖F7‖² + ‖F14‖².
inline EnergyReport energy_report(double f7sq, double f14sq) {
  if (f7sq < 0 || f14sq < 0) throw std::invalid_argument("energy_report: squared norms must be non-negative");
  EnergyReport r;
  r.ym = f7sq + f14sq;
  r.kappa = -2.0 * f7sq + f14sq;
  r.residual_f14 = r.ym - (-0.5 * r.kappa + 1.5 * f14sq);
  r.residual_f7 = r.ym - (r.kappa + 3.0 * f7sq);
  return r;
}

struct InstantonResidual {
  double r_a = 0;     ///< ‖F ∧ ⋆φ‖
  double r_b = 0;     ///< ‖F - λ14⁻¹ ⋆(F ∧ φ)‖
  double f7_norm = 0; ///< ‖π_7 F‖
};

template <class S> double form_norm(const ConstForm<S> &a, const Metric<S> &g) {
  return std::sqrt(std::max(0.0, to_double(form_inner(a, a, g))));
}

template <class S> InstantonResidual instanton_residual(const ConstForm<S> &F, const G2Structure<S> &s) {
  if (F.degree() != 2 || F.dim() != 7) throw DimensionError("instanton_residual expects a 2-form on R^7");
  InstantonResidual r;
  r.r_a = form_norm(l_star_phi(F, s), s.metric);
  r.r_b = form_norm(F - t_phi(F, s) * (S(1) / s.lambda14), s.metric);
  r.f7_norm = form_norm(project7(F, s), s.metric);
  return r;
}

} // namespace g2lab
