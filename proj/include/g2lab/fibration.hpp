#pragma once

// Flat G2-torus fibrations T^7 -> T^4 built from a base metric η, a fiber
// lattice L and a twist α: R^4 -> fiber, together with the type I-IV
// decomposition of constant 4-form deformations.
//
// Coordinates: "ambient" coordinates x on V = R^4 ⊕ R^3 are those in which
// the lattice generators are the columns of the generator matrix G; the
// "lattice" coordinates y = G⁻¹x make every generator a standard basis
// vector. In lattice coordinates φ = φ0, g = I and the fibration map is the
// projection onto y1..y4, so deformation data is always expressed there.

#include "g2lab/g2core.hpp"

#include <array>
#include <stdexcept>
#include <string>

namespace g2lab {

template <class S> struct FibrationSpec {
  Matrix<S> eta = Matrix<S>::identity(4);   ///< base metric, 4×4 SPD
  Matrix<S> L = Matrix<S>::identity(3);     ///< row j = j-th fiber lattice vector
  Matrix<S> alpha = Matrix<S>(3, 4);        ///< twist R^4 -> fiber

  void validate() const {
    if (eta.rows() != 4 || eta.cols() != 4) throw DimensionError("eta must be 4x4");
    if (L.rows() != 3 || L.cols() != 3) throw DimensionError("L must be 3x3");
    if (alpha.rows() != 3 || alpha.cols() != 4) throw DimensionError("alpha must be 3x4");
    try {
      Metric<S> check(eta);
    } catch (const std::domain_error &e) {
      throw std::invalid_argument(std::string("eta must be symmetric positive definite: ") + e.what());
    }
    if (L.rank() != 3) throw std::invalid_argument("fiber lattice vectors L are linearly dependent");
  }
};

/// Upper-triangular E with EᵀE = m (exact mode needs perfect-square pivots).
template <class S> Matrix<S> cholesky_upper(const Matrix<S> &m) {
  const int n = m.rows();
  Matrix<S> E(n, n);
  for (int i = 0; i < n; ++i) {
    S d = m(i, i);
    for (int k = 0; k < i; ++k) d -= E(k, i) * E(k, i);
    if (!(d > 0)) throw std::domain_error("matrix is not positive definite");
    E(i, i) = ScalarTraits<S>::root(d, 2);
    for (int j = i + 1; j < n; ++j) {
      S s = m(i, j);
      for (int k = 0; k < i; ++k) s -= E(k, i) * E(k, j);
      E(i, j) = s / E(i, i);
    }
  }
  return E;
}

/// Basis of the η-eigenspace of ⋆ containing ω1, ω2, ω3 (eigenvalue -1 for the
/// orientation e1234), obtained by projecting the ω's and Gram–Schmidt in the
/// η inner product. Normalized by <ω,ω>_η sqrt(det η) = 2, which is
/// conformally invariant, so sd_basis(c·I) returns the ω's themselves.
template <class S> std::array<ConstForm<S>, 3> sd_basis(const Matrix<S> &eta) {
  Metric<S> g(eta);
  S vol = g.volume_factor();
  std::array<ConstForm<S>, 3> out;
  for (int k = 0; k < 3; ++k) {
    ConstForm<S> w = omega<S>(k + 1);
    ConstForm<S> p = (w - hodge(w, g)) * S(S(1) / S(2));
    for (int j = 0; j < k; ++j) p -= out[j] * S(form_inner(p, out[j], g) / form_inner(out[j], out[j], g));
    S n2 = form_inner(p, p, g) * vol;
    out[k] = p * ScalarTraits<S>::root(S(2) / n2, 2);
  }
  return out;
}

template <class S> struct TorusFibration {
  FibrationSpec<S> spec;
  Matrix<S> generators;              ///< G, 7×7; columns are the lattice generators
  ConstForm<S> phi;                  ///< (G⁻¹)^* φ0 in ambient coordinates
  G2Structure<S> g2;                 ///< structure of phi
  Matrix<S> f_matrix;                ///< 4×7 fibration map [I | 0]

  /// Columns 5..7 of G: the inclusion of the fiber.
  Matrix<S> fiber_inclusion() const { return generators.submatrix({0, 1, 2, 3, 4, 5, 6}, {4, 5, 6}); }
  /// Ambient form expressed in lattice coordinates.
  ConstForm<S> to_lattice(const ConstForm<S> &a) const { return pullback_linear(generators, a); }
  /// Lattice-coordinate form expressed in ambient coordinates.
  ConstForm<S> to_ambient(const ConstForm<S> &a) const { return pullback_linear(generators.inverse(), a); }
  /// True when the metric has no base/fiber cross terms.
  bool riemannian_product() const {
    for (int i = 0; i < 4; ++i)
      for (int j = 4; j < 7; ++j)
        if (g2.metric.matrix()(i, j) != 0) return false;
    return true;
  }
  /// max |Gᵀ g G - I|.
  double orthonormality_residual() const {
    return (generators.transpose() * g2.metric.matrix() * generators - Matrix<S>::identity(7)).max_abs();
  }
  /// φ restricted to the fiber, as a 3-form on R^3 (e123 means e567).
  ConstForm<S> fiber_restriction() const { return pullback_linear(fiber_inclusion(), phi); }
};

/// G = [[E, 0], [α, Lᵀ]] with EᵀE = η: base generators (E e_i, α e_i), fiber
/// generators (0, L_j).
template <class S> TorusFibration<S> build_fibration(const FibrationSpec<S> &spec) {
  spec.validate();
  TorusFibration<S> fib;
  fib.spec = spec;
  Matrix<S> E = cholesky_upper(spec.eta);
  Matrix<S> G(7, 7);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) G(i, j) = E(i, j);
  for (int r = 0; r < 3; ++r) {
    for (int i = 0; i < 4; ++i) G(4 + r, i) = spec.alpha(r, i);
    for (int j = 0; j < 3; ++j) G(4 + r, 4 + j) = spec.L(j, r);
  }
  fib.generators = G;
  fib.phi = pullback_linear(G.inverse(), standard_phi<S>());
  fib.g2 = eigen_split(fib.phi);
  fib.f_matrix = Matrix<S>(4, 7);
  for (int i = 0; i < 4; ++i) fib.f_matrix(i, i) = S(1);
  return fib;
}

/// Pullback of a constant base form along the fibration map.
template <class S> ConstForm<S> pullback_along_f(const TorusFibration<S> &fib, const ConstForm<S> &a) {
  if (a.dim() != 4) throw DimensionError("pullback_along_f expects a form on the 4-dimensional base");
  return pullback_linear(fib.f_matrix, a);
}

/// Type I-IV blocks of a 4-form on R^7 = R^4 ⊕ R^3 (lattice coordinates),
/// sorted by the number of fiber indices 0, 1, 2, 3. Matrices are indexed
/// [fiber][base].
template <class S> struct DeformationSplit {
  S c_I = S(0);                       ///< coefficient of e1234
  Matrix<S> c_II = Matrix<S>(3, 4);   ///< coefficient of (⋆₄e^i) ∧ e^{4+j}
  Matrix<S> c_III_pp = Matrix<S>(3, 3); ///< coefficient of ω_k ∧ f_j
  Matrix<S> c_III_mp = Matrix<S>(3, 3); ///< coefficient of ω̄_k ∧ f_j
  std::vector<S> c_IV = std::vector<S>(4, S(0)); ///< coefficient of e^i ∧ e567

  static ConstForm<S> type_II_basis(int j, int i);
  static ConstForm<S> type_III_basis(int j, int k, bool anti);

  ConstForm<S> block_I() const { return ConstForm<S>::basis_form(7, {1, 2, 3, 4}, c_I); }
  ConstForm<S> block_II() const {
    ConstForm<S> r(7, 4);
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 4; ++i) r += type_II_basis(j, i) * c_II(j, i);
    return r;
  }
  ConstForm<S> block_III_pp() const {
    ConstForm<S> r(7, 4);
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) r += type_III_basis(j, k, false) * c_III_pp(j, k);
    return r;
  }
  ConstForm<S> block_III_mp() const {
    ConstForm<S> r(7, 4);
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) r += type_III_basis(j, k, true) * c_III_mp(j, k);
    return r;
  }
  ConstForm<S> block_IV() const {
    ConstForm<S> r(7, 4);
    for (int i = 0; i < 4; ++i) r += ConstForm<S>::basis_form(7, {i + 1, 5, 6, 7}, c_IV[i]);
    return r;
  }
  ConstForm<S> reassemble() const { return block_I() + block_II() + block_III_pp() + block_III_mp() + block_IV(); }

  /// Euclidean squared norms of the five blocks in the order I, II, III++, III-+, IV.
  std::array<S, 5> block_norms_sq() const {
    std::array<S, 5> n{};
    n[0] = c_I * c_I;
    for (int j = 0; j < 3; ++j) {
      for (int i = 0; i < 4; ++i) n[1] += c_II(j, i) * c_II(j, i);
      for (int k = 0; k < 3; ++k) {
        n[2] += S(2) * c_III_pp(j, k) * c_III_pp(j, k);
        n[3] += S(2) * c_III_mp(j, k) * c_III_mp(j, k);
      }
    }
    for (auto &c : c_IV) n[4] += c * c;
    return n;
  }
};

namespace detail {

// ⋆₄ e^i on R^4 lifted to R^7: e234, -e134, e124, -e123.
template <class S> ConstForm<S> base_star_covector(int i) {
  static const int idx[4][3] = {{2, 3, 4}, {1, 3, 4}, {1, 2, 4}, {1, 2, 3}};
  S sign = i % 2 == 0 ? S(1) : S(-1);
  return ConstForm<S>::basis_form(7, {idx[i][0], idx[i][1], idx[i][2]}, sign);
}

// f1 = e67, f2 = e75, f3 = e56: the fiber 2-forms dual to e5, e6, e7.
template <class S> ConstForm<S> fiber_two_form(int j) {
  static const int idx[3][2] = {{6, 7}, {7, 5}, {5, 6}};
  return ConstForm<S>::basis_form(7, {idx[j][0], idx[j][1]});
}

} // namespace detail

template <class S> ConstForm<S> DeformationSplit<S>::type_II_basis(int j, int i) {
  return wedge(detail::base_star_covector<S>(i), ConstForm<S>::basis_form(7, {5 + j}));
}

template <class S> ConstForm<S> DeformationSplit<S>::type_III_basis(int j, int k, bool anti) {
  ConstForm<S> w = anti ? omega_bar<S>(k + 1, 7) : omega<S>(k + 1, 7);
  return wedge(w, detail::fiber_two_form<S>(j));
}

template <class S> DeformationSplit<S> decompose_deformation(const ConstForm<S> &xi) {
  if (xi.dim() != 7 || xi.degree() != 4) throw DimensionError("decompose_deformation expects a 4-form on R^7");
  using D = DeformationSplit<S>;
  D d;
  d.c_I = xi.coeff({1, 2, 3, 4});
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 4; ++i) d.c_II(j, i) = euclidean_inner(xi, D::type_II_basis(j, i));
    for (int k = 0; k < 3; ++k) {
      d.c_III_pp(j, k) = euclidean_inner(xi, D::type_III_basis(j, k, false)) / S(2);
      d.c_III_mp(j, k) = euclidean_inner(xi, D::type_III_basis(j, k, true)) / S(2);
    }
  }
  for (int i = 0; i < 4; ++i) d.c_IV[i] = xi.coeff(MultiIndex::of({i + 1, 5, 6, 7}));
  return d;
}

/// ξ = ⋆_{φ+dφ}(φ+dφ) - ⋆_φ φ, each star taken in the metric of its own form.
template <class S> ConstForm<S> xi_from_perturbation(const ConstForm<S> &phi, const ConstForm<S> &dphi) {
  auto star_of = [](const ConstForm<S> &f, const char *what) {
    try {
      auto m = metric_from_phi(f);
      return hodge(f, m.metric, m.orientation);
    } catch (const NonStableFormError &e) {
      throw NonStableFormError(std::string(what) + ": " + e.what());
    }
  };
  ConstForm<S> base = star_of(phi, "unperturbed 3-form");
  return star_of(phi + dphi, "perturbed 3-form") - base;
}

/// N(v) = -1/2 ∫ f^*c2 ∧ (v⌟ξ) for the constant representative q·e1234 of the
/// base class and unit-volume fibers: -1/2 · q · [v⌟ξ]_{567}.
template <class S> S poincare_pairing(const ConstForm<S> &xi, const std::vector<S> &v, const S &q) {
  if (xi.dim() != 7 || xi.degree() != 4) throw DimensionError("poincare_pairing expects a 4-form on R^7");
  return -q * interior(v, xi).coeff({5, 6, 7}) / S(2);
}

} // namespace g2lab
