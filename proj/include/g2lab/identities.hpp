#pragma once

// Algebraic identities of the standard G2 structure, evaluated either in
// rational arithmetic (residuals must be exactly zero) or in doubles.

#include "g2lab/fibration.hpp"

#include <string>
#include <vector>

namespace g2lab {

struct IdentityCheck {
  std::string name;
  double residual = 0;
  double tolerance = 0;
  bool pass = false;
};

namespace detail {

template <class S> double residual_of(const ConstForm<S> &a) { return a.is_zero() ? 0.0 : a.max_abs(); }

// ι_{e_{4+i}} ι_{e_{4+j}} ⋆φ0, which reads off the fiber-to-base map Q.
template <class S> ConstForm<S> q_from_star_phi(const ConstForm<S> &star_phi, int i, int j) {
  return interior(unit_vector<S>(7, 4 + i), interior(unit_vector<S>(7, 4 + j), star_phi));
}

} // namespace detail

/// Runs every identity for φ0. Exact scalars use tolerance 0, doubles 1e-12.
template <class S> std::vector<IdentityCheck> identity_suite() {
  const double tol = ScalarTraits<S>::exact ? 0.0 : 1e-12;
  std::vector<IdentityCheck> out;
  auto record = [&](std::string name, double residual) { out.push_back({std::move(name), residual, tol, residual <= tol}); };
  auto e = [](std::vector<int> idx) { return ConstForm<S>::basis_form(7, std::move(idx)); };

  const ConstForm<S> phi = standard_phi<S>();
  const G2Structure<S> s = eigen_split(phi);

  // ⋆φ0 = e1234 - ω1∧e67 - ω2∧e75 - ω3∧e56.
  ConstForm<S> expected = e({1, 2, 3, 4}) - wedge(omega<S>(1, 7), e({6, 7})) - wedge(omega<S>(2, 7), e({7, 5})) -
                          wedge(omega<S>(3, 7), e({5, 6}));
  record("star_phi0", detail::residual_of(s.star_phi - expected));
  record("metric_phi0_identity", (s.metric.matrix() - Matrix<S>::identity(7)).max_abs());

  double fix = 0;
  Matrix<S> span(21, 7);
  for (int i = 1; i <= 7; ++i) {
    ConstForm<S> g = interior(unit_vector<S>(7, i), phi);
    fix = std::max(fix, detail::residual_of(project7(g, s) - g));
    for (int k = 0; k < 21; ++k) span(k, i - 1) = g.coeff(basis(7, 2)[k]);
  }
  record("lambda2_7_fixes_generators", fix);
  record("lambda2_7_generator_rank", std::fabs(span.rank() - 7.0));
  record("lambda2_7_projector_trace", std::fabs(to_double(s.p7.trace()) - 7.0));

  double kill = 0;
  for (auto idx : basis(7, 2)) kill = std::max(kill, detail::residual_of(l_star_phi(project14(ConstForm<S>::basis_form(7, idx.indices()), s), s)));
  record("l_star_phi_kills_lambda2_14", kill);
  record("l_star_phi_rank", std::fabs(l_star_phi_matrix(s).rank() - 7.0));

  // Q(dt^i ∧ dt^j) = Σ_k ε^{ijk} ω_k.
  double q = 0;
  const int pairs[3][3] = {{1, 2, 3}, {2, 3, 1}, {3, 1, 2}};
  for (auto &p : pairs) {
    ConstForm<S> want = omega<S>(p[2], 7);
    q = std::max(q, detail::residual_of(detail::q_from_star_phi(s.star_phi, p[0], p[1]) - want));
    q = std::max(q, detail::residual_of(detail::q_from_star_phi(s.star_phi, p[1], p[0]) + want));
  }
  record("q_map_levi_civita", q);

  ConstForm<S> xi(7, 4);
  for (int k = 0; k < 35; ++k) xi.add(basis(7, 4)[k], S(k + 1) / S(k + 2));
  auto split = decompose_deformation(xi);
  record("deformation_split_reassembly", detail::residual_of(split.reassemble() - xi));
  Matrix<S> blocks(35, 35);
  int col = 0;
  auto put = [&](const ConstForm<S> &f) {
    for (int r = 0; r < 35; ++r) blocks(r, col) = f.coeff(basis(7, 4)[r]);
    ++col;
  };
  put(e({1, 2, 3, 4}));
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 4; ++i) put(DeformationSplit<S>::type_II_basis(j, i));
  for (bool anti : {false, true})
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) put(DeformationSplit<S>::type_III_basis(j, k, anti));
  for (int i = 1; i <= 4; ++i) put(e({i, 5, 6, 7}));
  record("deformation_dimension_count", std::fabs(double(col) - 35.0) + std::fabs(blocks.rank() - 35.0));

  double l7 = to_double(s.lambda7), l14 = to_double(s.lambda14);
  record("t_phi_eigenvalue_moduli", std::fabs(std::fabs(l7) - 2.0) + std::fabs(std::fabs(l14) - 1.0));
  record("t_phi_opposite_signs", l7 * l14 < 0 ? 0.0 : 1.0);
  return out;
}

} // namespace g2lab
