#include "doctest.h"

#include "g2lab/fibration.hpp"
#include "g2lab/rng.hpp"

using namespace g2lab;

namespace {

QForm e(std::vector<int> idx) { return QForm::basis_form(7, std::move(idx)); }

Form random_form(SplitMix64 &rng, int n, int k) {
  Form f(n, k);
  for (auto idx : basis(n, k)) f.add(idx, rng.normal());
  return f;
}

FibrationSpec<double> random_spec(SplitMix64 &rng, double amp) {
  FibrationSpec<double> s;
  Matrix<double> a(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = amp * rng.normal();
  s.eta = Matrix<double>::identity(4) + a.transpose() * a + (a + a.transpose()) * 0.5;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s.L(i, j) = (i == j ? 1.0 : 0.0) + amp * rng.normal();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) s.alpha(i, j) = amp * rng.normal();
  return s;
}

FibrationSpec<double> perturb(const FibrationSpec<double> &s, SplitMix64 &rng, double amp) {
  FibrationSpec<double> p = s;
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) {
      double d = amp * rng.normal();
      p.eta(i, j) += d;
      if (i != j) p.eta(j, i) += d;
    }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) p.L(i, j) += amp * rng.normal();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) p.alpha(i, j) += amp * rng.normal();
  return p;
}

// Linearization of φ ↦ ⋆_φ φ at φ0, written through the Λ³ = Λ³_1 ⊕ Λ³_7 ⊕ Λ³_27
// splitting: d⋆(χ) = 4/3 ⋆χ1 + ⋆χ7 - ⋆χ27.
Form star_linearization(const Form &chi) {
  Form phi = standard_phi<double>();
  auto I = Metric<double>::euclidean(7);
  Form star_phi = hodge(phi, I);
  Form chi1 = phi * (form_inner(chi, phi, I) / 7.0);
  Form chi7(7, 3);
  for (int i = 1; i <= 7; ++i) {
    Form b = interior(unit_vector<double>(7, i), star_phi);
    chi7 += b * (form_inner(chi, b, I) / form_inner(b, b, I));
  }
  Form chi27 = chi - chi1 - chi7;
  return hodge(chi1, I) * (4.0 / 3.0) + hodge(chi7, I) - hodge(chi27, I);
}

} // namespace

TEST_CASE("sd_basis") {
  auto I = Matrix<Rational>::identity(4);
  auto b = sd_basis(I);
  for (int k = 0; k < 3; ++k) CHECK(b[k] == omega<Rational>(k + 1));
  auto b4 = sd_basis(Matrix<Rational>(I * Rational(4)));
  for (int k = 0; k < 3; ++k) CHECK(b4[k] == omega<Rational>(k + 1));
  for (auto &w : b) CHECK(hodge(w, Metric<Rational>(I), Orientation(-1)) == w);

  SplitMix64 rng(21);
  for (int t = 0; t < 10; ++t) {
    auto spec = random_spec(rng, 0.3);
    Metric<double> g(spec.eta);
    auto bs = sd_basis(spec.eta);
    for (int k = 0; k < 3; ++k) {
      CHECK((hodge(bs[k], g) + bs[k]).max_abs() < 1e-12);
      CHECK(form_inner(bs[k], bs[k], g) * g.volume_factor() == doctest::Approx(2.0).epsilon(1e-12));
      for (int j = 0; j < k; ++j) CHECK(std::fabs(form_inner(bs[k], bs[j], g)) < 1e-12);
    }
  }
  // Continuity at the identity.
  auto near = random_spec(rng, 1e-6);
  auto bn = sd_basis(near.eta);
  for (int k = 0; k < 3; ++k) CHECK((bn[k] - omega<double>(k + 1)).max_abs() < 1e-5);
}

TEST_CASE("standard fibration is the flat product structure") {
  auto fib = build_fibration(FibrationSpec<Rational>{});
  CHECK(fib.phi == standard_phi<Rational>());
  CHECK(fib.g2.metric.is_identity());
  CHECK(fib.riemannian_product());
  CHECK(fib.orthonormality_residual() == 0);
  CHECK(fib.fiber_restriction() == QForm::basis_form(3, {1, 2, 3}));
}

TEST_CASE("twisted exact fibration") {
  FibrationSpec<Rational> s;
  s.eta = Matrix<Rational>::diagonal({1, 4, 9, Rational(1, 4)});
  s.L = {{1, 0, 0}, {1, 2, 0}, {0, 1, 1}};
  s.alpha = {{Rational(1, 2), 0, 0, 1}, {0, -1, 0, 0}, {0, 0, Rational(1, 3), 0}};
  auto fib = build_fibration(s);
  for (int r = 0; r < 3; ++r)
    for (int i = 0; i < 4; ++i) CHECK(fib.generators(4 + r, i) == s.alpha(r, i));
  CHECK_FALSE(fib.riemannian_product());
  CHECK(fib.orthonormality_residual() == 0);
  CHECK(fib.fiber_restriction() == QForm::basis_form(3, {1, 2, 3}));
  CHECK(fib.to_lattice(fib.phi) == standard_phi<Rational>());
  CHECK((fib.f_matrix * fib.fiber_inclusion()).max_abs() == 0);
  CHECK(fib.g2.lambda7 == -2);
}

TEST_CASE("generators are orthonormal for random specs") {
  SplitMix64 rng(22);
  for (int t = 0; t < 20; ++t) {
    auto fib = build_fibration(random_spec(rng, 0.4));
    CHECK(fib.orthonormality_residual() < 1e-12);
    CHECK((fib.fiber_restriction() - Form::basis_form(3, {1, 2, 3})).max_abs() < 1e-12);
  }
}

TEST_CASE("invalid specs are rejected") {
  FibrationSpec<Rational> s;
  s.L = {{1, 0, 0}, {2, 0, 0}, {0, 0, 1}};
  CHECK_THROWS_AS(build_fibration(s), std::invalid_argument);
  FibrationSpec<Rational> t;
  t.eta(0, 0) = -1;
  CHECK_THROWS_AS(build_fibration(t), std::invalid_argument);
}

TEST_CASE("pullback along the fibration map") {
  auto fib = build_fibration(FibrationSpec<Rational>{});
  QForm vol = pullback_along_f(fib, QForm::basis_form(4, {1, 2, 3, 4}));
  CHECK(vol == e({1, 2, 3, 4}));
  // f^*ω1 ∧ e67 pairs with ⋆φ0 through its -ω1∧e67 term.
  QForm t = wedge(pullback_along_f(fib, omega<Rational>(1)), e({6, 7}));
  CHECK(euclidean_inner(fib.g2.star_phi, t) == -2);
  SplitMix64 rng(23);
  auto fd = build_fibration(random_spec(rng, 0.3));
  for (int k = 0; k < 20; ++k) {
    Form a = random_form(rng, 4, 1 + k % 2), b = random_form(rng, 4, 1 + (k / 2) % 2);
    CHECK((pullback_along_f(fd, wedge(a, b)) - wedge(pullback_along_f(fd, a), pullback_along_f(fd, b))).max_abs() < 1e-12);
  }
  CHECK_THROWS_AS(pullback_along_f(fib, e({1})), DimensionError);
}

TEST_CASE("deformation types: examples") {
  auto d = decompose_deformation(e({1, 2, 3, 4}));
  CHECK(d.c_I == 1);
  CHECK(d.reassemble() == e({1, 2, 3, 4}));
  d = decompose_deformation(e({1, 5, 6, 7}));
  CHECK(d.c_IV == std::vector<Rational>{1, 0, 0, 0});
  CHECK(d.c_I == 0);
  d = decompose_deformation(wedge(omega<Rational>(1, 7), e({6, 7})));
  CHECK(d.c_III_pp(0, 0) == 1);
  CHECK(d.c_III_mp.max_abs() == 0);
  CHECK(d.c_II.max_abs() == 0);
  auto n = d.block_norms_sq();
  CHECK(n[2] == 2);
  CHECK(n[0] + n[1] + n[3] + n[4] == 0);

  d = decompose_deformation(hodge(standard_phi<Rational>(), Metric<Rational>::euclidean(7)));
  CHECK(d.c_I == 1);
  CHECK(d.c_III_pp == Matrix<Rational>::identity(3) * Rational(-1));
}

TEST_CASE("deformation types: the 35 basis forms are orthogonal and complete") {
  std::vector<QForm> all;
  using D = DeformationSplit<Rational>;
  all.push_back(e({1, 2, 3, 4}));
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 4; ++i) all.push_back(D::type_II_basis(j, i));
  for (bool anti : {false, true})
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) all.push_back(D::type_III_basis(j, k, anti));
  for (int i = 1; i <= 4; ++i) all.push_back(e({i, 5, 6, 7}));
  REQUIRE(all.size() == 35);
  for (size_t a = 0; a < all.size(); ++a)
    for (size_t b = 0; b < all.size(); ++b)
      if (a != b) CHECK(euclidean_inner(all[a], all[b]) == 0);
  for (auto idx : basis(7, 4)) {
    QForm x(7, 4);
    x.add(idx, 1);
    CHECK(decompose_deformation(x).reassemble() == x);
  }
}

TEST_CASE("deformation split is a Parseval isometry") {
  SplitMix64 rng(24);
  double worst = 0;
  for (int t = 0; t < 100; ++t) {
    Form xi = random_form(rng, 7, 4);
    auto d = decompose_deformation(xi);
    auto n = d.block_norms_sq();
    double total = n[0] + n[1] + n[2] + n[3] + n[4];
    worst = std::max(worst, std::fabs(total - euclidean_inner(xi, xi)));
    CHECK((d.reassemble() - xi).max_abs() < 1e-12);
    std::array<Form, 5> blocks = {d.block_I(), d.block_II(), d.block_III_pp(), d.block_III_mp(), d.block_IV()};
    for (int a = 0; a < 5; ++a) {
      CHECK(std::fabs(euclidean_inner(blocks[a], blocks[a]) - n[a]) < 1e-10);
      for (int b = a + 1; b < 5; ++b) CHECK(std::fabs(euclidean_inner(blocks[a], blocks[b])) < 1e-12);
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("xi from perturbation: exact scaling") {
  QForm phi = standard_phi<Rational>();
  QForm star = hodge(phi, Metric<Rational>::euclidean(7));
  CHECK(xi_from_perturbation(phi, QForm(7, 3)).is_zero());
  CHECK(xi_from_perturbation(phi, phi * Rational(7)) == star * Rational(15));
  CHECK(xi_from_perturbation(phi, phi * Rational(26)) == star * Rational(80));
  CHECK_THROWS_AS(xi_from_perturbation(phi, phi * Rational(-1)), NonStableFormError);
}

TEST_CASE("xi from perturbation: generic perturbation populates all types") {
  SplitMix64 rng(25);
  Form dphi = random_form(rng, 7, 3) * 1e-3;
  auto d = decompose_deformation(xi_from_perturbation(standard_phi<double>(), dphi));
  auto n = d.block_norms_sq();
  for (double x : n) CHECK(x > 1e-12);
}

TEST_CASE("xi from perturbation matches the linearized Hodge star") {
  SplitMix64 rng(26);
  Form phi = standard_phi<double>();
  const double h = 1e-5;
  for (int t = 0; t < 10; ++t) {
    Form chi = random_form(rng, 7, 3);
    Form fd = (xi_from_perturbation(phi, chi * h) - xi_from_perturbation(phi, chi * -h)) * (1.0 / (2 * h));
    CHECK((fd - star_linearization(chi)).max_abs() < 1e-8);
  }
}

TEST_CASE("deformations through fibration data never have a type IV part") {
  SplitMix64 rng(27);
  double worst = 0;
  for (int t = 0; t < 20; ++t) {
    auto spec = random_spec(rng, 0.3);
    auto base = build_fibration(spec);
    auto moved = build_fibration(perturb(spec, rng, 1e-3));
    Form xi = base.to_lattice(moved.g2.star_phi - base.g2.star_phi);
    auto d = decompose_deformation(xi);
    for (double c : d.c_IV) worst = std::max(worst, std::fabs(c));
    CHECK(xi.max_abs() > 1e-6);
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("Poincare pairing") {
  std::vector<Rational> v = {1, 0, 0, 0, 0, 0, 0};
  QForm xi = wedge(QForm::basis_form(7, {1}, Rational(-2)), e({5, 6, 7}));
  CHECK(poincare_pairing(xi, v, Rational(3)) == 3);
  CHECK(poincare_pairing(e({1, 2, 3, 4}), v, Rational(3)) == 0);
  CHECK(poincare_pairing(xi, std::vector<Rational>(7, 0), Rational(3)) == 0);
  // Base directions see nothing of types I-III.
  SplitMix64 rng(28);
  Form r = random_form(rng, 7, 4);
  auto d = decompose_deformation(r);
  Form no_iv = d.block_I() + d.block_II() + d.block_III_pp() + d.block_III_mp();
  for (int i = 1; i <= 4; ++i) CHECK(std::fabs(poincare_pairing(no_iv, unit_vector<double>(7, i), 1.0)) < 1e-14);
}
