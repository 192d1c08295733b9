#include "doctest.h"

#include "g2lab/lattice.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

using namespace g2lab;

namespace {

FluxMatrix flux(int n, std::initializer_list<std::tuple<int, int, int>> entries) {
  FluxMatrix m(n, std::vector<int>(n, 0));
  for (auto [j, k, v] : entries) {
    m[j - 1][k - 1] = v;
    m[k - 1][j - 1] = -v;
  }
  return m;
}

const G2Structure<double> &phi0_structure() {
  static const G2Structure<double> s = eigen_split(standard_phi<double>());
  return s;
}

double max_link_difference(const LatticeGaugeField &a, const LatticeGaugeField &b) {
  double d = 0;
  for (size_t i = 0; i < a.links().size(); ++i) d = std::max(d, (a.links()[i] - b.links()[i]).cwiseAbs().maxCoeff());
  return d;
}

struct ThreadsEnv {
  explicit ThreadsEnv(const char *n) { setenv("G2LAB_THREADS", n, 1); }
  ~ThreadsEnv() { unsetenv("G2LAB_THREADS"); }
};

} // namespace

TEST_CASE("identity links") {
  LatticeGaugeField U({4, 4, 4, 4}, GaugeGroup::SU2);
  CHECK(U.volume() == 256);
  CHECK(plaquette(U, 17, 0, 3) == lie_identity(2));
  CHECK(clover_charge(U) == 0);
  auto e = lattice_energy_4d(U);
  CHECK(e.total == 0);
  auto r = cool_to_sd(U);
  CHECK(r.steps == 0);
  CHECK(r.converged);
  CHECK(r.history.size() == 1);

  CHECK_THROWS_AS(plaquette(U, 256, 0, 1), std::out_of_range);
  CHECK_THROWS_AS(plaquette(U, 0, 0, 4), std::out_of_range);
  CHECK_THROWS_AS(plaquette(U, 0, 2, 2), std::out_of_range);
  CHECK_THROWS(LatticeGaugeField({4, 1, 4, 4}, GaugeGroup::U1));
  CHECK_THROWS(LatticeGaugeField({4, 4}, GaugeGroup::U1, {0.25}));
}

TEST_CASE("site indexing wraps periodically") {
  LatticeGaugeField U({3, 4, 5}, GaugeGroup::U1);
  for (size_t s = 0; s < U.volume(); ++s) {
    auto x = U.coords(s);
    CHECK(U.site(x) == s);
    for (int mu = 0; mu < 3; ++mu) {
      auto y = x;
      y[mu] += 1;
      CHECK(U.shift(s, mu, 1) == U.site(y));
      CHECK(U.shift(U.shift(s, mu, 1), mu, -1) == s);
    }
  }
  CHECK(U.site({-1, 4, 5}) == U.site({2, 0, 0}));
}

TEST_CASE("U(1) flux discretization") {
  auto m = flux(4, {{1, 2, 1}, {3, 4, 1}});
  auto U = discretize_u1_flux({8, 8, 8, 8}, m);
  // Every plaquette equals exp(2πi m_jk a_j a_k), including those across the boundary.
  double worst = 0;
  for (size_t s = 0; s < U.volume(); ++s)
    for (int j = 0; j < 4; ++j)
      for (int k = j + 1; k < 4; ++k) {
        cplx expected = std::exp(cplx(0, 2 * kPi * m[j][k] / 64.0));
        worst = std::max(worst, std::abs(plaquette(U, s, j, k)(0, 0) - expected));
      }
  CHECK(worst < 1e-12);
  double q = clover_charge(U);
  CHECK(q == doctest::Approx(-1.0).epsilon(0.05));
  auto e = lattice_energy_4d(U);
  CHECK(e.asd_part < 1e-20);
  CHECK(e.total == doctest::Approx(8 * kPi * kPi).epsilon(0.01));

  auto asd = lattice_energy_4d(discretize_u1_flux({6, 6, 6, 6}, flux(4, {{1, 2, 1}, {3, 4, -1}})));
  CHECK(asd.q == doctest::Approx(1.0).epsilon(0.05));
  CHECK(asd.sd_part < 1e-20);

  // Seven-dimensional flux with anisotropic extents.
  auto m7 = flux(7, {{1, 5, 2}, {2, 3, -1}, {4, 7, 1}});
  auto U7 = discretize_u1_flux({3, 4, 3, 2, 3, 2, 2}, m7);
  worst = 0;
  for (size_t s = 0; s < U7.volume(); ++s)
    for (int j = 0; j < 7; ++j)
      for (int k = j + 1; k < 7; ++k) {
        cplx expected = std::exp(cplx(0, 2 * kPi * m7[j][k] * U7.spacing()[j] * U7.spacing()[k]));
        worst = std::max(worst, std::abs(plaquette(U7, s, j, k)(0, 0) - expected));
      }
  CHECK(worst < 1e-12);
  CHECK_THROWS(discretize_u1_flux({4, 4, 4, 4}, flux(7, {})));
}

TEST_CASE("single-link excitation carries no charge") {
  SplitMix64 rng(3);
  LatticeGaugeField U({4, 4, 4, 4}, GaugeGroup::SU2);
  U.link(37, 2) = lie_exp(0.1 * su2_generator(1) + 0.05 * su2_generator(3));
  CHECK(std::fabs(clover_charge(U)) < 1e-14);
  CHECK(lattice_energy_4d(U).total > 0);
}

TEST_CASE("gauge invariance of plaquette traces, charge and energies") {
  SplitMix64 rng(4);
  auto U = add_noise(instanton_seed({4, 4, 4, 4}, 0.3, -1), 0.2, rng);
  auto e0 = lattice_energy_4d(U);
  for (int t = 0; t < 20; ++t) {
    auto V = gauge_transform(U, random_gauge(U, rng));
    CHECK(V.unitarity_defect() < 1e-12);
    size_t s = size_t(rng.integer(0, int(U.volume()) - 1));
    CHECK(std::abs(plaquette(V, s, 1, 3).trace() - plaquette(U, s, 1, 3).trace()) < 1e-12);
    auto e = lattice_energy_4d(V);
    CHECK(std::fabs(e.q - e0.q) < 1e-12);
    CHECK(std::fabs(e.total - e0.total) < 1e-10 * e0.total);
    CHECK(std::fabs(e.asd_part - e0.asd_part) < 1e-10 * e0.total);
  }
  CHECK_THROWS(gauge_transform(U, std::vector<Lie>(3, lie_identity(2))));
}

TEST_CASE("instanton seed: charge sign and energy bound") {
  for (int sign : {-1, 1}) {
    auto e = lattice_energy_4d(instanton_seed({6, 6, 6, 6}, 0.3, sign));
    CHECK(e.q * sign > 0.5);
    CHECK(e.total >= 8 * kPi * kPi * std::fabs(e.q) * 0.99);
    // The charge sign decides which half carries most of the energy.
    CHECK((sign < 0 ? e.sd_part : e.asd_part) > 0.8 * e.total);
  }
}

TEST_CASE("ASD gradient matches finite differences") {
  SplitMix64 rng(5);
  std::vector<LatticeGaugeField> fields = {
      add_noise(instanton_seed({4, 4, 4, 4}, 0.3, -1), 0.3, rng),
      add_noise(discretize_u1_flux({4, 4, 4, 4}, flux(4, {{1, 3, 1}})), 0.3, rng),
      add_noise(LatticeGaugeField({4, 3, 4, 3}, GaugeGroup::SU2, {0.2, 0.5, 0.3, 0.25}), 0.5, rng),
  };
  for (auto &U : fields) {
    auto G = asd_gradient(U);
    for (int t = 0; t < 6; ++t) {
      size_t li = size_t(rng.integer(0, int(U.links().size()) - 1));
      for (int a = 1; a <= (U.rank() == 1 ? 1 : 3); ++a) {
        Lie X = U.rank() == 1 ? u1_element(1.0) : su2_generator(a);
        double h = 1e-5;
        auto P = U, M = U;
        P.links()[li] = lie_exp(X * h) * P.links()[li];
        M.links()[li] = lie_exp(X * -h) * M.links()[li];
        double fd = (asd_energy(P) - asd_energy(M)) / (2 * h);
        double an = (G[li].adjoint() * X).trace().real();
        CHECK(an == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
      }
    }
  }
}

TEST_CASE("cooling is monotone and keeps links in the group") {
  SplitMix64 rng(6);
  auto U = add_noise(instanton_seed({4, 4, 4, 4}, 0.3, -1), 0.1, rng);
  CoolingOptions o;
  o.max_steps = 40;
  o.tol = 1e-12;
  auto r = cool_to_sd(U, o);
  REQUIRE(r.history.size() == 41);
  for (size_t i = 1; i < r.history.size(); ++i) {
    CHECK(r.history[i].asd_fraction <= r.history[i - 1].asd_fraction);
    CHECK(r.history[i].asd_energy <= r.history[i - 1].asd_energy);
    CHECK(r.history[i].step == int(i));
  }
  CHECK(r.field.unitarity_defect() < 1e-12);
  CHECK(r.history.back().asd_energy < 0.5 * r.history.front().asd_energy);

  CoolingOptions bad;
  bad.step_size = -1;
  CHECK_THROWS(cool_to_sd(U, bad));
  CHECK_THROWS(cool_to_sd(LatticeGaugeField({4, 4, 4}, GaugeGroup::SU2)));
}

TEST_CASE("cooling a noisy U(1) SD flux recovers the flux") {
  SplitMix64 rng(7);
  auto clean = discretize_u1_flux({8, 8, 8, 8}, flux(4, {{1, 2, 1}, {3, 4, 1}}));
  auto r = cool_to_sd(add_noise(clean, 0.05, rng));
  CHECK(r.converged);
  CHECK(r.steps <= 5000);
  CHECK(r.history.back().asd_fraction < 1e-3);
  CHECK(r.history.back().charge == doctest::Approx(clover_charge(clean)).epsilon(0.05));
}

TEST_CASE("cooling a random SU(2) field lands near an integer charge") {
  SplitMix64 rng(8);
  auto U = add_noise(LatticeGaugeField({4, 4, 4, 4}, GaugeGroup::SU2), 3.0, rng);
  auto r = cool_to_sd(U);
  CHECK(r.converged);
  double q = r.history.back().charge;
  double n = std::round(q);
  CHECK(std::fabs(q - n) <= 0.1 * std::max(1.0, std::fabs(n)));
  // Nearly self-dual: the energy sits on the topological bound.
  CHECK(lattice_energy_4d(r.field).total == doctest::Approx(8 * kPi * kPi * std::fabs(q)).epsilon(0.01));
}

TEST_CASE("results do not depend on the thread count") {
  SplitMix64 rng(9);
  auto U = add_noise(instanton_seed({4, 4, 4, 4}, 0.3, -1), 0.2, rng);
  CoolingOptions o;
  o.max_steps = 5;
  o.tol = 1e-12;
  std::vector<Lie> g1, g3;
  CoolingResult r1, r3;
  {
    ThreadsEnv env("1");
    g1 = asd_gradient(U);
    r1 = cool_to_sd(U, o);
  }
  {
    ThreadsEnv env("3");
    g3 = asd_gradient(U);
    r3 = cool_to_sd(U, o);
  }
  for (size_t i = 0; i < g1.size(); ++i) CHECK(g1[i] == g3[i]);
  CHECK(max_link_difference(r1.field, r3.field) == 0);
  CHECK(r1.history.back().charge == r3.history.back().charge);
}

TEST_CASE("lift to 7D: fiber links identity, no fiber legs") {
  SplitMix64 rng(10);
  auto base = add_noise(instanton_seed({4, 4, 4, 4}, 0.3, -1), 0.1, rng);
  auto U = lift_to_7d(base, {2, 3, 2});
  REQUIRE(U.ndim() == 7);
  CHECK(U.volume() == 256 * 12);
  CHECK(U.spacing()[5] == doctest::Approx(1.0 / 3));
  const auto &b = basis(7, 2);
  for (size_t s = 0; s < U.volume(); s += 97) {
    for (int mu = 4; mu < 7; ++mu) CHECK(U.link(s, mu) == lie_identity(2));
    auto F = field_strength(U, s);
    auto F4 = field_strength(base, s / 12);
    for (size_t c = 0; c < b.size(); ++c) {
      if (b[c].max_index() > 4) CHECK(F[c].cwiseAbs().maxCoeff() == 0);
    }
    CHECK(F[0] == F4[0]);
    CHECK(F[basis_position(7, MultiIndex::of({3, 4}))] == F4[5]);
  }
  CHECK_THROWS(lift_to_7d(base, {2, 2}));
  CHECK_THROWS(lift_to_7d(U, {2, 2, 2}));
}

TEST_CASE("lifted lattice fields: SD flux is an instanton, ASD defect measured exactly") {
  auto &s = phi0_structure();
  auto sd = lift_to_7d(discretize_u1_flux({4, 4, 4, 4}, flux(4, {{1, 2, 1}, {3, 4, 1}, {1, 3, -1}, {4, 2, -1}})), {2, 2, 2});
  auto r = lattice_instanton_residual(sd, s);
  CHECK(r.r_a < 1e-10);
  CHECK(r.r_b < 1e-10);
  CHECK(r.f7_norm < 1e-10);

  SplitMix64 rng(11);
  auto base = add_noise(instanton_seed({4, 4, 4, 4}, 0.3, -1), 0.2, rng);
  auto e4 = lattice_energy_4d(base);
  auto lifted = lift_to_7d(base, {2, 2, 2});
  auto r7 = lattice_instanton_residual(lifted, s);
  // Site by site |π7 F|² = (2/3)|F⁻|², and F ∧ ⋆φ has norm |O(F⁻)| = sqrt(2)|F⁻|.
  CHECK(r7.f7_norm * r7.f7_norm == doctest::Approx(2.0 / 3.0 * e4.asd_part).epsilon(1e-10));
  CHECK(r7.r_a * r7.r_a == doctest::Approx(2.0 * e4.asd_part).epsilon(1e-10));

  auto e7 = lattice_energy_7d(lifted, s);
  CHECK(e7.ym == doctest::Approx(e4.total).epsilon(1e-10));
  CHECK(e7.kappa_integral == doctest::Approx(s.lambda7 * e7.F7sq + s.lambda14 * e7.F14sq).epsilon(1e-10));
  CHECK(e7.kappa_integral == doctest::Approx(8 * kPi * kPi * -e4.q).epsilon(1e-10));
  CHECK_THROWS(lattice_energy_7d(base, s));
}

TEST_CASE("7D energy decomposition is gauge invariant") {
  auto &s = phi0_structure();
  SplitMix64 rng(12);
  auto U = add_noise(LatticeGaugeField({2, 2, 2, 2, 2, 2, 3}, GaugeGroup::SU2), 0.4, rng);
  auto e0 = lattice_energy_7d(U, s);
  CHECK(e0.kappa_integral == doctest::Approx(s.lambda7 * e0.F7sq + s.lambda14 * e0.F14sq).epsilon(1e-10));
  for (int t = 0; t < 20; ++t) {
    auto e = lattice_energy_7d(gauge_transform(U, random_gauge(U, rng)), s);
    CHECK(std::fabs(e.ym - e0.ym) < 1e-10 * e0.ym);
    CHECK(std::fabs(e.F7sq - e0.F7sq) < 1e-10 * e0.ym);
    CHECK(std::fabs(e.kappa_integral - e0.kappa_integral) < 1e-10 * e0.ym);
  }
}

TEST_CASE("snapshot round trip and manifest") {
  SplitMix64 rng(13);
  auto U = add_noise(LatticeGaugeField({3, 2, 2, 4}, GaugeGroup::SU2, {0.5, 0.25, 0.5, 0.125}), 1.0, rng);
  std::string path = "test_lattice_snapshot.lat";
  write_snapshot(path, U, {{"seed", 13}});
  auto V = read_snapshot(path);
  CHECK(V.dims() == U.dims());
  CHECK(V.spacing() == U.spacing());
  CHECK(V.group() == GaugeGroup::SU2);
  CHECK(max_link_difference(U, V) == 0);

  std::ifstream js(path + ".json");
  auto m = nlohmann::json::parse(js);
  CHECK(m["dims"] == nlohmann::json({3, 2, 2, 4}));
  CHECK(m["group"] == "su2");
  CHECK(m["version"] == 1);
  CHECK(m["meta"]["seed"] == 13);

  // Header: 8 magic + 4 version + 4 ndim + 16 dims + 4 group + 32 spacing, then 48 sites × 4 links × 8 reals.
  std::ifstream bin(path, std::ios::binary | std::ios::ate);
  CHECK(size_t(bin.tellg()) == 68 + 48 * 4 * 8 * 8);

  auto W = discretize_u1_flux({2, 3}, flux(2, {{1, 2, 1}}));
  write_snapshot(path, W);
  CHECK(max_link_difference(read_snapshot(path), W) == 0);

  {
    std::ofstream bad(path, std::ios::binary);
    bad << "NOTALATTICE";
  }
  CHECK_THROWS_AS(read_snapshot(path), std::invalid_argument);
  write_snapshot(path, W);
  {
    std::ofstream trunc(path, std::ios::binary | std::ios::in | std::ios::out);
    trunc.seekp(0, std::ios::end);
    trunc << 'x';
  }
  CHECK_THROWS(read_snapshot(path));
  CHECK_THROWS(read_snapshot("does-not-exist.lat"));
  std::remove(path.c_str());
  std::remove((path + ".json").c_str());
}

TEST_CASE("smooth link perturbations") {
  LatticeGaugeField U({4, 4, 4, 4}, GaugeGroup::U1);
  CHECK(perturb_links(U, FourierField(4, 1, 1), 0.3).links() == U.links());
  auto o = FourierField::constant(Form::basis_form(4, {2}), u1_element(1.5));
  auto V = perturb_links(U, o, 0.2);
  for (size_t x = 0; x < V.volume(); ++x) {
    CHECK(V.link(x, 0) == U.link(x, 0));
    CHECK((V.link(x, 1) - lie_exp(u1_element(1.5 * 0.2 * 0.25))).norm() < 1e-15);
  }
  CHECK_THROWS_AS(perturb_links(U, FourierField(4, 1, 2), 0.1), DimensionError);
  CHECK_THROWS_AS(perturb_links(U, FourierField(3, 1, 1), 0.1), DimensionError);

  // The clover field strength of the perturbed trivial field approaches h·do with O(a²) error.
  FourierField w(2, 1, 1);
  Frequency m{};
  m[0] = 1;
  w.add_real(m, MultiIndex::of({2}), u1_element(0.7));
  const double h = 0.1;
  auto dw = d(w);
  auto error = [&](int N) {
    auto P = perturb_links(LatticeGaugeField({N, N}, GaugeGroup::U1), w, h);
    double e = 0;
    for (size_t x = 0; x < P.volume(); ++x) {
      auto c = P.coords(x);
      Lie exact = value_at(dw, {double(c[0]) / N, double(c[1]) / N})[0] * h;
      e = std::max(e, (field_strength(P, x)[0] - exact).norm());
    }
    return e;
  };
  double e8 = error(8), e16 = error(16);
  CHECK(e16 < 0.3 * e8);
  CHECK(e16 < 0.03); // (2π a)²/6 of the peak value 0.88
}
