#include "g2lab/gauge.hpp"

#include <cmath>
#include <stdexcept>

namespace g2lab {

namespace {

void check_flux_matrix(const FluxMatrix &m) {
  const size_t n = m.size();
  if (n != 4 && n != 7) throw std::invalid_argument("flux matrix must be 4x4 or 7x7");
  for (auto &row : m)
    if (row.size() != n) throw std::invalid_argument("flux matrix must be square");
  for (size_t j = 0; j < n; ++j)
    for (size_t k = 0; k < n; ++k)
      if (m[j][k] != -m[k][j]) throw std::invalid_argument("flux matrix must be antisymmetric");
}

Matrix<double> hodge_matrix(int n, int p, const Metric<double> &g) {
  return operator_matrix<double>(n, p, n - p, [&](const Form &e) { return hodge(e, g); });
}

} // namespace

Connection Connection::trivial(int dim, int rank) { return {FourierField(dim, 2, rank), FourierField(dim, 1, rank)}; }

Connection Connection::from_potential(const FourierField &a) {
  if (a.degree() != 1) throw DimensionError("a connection potential must be a 1-form");
  return {FourierField(a.dim(), 2, a.rank()), a};
}

FourierField Connection::curvature() const {
  FourierField F = flux;
  F += d(a);
  if (rank() > 1) F += wedge(a, a);
  return F;
}

FourierField Connection::covariant_d(const FourierField &x) const {
  FourierField r = d(x);
  if (rank() > 1) r += bracket(a, x);
  return r;
}

Connection Connection::shifted(const FourierField &b, double h) const {
  Connection c = *this;
  c.a += b * h;
  return c;
}

Connection constant_curvature_u1(const FluxMatrix &m) {
  check_flux_matrix(m);
  const int n = int(m.size());
  Form f(n, 2);
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k)
      if (m[j][k] != 0) f.add(MultiIndex::of({j + 1, k + 1}), 2 * kPi * m[j][k]);
  Connection c = Connection::trivial(n, 1);
  c.flux = FourierField::constant(f, u1_element(1.0));
  return c;
}

int flux_topological_number(const FluxMatrix &m) {
  check_flux_matrix(m);
  if (m.size() != 4) throw std::invalid_argument("topological number is defined for 4x4 flux matrices");
  return -(m[0][1] * m[2][3] + m[0][2] * m[3][1] + m[0][3] * m[1][2]);
}

bool flux_is_self_dual(const FluxMatrix &m) {
  check_flux_matrix(m);
  if (m.size() != 4) throw std::invalid_argument("self-duality is defined for 4x4 flux matrices");
  return m[0][1] == m[2][3] && m[0][2] == m[3][1] && m[0][3] == m[1][2];
}

YMEnergy4D ym_energy_4d(const FourierField &F, const Metric<double> &eta) {
  if (F.dim() != 4 || F.degree() != 2) throw DimensionError("ym_energy_4d expects a 2-form field on T^4");
  if (eta.dim() != 4) throw DimensionError("ym_energy_4d expects a 4x4 metric");
  Matrix<double> star = hodge_matrix(4, 2, eta);
  Matrix<double> I = Matrix<double>::identity(6);
  FourierField Fp = apply_matrix((I + star) * 0.5, F, 2);
  FourierField Fm = apply_matrix((I - star) * 0.5, F, 2);
  YMEnergy4D r;
  r.total = norm_sq(F, &eta);
  r.sd_part = norm_sq(Fp, &eta);
  r.asd_part = norm_sq(Fm, &eta);
  r.q = kChernWeil * integral_tr(F, F, Form::constant(4, 1.0));
  return r;
}

FourierField lift_to_7d(const FourierField &base, const TorusFibration<double> &fib) {
  if (base.dim() != 4) throw DimensionError("lift_to_7d expects a field on the 4-dimensional base");
  return pullback(fib.f_matrix, base);
}

Connection lift_to_7d(const Connection &base, const TorusFibration<double> &fib) {
  return {lift_to_7d(base.flux, fib), lift_to_7d(base.a, fib)};
}

FourierField asd_defect(const FourierField &F4) {
  if (F4.dim() != 4 || F4.degree() != 2) throw DimensionError("asd_defect expects a 2-form field on T^4");
  FourierField r(7, 1, F4.rank());
  // Basis order of Λ²(R^4): 12 13 14 23 24 34; F42 = -F24.
  const int e12 = 0, e13 = 1, e14 = 2, e23 = 3, e24 = 4, e34 = 5;
  for (auto &[m, cs] : F4.modes()) {
    auto &out = r.at(m);
    out[4] = cs[e34] - cs[e12];
    out[5] = -cs[e24] - cs[e13];
    out[6] = cs[e23] - cs[e14];
  }
  return r;
}

Energy7D energy_decomposition_7d(const FourierField &F, const G2Structure<double> &s) {
  if (F.dim() != 7 || F.degree() != 2) throw DimensionError("energy_decomposition_7d expects a 2-form field on T^7");
  Energy7D r;
  r.F7sq = norm_sq(apply_matrix(s.p7, F, 2), &s.metric);
  r.F14sq = norm_sq(apply_matrix(s.p14, F, 2), &s.metric);
  r.ym = norm_sq(F, &s.metric);
  r.kappa_integral = -integral_tr(F, F, s.phi);
  return r;
}

InstantonResidual field_instanton_residual(const FourierField &F, const G2Structure<double> &s) {
  if (F.dim() != 7 || F.degree() != 2) throw DimensionError("instanton residual expects a 2-form field on T^7");
  InstantonResidual r;
  r.r_a = std::sqrt(norm_sq(wedge(F, s.star_phi), &s.metric));
  Matrix<double> defect = Matrix<double>::identity(21) - s.t_matrix * (1.0 / s.lambda14);
  r.r_b = std::sqrt(norm_sq(apply_matrix(defect, F, 2), &s.metric));
  r.f7_norm = std::sqrt(norm_sq(apply_matrix(s.p7, F, 2), &s.metric));
  return r;
}

Form q_map(const Matrix<double> &c) {
  if (c.rows() != 3 || c.cols() != 3) throw DimensionError("q_map expects a 3x3 matrix");
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (c(i, j) != -c(j, i)) throw std::invalid_argument("q_map expects an antisymmetric matrix");
  // Σ_{i<j} c_ij ε_ijk ω_k: (1,2) -> ω3, (2,3) -> ω1, (1,3) -> -ω2.
  return omega<double>(3) * c(0, 1) + omega<double>(1) * c(1, 2) - omega<double>(2) * c(0, 2);
}

size_t FiberedConnection::index(int i, int j, int k) const { return (size_t(i) * tgrid[1] + j) * tgrid[2] + k; }

size_t FiberedConnection::neighbour(size_t p, int dir, int s) const {
  int idx[3] = {int(p / (size_t(tgrid[1]) * tgrid[2])), int((p / tgrid[2]) % tgrid[1]), int(p % tgrid[2])};
  idx[dir] = ((idx[dir] + s) % tgrid[dir] + tgrid[dir]) % tgrid[dir];
  return index(idx[0], idx[1], idx[2]);
}

void FiberedConnection::validate() const {
  for (int t : tgrid)
    if (t < 4) throw std::invalid_argument("t-grid needs at least 4 points per fiber direction");
  if (A.size() != points() || sigma.size() != points()) throw std::invalid_argument("fibered connection: grid shape mismatch");
  for (size_t p = 0; p < points(); ++p) {
    if (A[p].dim() != 4 || A[p].degree() != 1) throw DimensionError("fibered connection: A_t must be 1-forms on T^4");
    for (auto &s : sigma[p])
      if (s.dim() != 4 || s.degree() != 0 || s.rank() != A[p].rank()) throw DimensionError("fibered connection: sigma must be 0-forms on T^4");
  }
}

FiberedCurvature fibered_curvature(const FiberedConnection &c) {
  c.validate();
  const size_t P = c.points();
  FiberedCurvature fc;
  fc.F_base.resize(P);
  fc.mixed.resize(P);
  fc.F_sigma.resize(P);
  for (size_t p = 0; p < P; ++p) {
    Connection A{c.base_flux.dim() ? c.base_flux : FourierField(4, 2, c.A[p].rank()), c.A[p]};
    fc.F_base[p] = A.curvature();
    for (int i = 0; i < 3; ++i) {
      double inv2h = c.tgrid[i] / 2.0;
      FourierField dA = (c.A[c.neighbour(p, i, 1)] - c.A[c.neighbour(p, i, -1)]) * inv2h;
      fc.mixed[p][i] = A.covariant_d(c.sigma[p][i]) - dA;
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        FourierField di_sj = (c.sigma[c.neighbour(p, i, 1)][j] - c.sigma[c.neighbour(p, i, -1)][j]) * (c.tgrid[i] / 2.0);
        FourierField dj_si = (c.sigma[c.neighbour(p, j, 1)][i] - c.sigma[c.neighbour(p, j, -1)][i]) * (c.tgrid[j] / 2.0);
        FourierField phi = (di_sj - dj_si) * 0.5;
        if (c.sigma[p][i].rank() > 1) phi += bracket(c.sigma[p][i], c.sigma[p][j]) * 0.5;
        fc.F_sigma[p][i][j] = phi;
      }
  }
  return fc;
}

FourierField assemble_7d(const FiberedCurvature &fc, size_t p) {
  Matrix<double> f(4, 7);
  for (int i = 0; i < 4; ++i) f(i, i) = 1;
  FourierField F = pullback(f, fc.F_base[p]);
  for (int i = 0; i < 3; ++i) {
    FourierField m7 = pullback(f, fc.mixed[p][i]);
    F += wedge(m7, Form::basis_form(7, {5 + i}));
  }
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      FourierField s7 = pullback(f, fc.F_sigma[p][i][j]);
      F += wedge(s7, Form::basis_form(7, {5 + i, 5 + j}, 2.0));
    }
  return F;
}

double fibered_instanton_residual(const FiberedCurvature &fc, const G2Structure<double> &s) {
  double total = 0;
  for (size_t p = 0; p < fc.F_base.size(); ++p) total += norm_sq(apply_matrix(s.p7, assemble_7d(fc, p), 2), &s.metric);
  return std::sqrt(total / double(fc.F_base.size()));
}

double mixed_block_norm(const FiberedCurvature &fc) {
  double worst = 0;
  for (auto &m : fc.mixed)
    for (auto &x : m) worst = std::max(worst, std::sqrt(norm_sq(x)));
  return worst;
}

} // namespace g2lab
