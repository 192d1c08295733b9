#include "g2lab/lattice.hpp"

#include "g2lab/parallel.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace g2lab {

GaugeGroup parse_group(const std::string &s) {
  if (s == "u1" || s == "U1") return GaugeGroup::U1;
  if (s == "su2" || s == "SU2") return GaugeGroup::SU2;
  throw std::invalid_argument("unknown gauge group '" + s + "' (expected u1 or su2)");
}

int group_rank(GaugeGroup g) { return g == GaugeGroup::U1 ? 1 : 2; }

std::string group_name(GaugeGroup g) { return g == GaugeGroup::U1 ? "u1" : "su2"; }

LatticeGaugeField::LatticeGaugeField(std::vector<int> dims, GaugeGroup group, std::vector<double> spacing)
    : dims_(std::move(dims)), spacing_(std::move(spacing)), group_(group) {
  if (dims_.empty() || int(dims_.size()) > kMaxDim) throw DimensionError("lattice dimension must be 1..7");
  volume_ = 1;
  for (int n : dims_) {
    if (n < 2) throw std::invalid_argument("lattice extents must be at least 2");
    volume_ *= size_t(n);
  }
  if (spacing_.empty())
    for (int n : dims_) spacing_.push_back(1.0 / n);
  if (spacing_.size() != dims_.size()) throw std::invalid_argument("lattice spacing must have one entry per direction");
  for (double a : spacing_)
    if (!(a > 0)) throw std::invalid_argument("lattice spacing must be positive");
  links_.assign(volume_ * dims_.size(), lie_identity(rank()));
  const size_t d = dims_.size();
  neighbours_.resize(volume_ * d * 2);
  for (size_t s = 0; s < volume_; ++s) {
    auto x = coords(s);
    for (size_t mu = 0; mu < d; ++mu) {
      for (int sgn : {-1, 1}) {
        auto y = x;
        y[mu] += sgn;
        neighbours_[(s * d + mu) * 2 + (sgn > 0)] = site(y);
      }
    }
  }
}

double LatticeGaugeField::cell_volume() const {
  double v = 1;
  for (double a : spacing_) v *= a;
  return v;
}

size_t LatticeGaugeField::site(std::vector<int> x) const {
  if (x.size() != dims_.size()) throw DimensionError("site coordinates have the wrong dimension");
  size_t s = 0;
  for (size_t i = 0; i < dims_.size(); ++i) s = s * dims_[i] + size_t(((x[i] % dims_[i]) + dims_[i]) % dims_[i]);
  return s;
}

std::vector<int> LatticeGaugeField::coords(size_t s) const {
  std::vector<int> x(dims_.size());
  for (size_t i = dims_.size(); i-- > 0;) {
    x[i] = int(s % dims_[i]);
    s /= dims_[i];
  }
  return x;
}

void LatticeGaugeField::check_site(size_t s) const {
  if (s >= volume_) throw std::out_of_range("lattice site index out of range");
}

void LatticeGaugeField::check_direction(int mu) const {
  if (mu < 0 || mu >= ndim()) throw std::out_of_range("lattice direction out of range");
}

double LatticeGaugeField::unitarity_defect() const {
  double worst = 0;
  for (auto &u : links_) worst = std::max(worst, g2lab::unitarity_defect(u));
  return worst;
}

void LatticeGaugeField::reunitarize() {
  for (auto &u : links_) u = g2lab::reunitarize(u);
}

namespace {

struct Factor {
  size_t site;
  int dir;
  bool dagger;
};

using Leaf = std::array<Factor, 4>;

// The four plaquettes of the clover at x in the (μ,ν) plane, all with the same orientation.
std::array<Leaf, 4> clover_leaves(const LatticeGaugeField &U, size_t x, int mu, int nu) {
  size_t xpm = U.shift(x, mu, 1), xpn = U.shift(x, nu, 1), xmm = U.shift(x, mu, -1), xmn = U.shift(x, nu, -1);
  size_t xpn_mm = U.shift(xpn, mu, -1), xmm_mn = U.shift(xmm, nu, -1), xmn_pm = U.shift(xmn, mu, 1);
  return {{
      {{{x, mu, false}, {xpm, nu, false}, {xpn, mu, true}, {x, nu, true}}},
      {{{x, nu, false}, {xpn_mm, mu, true}, {xmm, nu, true}, {xmm, mu, false}}},
      {{{xmm, mu, true}, {xmm_mn, nu, true}, {xmm_mn, mu, false}, {xmn, nu, false}}},
      {{{xmn, nu, true}, {xmn, mu, false}, {xmn_pm, nu, false}, {x, mu, true}}},
  }};
}

Lie factor_value(const LatticeGaugeField &U, const Factor &f) {
  const Lie &u = U.link(f.site, f.dir);
  return f.dagger ? Lie(u.adjoint()) : u;
}

Lie leaf_product(const LatticeGaugeField &U, const Leaf &l) {
  Lie p = factor_value(U, l[0]);
  for (int k = 1; k < 4; ++k) p = p * factor_value(U, l[k]);
  return p;
}

Lie clover_from_sum(const Lie &q) {
  Lie f = (q - q.adjoint()) / 8.0;
  if (f.rows() > 1) f -= (f.trace() / double(f.rows())) * lie_identity(int(f.rows()));
  return f;
}

std::vector<std::pair<int, int>> planes(int n) {
  std::vector<std::pair<int, int>> p;
  for (int mu = 0; mu < n; ++mu)
    for (int nu = mu + 1; nu < n; ++nu) p.push_back({mu, nu});
  return p;
}

// Clovers in lattice units for every site, planes in lexicographic order.
std::vector<std::vector<Lie>> all_clovers(const LatticeGaugeField &U) {
  auto pl = planes(U.ndim());
  std::vector<std::vector<Lie>> out(U.volume());
  parallel_for(U.volume(), [&](size_t x) {
    out[x].reserve(pl.size());
    for (auto [mu, nu] : pl) out[x].push_back(clover(U, x, mu, nu));
  });
  return out;
}

std::vector<double> plane_scales(const LatticeGaugeField &U) {
  std::vector<double> s;
  for (auto [mu, nu] : planes(U.ndim())) s.push_back(U.spacing()[mu] * U.spacing()[nu]);
  return s;
}

double frob2(const Lie &m) { return m.squaredNorm(); }

void require_4d(const LatticeGaugeField &U, const char *what) {
  if (U.ndim() != 4) throw DimensionError(std::string(what) + " expects a 4-dimensional lattice");
}

// F⁻ components (12, 13, 14) from physical F in the order 12 13 14 23 24 34.
std::array<Lie, 3> asd_components(const std::vector<Lie> &F) {
  return {(F[0] - F[5]) * 0.5, (F[1] + F[4]) * 0.5, (F[2] - F[3]) * 0.5};
}

std::array<Lie, 3> sd_components(const std::vector<Lie> &F) {
  return {(F[0] + F[5]) * 0.5, (F[1] - F[4]) * 0.5, (F[2] + F[3]) * 0.5};
}

double site_charge(const std::vector<Lie> &Fh) {
  return (Fh[0] * Fh[5] - Fh[1] * Fh[4] + Fh[2] * Fh[3]).trace().real() / (4 * kPi * kPi);
}

} // namespace

Lie plaquette(const LatticeGaugeField &U, size_t site, int mu, int nu) {
  U.check_site(site);
  U.check_direction(mu);
  U.check_direction(nu);
  if (mu == nu) throw std::out_of_range("plaquette needs two distinct directions");
  return U.link(site, mu) * U.link(U.shift(site, mu, 1), nu) * U.link(U.shift(site, nu, 1), mu).adjoint() * U.link(site, nu).adjoint();
}

Lie clover(const LatticeGaugeField &U, size_t site, int mu, int nu) {
  U.check_site(site);
  U.check_direction(mu);
  U.check_direction(nu);
  if (mu == nu) throw std::out_of_range("clover needs two distinct directions");
  Lie q = lie_zero(U.rank());
  for (auto &l : clover_leaves(U, site, mu, nu)) q += leaf_product(U, l);
  return clover_from_sum(q);
}

std::vector<Lie> field_strength(const LatticeGaugeField &U, size_t site) {
  auto pl = planes(U.ndim());
  std::vector<Lie> F;
  F.reserve(pl.size());
  for (auto [mu, nu] : pl) F.push_back(clover(U, site, mu, nu) / (U.spacing()[mu] * U.spacing()[nu]));
  return F;
}

double clover_charge(const LatticeGaugeField &U) {
  require_4d(U, "clover_charge");
  auto C = all_clovers(U);
  double q = 0;
  for (auto &c : C) q += site_charge(c);
  return q;
}

YMEnergy4D lattice_energy_4d(const LatticeGaugeField &U) {
  require_4d(U, "lattice_energy_4d");
  auto C = all_clovers(U);
  auto sc = plane_scales(U);
  const double V = U.cell_volume();
  YMEnergy4D e;
  for (auto &c : C) {
    std::vector<Lie> F(6);
    for (int i = 0; i < 6; ++i) F[i] = c[i] / sc[i];
    for (auto &f : F) e.total += V * frob2(f);
    for (auto &f : sd_components(F)) e.sd_part += 2 * V * frob2(f);
    for (auto &f : asd_components(F)) e.asd_part += 2 * V * frob2(f);
    e.q += site_charge(c);
  }
  return e;
}

double asd_energy(const LatticeGaugeField &U) { return lattice_energy_4d(U).asd_part; }

double asd_fraction(const LatticeGaugeField &U) {
  auto e = lattice_energy_4d(U);
  return e.total > 1e-300 ? e.asd_part / e.total : 0.0;
}

std::vector<Lie> asd_gradient(const LatticeGaugeField &U) {
  require_4d(U, "asd_gradient");
  auto C = all_clovers(U);
  auto sc = plane_scales(U);
  auto pl = planes(4);
  const double V = U.cell_volume();
  constexpr int kPerSite = 6 * 4 * 4;
  std::vector<std::pair<size_t, Lie>> contrib(U.volume() * kPerSite);
  parallel_for(U.volume(), [&](size_t x) {
    std::vector<Lie> F(6);
    for (int i = 0; i < 6; ++i) F[i] = C[x][i] / sc[i];
    auto m = asd_components(F);
    // ∂‖F⁻‖²/∂F̂ for each plane: H = 2V F⁻_plane / (a_μ a_ν).
    std::array<Lie, 6> Fm = {m[0], m[1], m[2], -m[2], m[1], -m[0]};
    size_t slot = x * kPerSite;
    for (int p = 0; p < 6; ++p) {
      Lie H = Fm[p] * (2 * V / sc[p]);
      for (auto &leaf : clover_leaves(U, x, pl[p].first, pl[p].second)) {
        std::array<Lie, 4> f;
        for (int k = 0; k < 4; ++k) f[k] = factor_value(U, leaf[k]);
        for (int k = 0; k < 4; ++k) {
          Lie A = lie_identity(U.rank()), B = lie_identity(U.rank());
          for (int j = 0; j < k; ++j) A = A * f[j];
          for (int j = k + 1; j < 4; ++j) B = B * f[j];
          // δE = -¼ Re tr(H δQ); a left variation δU = XU enters as A X U B or -A U† X B.
          Lie z = leaf[k].dagger ? Lie(0.25 * B * H * A * f[k]) : Lie(-0.25 * f[k] * B * H * A);
          contrib[slot++] = {leaf[k].site * 4 + leaf[k].dir, z};
        }
      }
    }
  });
  std::vector<Lie> Z(U.links().size(), lie_zero(U.rank()));
  for (auto &[i, z] : contrib) Z[i] += z;
  for (auto &z : Z) z = project_algebra(z.adjoint());
  return Z;
}

CoolingResult cool_to_sd(const LatticeGaugeField &U, const CoolingOptions &opts) {
  require_4d(U, "cool_to_sd");
  if (opts.max_steps < 0 || !(opts.step_size > 0) || !(opts.tol > 0) || opts.max_halvings < 0)
    throw std::invalid_argument("cooling options out of range");
  CoolingResult r;
  r.field = U;
  auto measure = [](const LatticeGaugeField &f, int step, double s) {
    auto e = lattice_energy_4d(f);
    return CoolingRecord{step, e.total > 1e-300 ? e.asd_part / e.total : 0.0, e.q, e.asd_part, s};
  };
  double s = opts.step_size;
  CoolingRecord cur = measure(r.field, 0, s);
  r.history.push_back(cur);
  if (cur.asd_fraction < opts.tol) {
    r.converged = true;
    return r;
  }
  for (int step = 1; step <= opts.max_steps; ++step) {
    auto G = asd_gradient(r.field);
    bool accepted = false;
    for (int h = 0; h <= opts.max_halvings; ++h) {
      LatticeGaugeField trial = r.field;
      auto &links = trial.links();
      for (size_t i = 0; i < links.size(); ++i) links[i] = reunitarize(lie_exp(G[i] * -s) * links[i]);
      CoolingRecord next = measure(trial, step, s);
      if (next.asd_energy <= cur.asd_energy && next.asd_fraction <= cur.asd_fraction) {
        r.field = std::move(trial);
        cur = next;
        accepted = true;
        break;
      }
      s *= 0.5;
    }
    if (!accepted) throw CoolingDivergence("cooling stalled: no decrease after " + std::to_string(opts.max_halvings) + " halvings", r.history);
    r.history.push_back(cur);
    r.steps = step;
    if (cur.asd_fraction < opts.tol) {
      r.converged = true;
      break;
    }
    s *= 1.5;
  }
  return r;
}

LatticeGaugeField gauge_transform(const LatticeGaugeField &U, const std::vector<Lie> &g) {
  if (g.size() != U.volume()) throw std::invalid_argument("gauge transformation needs one element per site");
  LatticeGaugeField V = U;
  for (size_t x = 0; x < U.volume(); ++x)
    for (int mu = 0; mu < U.ndim(); ++mu) V.link(x, mu) = g[x] * U.link(x, mu) * g[U.shift(x, mu, 1)].adjoint();
  return V;
}

namespace {

Lie random_algebra(int rank, SplitMix64 &rng) {
  if (rank == 1) return u1_element(rng.normal());
  Lie x = lie_zero(2);
  for (int a = 1; a <= 3; ++a) x += rng.normal() * su2_generator(a);
  return x;
}

} // namespace

std::vector<Lie> random_gauge(const LatticeGaugeField &U, SplitMix64 &rng) {
  std::vector<Lie> g(U.volume());
  for (auto &x : g) x = lie_exp(random_algebra(U.rank(), rng) * 2.0);
  return g;
}

LatticeGaugeField add_noise(const LatticeGaugeField &U, double amplitude, SplitMix64 &rng) {
  LatticeGaugeField V = U;
  for (auto &u : V.links()) u = reunitarize(lie_exp(random_algebra(U.rank(), rng) * amplitude) * u);
  return V;
}

LatticeGaugeField perturb_links(const LatticeGaugeField &U, const FourierField &o, double h) {
  if (o.dim() != U.ndim() || o.degree() != 1 || o.rank() != U.rank()) throw DimensionError("offset must be a 1-form on the lattice torus with the gauge rank");
  LatticeGaugeField V = U;
  const int n = U.ndim();
  parallel_for(U.volume(), [&](size_t x) {
    auto c = U.coords(x);
    for (int mu = 0; mu < n; ++mu) {
      std::vector<double> mid(n);
      for (int i = 0; i < n; ++i) mid[i] = (c[i] + (i == mu ? 0.5 : 0.0)) * U.spacing()[i];
      Lie o_mu = value_at(o, mid)[mu];
      V.link(x, mu) = reunitarize(lie_exp(o_mu * (h * U.spacing()[mu])) * U.link(x, mu));
    }
  });
  return V;
}

LatticeGaugeField discretize_u1_flux(const std::vector<int> &dims, const FluxMatrix &m) {
  const size_t n = dims.size();
  if (m.size() != n) throw DimensionError("flux matrix size must match the lattice dimension");
  for (auto &row : m)
    if (row.size() != n) throw std::invalid_argument("flux matrix must be square");
  for (size_t j = 0; j < n; ++j)
    for (size_t k = 0; k < n; ++k)
      if (m[j][k] != -m[k][j]) throw std::invalid_argument("flux matrix must be antisymmetric");
  LatticeGaugeField U(dims, GaugeGroup::U1);
  for (size_t s = 0; s < U.volume(); ++s) {
    auto x = U.coords(s);
    for (size_t k = 0; k < n; ++k) {
      // Potential A_k = 2π Σ_{j<k} m_jk x_j; links crossing the x_k boundary carry the
      // transition factor that restores periodicity of every plaquette.
      double theta = 0;
      for (size_t j = 0; j < k; ++j) theta += 2 * kPi * m[j][k] * double(x[j]) / (double(dims[j]) * dims[k]);
      if (x[k] == dims[k] - 1)
        for (size_t l = k + 1; l < n; ++l) theta -= 2 * kPi * m[k][l] * double(x[l]) / dims[l];
      U.link(s, int(k)) = lie_exp(u1_element(theta));
    }
  }
  return U;
}

LatticeGaugeField instanton_seed(const std::vector<int> &dims, double rho, int sign) {
  if (dims.size() != 4) throw DimensionError("instanton_seed expects a 4-dimensional lattice");
  if (!(rho > 0)) throw std::invalid_argument("instanton scale must be positive");
  if (sign != 1 && sign != -1) throw std::invalid_argument("instanton sign must be +1 or -1");
  LatticeGaugeField U(dims, GaugeGroup::SU2);
  const auto &a = U.spacing();
  std::array<double, 4> c;
  for (int i = 0; i < 4; ++i) c[i] = ((dims[i] - 1) / 2.0 + (dims[i] % 2 ? 0.5 : 0.0)) * a[i];
  // 't Hooft symbols; the δ terms flip sign between the two charge signs.
  auto eta = [&](int A, int mu, int nu) -> double {
    double d = 0;
    if (mu < 3 && nu < 3) {
      if ((A == mu) || (A == nu) || (mu == nu)) return 0;
      d = ((mu - A + 3) % 3 == 1) ? 1 : -1; // ε_{A mu nu}
      return d;
    }
    if (nu == 3 && mu == A) d = 1;
    if (mu == 3 && nu == A) d = -1;
    return sign < 0 ? -d : d;
  };
  for (size_t s = 0; s < U.volume(); ++s) {
    auto n = U.coords(s);
    for (int mu = 0; mu < 4; ++mu) {
      std::array<double, 4> x;
      for (int i = 0; i < 4; ++i) x[i] = n[i] * a[i] - c[i] + (i == mu ? a[mu] / 2 : 0.0);
      double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3];
      double f = 2 * rho * rho / (r2 * (r2 + rho * rho));
      Lie A = lie_zero(2);
      for (int k = 0; k < 3; ++k) {
        double coef = 0;
        for (int nu = 0; nu < 4; ++nu) coef += eta(k, mu, nu) * x[nu];
        A += (f * coef) * su2_generator(k + 1);
      }
      U.link(s, mu) = lie_exp(A * a[mu]);
    }
  }
  return U;
}

LatticeGaugeField lift_to_7d(const LatticeGaugeField &base, const std::vector<int> &tdims) {
  if (base.ndim() != 4) throw DimensionError("lift_to_7d expects a 4-dimensional base lattice");
  if (tdims.size() != 3) throw DimensionError("lift_to_7d expects three fiber extents");
  std::vector<int> dims = base.dims();
  std::vector<double> spacing = base.spacing();
  for (int t : tdims) {
    dims.push_back(t);
    spacing.push_back(1.0 / t);
  }
  LatticeGaugeField U(dims, base.group(), spacing);
  const size_t fiber = size_t(tdims[0]) * tdims[1] * tdims[2];
  for (size_t s = 0; s < U.volume(); ++s)
    for (int mu = 0; mu < 4; ++mu) U.link(s, mu) = base.link(s / fiber, mu);
  return U;
}

namespace {

struct Structure7 {
  Matrix<double> p7, p14, defect, wedge_star, kappa;
};

Structure7 lattice_structure(const G2Structure<double> &s) {
  if (!s.metric.is_identity()) throw std::invalid_argument("lattice G2 quantities expect φ0 in lattice coordinates (metric I)");
  Structure7 r;
  r.p7 = s.p7;
  r.p14 = s.p14;
  r.defect = Matrix<double>::identity(21) - s.t_matrix * (1.0 / s.lambda14);
  r.wedge_star = operator_matrix<double>(7, 2, 6, [&](const Form &e) { return wedge(e, s.star_phi); });
  const auto &b = basis(7, 2);
  r.kappa = Matrix<double>(21, 21);
  for (int i = 0; i < 21; ++i)
    for (int j = 0; j < 21; ++j)
      r.kappa(i, j) = top_coefficient(wedge({Form::basis_form(7, b[i].indices()), Form::basis_form(7, b[j].indices()), s.phi}));
  return r;
}

double applied_norm2(const Matrix<double> &M, const std::vector<Lie> &F) {
  double n = 0;
  for (int r = 0; r < M.rows(); ++r) {
    Lie acc = lie_zero(int(F[0].rows()));
    for (int c = 0; c < M.cols(); ++c)
      if (M(r, c) != 0) acc += M(r, c) * F[c];
    n += frob2(acc);
  }
  return n;
}

void require_7d(const LatticeGaugeField &U, const char *what) {
  if (U.ndim() != 7) throw DimensionError(std::string(what) + " expects a 7-dimensional lattice");
}

} // namespace

Energy7D lattice_energy_7d(const LatticeGaugeField &U, const G2Structure<double> &s) {
  require_7d(U, "lattice_energy_7d");
  Structure7 st = lattice_structure(s);
  std::vector<std::array<double, 4>> per(U.volume());
  parallel_for(U.volume(), [&](size_t x) {
    auto F = field_strength(U, x);
    double k = 0, ym = 0;
    for (int i = 0; i < 21; ++i) {
      ym += frob2(F[i]);
      for (int j = 0; j < 21; ++j)
        if (st.kappa(i, j) != 0) k += st.kappa(i, j) * (F[i] * F[j]).trace().real();
    }
    per[x] = {applied_norm2(st.p7, F), applied_norm2(st.p14, F), ym, -k};
  });
  Energy7D e;
  const double V = U.cell_volume();
  for (auto &p : per) {
    e.F7sq += V * p[0];
    e.F14sq += V * p[1];
    e.ym += V * p[2];
    e.kappa_integral += V * p[3];
  }
  return e;
}

InstantonResidual lattice_instanton_residual(const LatticeGaugeField &U, const G2Structure<double> &s) {
  require_7d(U, "lattice_instanton_residual");
  Structure7 st = lattice_structure(s);
  std::vector<std::array<double, 3>> per(U.volume());
  parallel_for(U.volume(), [&](size_t x) {
    auto F = field_strength(U, x);
    per[x] = {applied_norm2(st.wedge_star, F), applied_norm2(st.defect, F), applied_norm2(st.p7, F)};
  });
  std::array<double, 3> t{};
  for (auto &p : per)
    for (int i = 0; i < 3; ++i) t[i] += p[i];
  const double V = U.cell_volume();
  return {std::sqrt(V * t[0]), std::sqrt(V * t[1]), std::sqrt(V * t[2])};
}

namespace {

constexpr char kMagic[8] = {'G', '2', 'L', 'A', 'T', 0, 0, 0};
constexpr std::uint32_t kSnapshotVersion = 1;

void put_u32(std::ostream &o, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) o.put(char((v >> (8 * i)) & 0xff));
}

void put_f64(std::ostream &o, double d) {
  std::uint64_t v = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) o.put(char((v >> (8 * i)) & 0xff));
}

std::uint64_t get_bytes(std::istream &in, int n) {
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i) {
    int c = in.get();
    if (c == EOF) throw std::invalid_argument("lattice snapshot is truncated");
    v |= std::uint64_t(std::uint8_t(c)) << (8 * i);
  }
  return v;
}

std::uint32_t get_u32(std::istream &in) { return std::uint32_t(get_bytes(in, 4)); }
double get_f64(std::istream &in) { return std::bit_cast<double>(get_bytes(in, 8)); }

} // namespace

void write_snapshot(const std::string &path, const LatticeGaugeField &U, const nlohmann::json &meta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open '" + path + "' for writing");
  out.write(kMagic, 8);
  put_u32(out, kSnapshotVersion);
  put_u32(out, std::uint32_t(U.ndim()));
  for (int n : U.dims()) put_u32(out, std::uint32_t(n));
  put_u32(out, U.group() == GaugeGroup::U1 ? 0 : 1);
  for (double a : U.spacing()) put_f64(out, a);
  for (auto &u : U.links())
    for (int i = 0; i < u.rows(); ++i)
      for (int j = 0; j < u.cols(); ++j) {
        put_f64(out, u(i, j).real());
        put_f64(out, u(i, j).imag());
      }
  if (!out) throw std::runtime_error("failed writing '" + path + "'");

  nlohmann::json m = {{"format", "g2lab-lattice"},
                      {"version", kSnapshotVersion},
                      {"dims", U.dims()},
                      {"group", group_name(U.group())},
                      {"spacing", U.spacing()},
                      {"links", U.links().size()},
                      {"byte_order", "little-endian"},
                      {"layout", "site row-major (first coordinate slowest), direction, matrix row-major (re, im)"}};
  m["meta"] = meta;
  std::ofstream js(path + ".json");
  if (!js) throw std::invalid_argument("cannot open '" + path + ".json' for writing");
  js << m.dump(2) << "\n";
}

LatticeGaugeField read_snapshot(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open lattice snapshot '" + path + "'");
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0) throw std::invalid_argument("'" + path + "' is not a g2lab lattice snapshot");
  if (get_u32(in) != kSnapshotVersion) throw std::invalid_argument("unsupported lattice snapshot version");
  std::uint32_t nd = get_u32(in);
  if (nd < 1 || nd > std::uint32_t(kMaxDim)) throw std::invalid_argument("lattice snapshot has an invalid dimension");
  std::vector<int> dims(nd);
  for (auto &n : dims) {
    std::uint32_t v = get_u32(in);
    if (v < 2 || v > 4096) throw std::invalid_argument("lattice snapshot has an invalid extent");
    n = int(v);
  }
  std::uint32_t g = get_u32(in);
  if (g > 1) throw std::invalid_argument("lattice snapshot has an unknown gauge group");
  std::vector<double> spacing(nd);
  for (auto &a : spacing) a = get_f64(in);
  LatticeGaugeField U(dims, g == 0 ? GaugeGroup::U1 : GaugeGroup::SU2, spacing);
  for (auto &u : U.links())
    for (int i = 0; i < u.rows(); ++i)
      for (int j = 0; j < u.cols(); ++j) {
        double re = get_f64(in), im = get_f64(in);
        u(i, j) = cplx(re, im);
      }
  if (in.peek() != EOF) throw std::invalid_argument("lattice snapshot has trailing data");
  return U;
}

} // namespace g2lab
