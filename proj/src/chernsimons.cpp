#include "g2lab/chernsimons.hpp"

#include "g2lab/parallel.hpp"

#include <cmath>
#include <functional>

namespace g2lab {

CSContext CSContext::make(const TorusFibration<double> &fib, int rank) {
  return {fib, eigen_split(standard_phi<double>()), Connection::trivial(7, rank)};
}

namespace {

void check_on_torus(const CSContext &ctx, const FourierField &x, int degree, const char *what) {
  if (x.dim() != 7) throw DimensionError(std::string(what) + ": field does not live on the 7-torus of the context");
  if (x.degree() != degree) throw DimensionError(std::string(what) + ": field has the wrong degree");
  if (x.rank() != ctx.A0.rank()) throw DimensionError(std::string(what) + ": field rank differs from the reference connection");
}

const Form &e567() {
  static const Form f = Form::basis_form(7, {5, 6, 7});
  return f;
}

} // namespace

double cs_one_form(const CSContext &ctx, const FourierField &F, const FourierField &b) {
  check_on_torus(ctx, F, 2, "cs_one_form");
  check_on_torus(ctx, b, 1, "cs_one_form");
  return kChernWeil * integral_tr(F, b, ctx.s.star_phi);
}

double cs_functional(const CSContext &ctx, const FourierField &a) {
  check_on_torus(ctx, a, 1, "cs_functional");
  if (!ctx.A0.curvature().is_zero(1e-12)) throw std::invalid_argument("cs_functional needs a flat reference connection");
  FourierField X = ctx.A0.covariant_d(a);
  if (a.rank() > 1) X += wedge(a, a) * (2.0 / 3.0);
  return kChernWeil * 0.5 * integral_tr(X, a, ctx.s.star_phi);
}

CSPath parse_cs_path(const std::string &s) {
  if (s == "linear") return CSPath::Linear;
  if (s == "quadratic-detour") return CSPath::QuadraticDetour;
  throw std::invalid_argument("unknown path '" + s + "' (expected linear or quadratic-detour)");
}

FourierField detour_direction(const FourierField &a) {
  if (a.degree() != 1) throw DimensionError("detour_direction expects a 1-form field");
  const int n = a.dim();
  FourierField c(n, 1, a.rank());
  for (auto &[m, cs] : a.modes()) {
    auto &out = c.at(m);
    for (int i = 0; i < n; ++i) out[(i + 1) % n] = cs[i];
  }
  return c;
}

double path_integrate(const CSContext &ctx, const FourierField &a, int n_steps, CSPath path) {
  check_on_torus(ctx, a, 1, "path_integrate");
  if (n_steps < 16 || n_steps % 2) throw std::invalid_argument("path_integrate needs an even number of steps, at least 16");
  FourierField c = path == CSPath::QuadraticDetour ? detour_direction(a) : FourierField(7, 1, a.rank());
  auto integrand = [&](double t) {
    Connection A = ctx.A0;
    A.a += a * t;
    A.a += c * (t * (1 - t));
    FourierField Adot = a + c * (1 - 2 * t);
    return cs_one_form(ctx, A.curvature(), Adot);
  };
  const double h = 1.0 / n_steps;
  double sum = integrand(0) + integrand(1);
  for (int k = 1; k < n_steps; ++k) sum += (k % 2 ? 4 : 2) * integrand(k * h);
  return sum * h / 3;
}

double closedness_residual(const CSContext &ctx, const Connection &A, const FourierField &a, const FourierField &b) {
  check_on_torus(ctx, a, 1, "closedness_residual");
  check_on_torus(ctx, b, 1, "closedness_residual");
  return std::fabs(integral_tr(A.covariant_d(a), b, ctx.s.star_phi) - integral_tr(a, A.covariant_d(b), ctx.s.star_phi));
}

FourierField translation_tangent(const FourierField &F, const std::vector<double> &v) {
  if (F.degree() != 2) throw DimensionError("translation_tangent expects a curvature 2-form");
  return interior(v, F);
}

std::vector<double> rho_on_translation(const CSContext &ctx, const Connection &A, const std::vector<double> &v,
                                       const std::vector<FourierField> &offsets, double h) {
  std::vector<double> out;
  out.reserve(offsets.size());
  for (auto &o : offsets) {
    FourierField F = A.shifted(o, h).curvature();
    out.push_back(cs_one_form(ctx, F, translation_tangent(F, v)));
  }
  return out;
}

double perturbed_rho(const CSContext &ctx, const FourierField &F, const FourierField &b, const Form &xi) {
  check_on_torus(ctx, F, 2, "perturbed_rho");
  check_on_torus(ctx, b, 1, "perturbed_rho");
  if (xi.dim() != 7 || xi.degree() != 4) throw DimensionError("perturbed_rho expects a 4-form on R^7");
  return kChernWeil * integral_tr(F, b, xi);
}

double base_charge(const FourierField &F) {
  if (F.dim() != 7 || F.degree() != 2) throw DimensionError("base_charge expects a 2-form field on T^7");
  return kChernWeil * integral_tr(F, F, e567());
}

std::string verdict_name(Verdict v) { return v == Verdict::Obstructed ? "instanton-obstructed" : "instanton-survives"; }

namespace {

ObstructionReport assemble_report(const Form &xi, double tol, double q, const std::function<double(const std::vector<double> &)> &rho,
                                  const std::function<double(const std::vector<double> &, const Form &)> &rphi) {
  if (xi.dim() != 7 || xi.degree() != 4) throw DimensionError("obstruction analysis expects a 4-form ξ on R^7");
  ObstructionReport r;
  r.xi = xi;
  r.split = decompose_deformation(xi);
  r.tolerance = tol;
  r.q = q;
  r.epsilon.resize(4);
  int best = 0;
  for (int i = 0; i < 4; ++i) {
    r.epsilon[i] = -0.5 * r.split.c_IV[i];
    if (std::fabs(r.epsilon[i]) > std::fabs(r.epsilon[best])) best = i;
  }
  r.v = unit_vector<double>(7, best + 1);
  r.rho_value = rho(r.v);
  r.r_phi_value = rphi(r.v, xi);
  r.n_phi_value = poincare_pairing(xi, r.v, q);
  r.verdict = std::fabs(r.r_phi_value) > 10 * tol ? Verdict::Obstructed : Verdict::Survives;
  return r;
}

} // namespace

ObstructionReport obstruction_verdict(const CSContext &ctx, const FourierField &F, const Form &xi, double tol) {
  check_on_torus(ctx, F, 2, "obstruction_verdict");
  return assemble_report(
      xi, tol, base_charge(F), [&](const std::vector<double> &v) { return cs_one_form(ctx, F, translation_tangent(F, v)); },
      [&](const std::vector<double> &v, const Form &x) { return perturbed_rho(ctx, F, translation_tangent(F, v), x); });
}

namespace {

// kChernWeil Σ_x vol ∫ tr(F ∧ X) ∧ ψ with X = v⌟F for each v in vs, or X = F when vs is empty.
std::vector<double> lattice_pairing(const LatticeGaugeField &U, const std::vector<std::vector<double>> &vs, const Form &psi) {
  if (U.ndim() != 7) throw DimensionError("lattice Chern–Simons quantities expect a 7-dimensional lattice");
  const int q = vs.empty() ? 2 : 1;
  if (psi.dim() != 7 || psi.degree() != 7 - 2 - q) throw DimensionError("lattice pairing: form degree mismatch");
  for (auto &v : vs)
    if (v.size() != 7) throw DimensionError("translation vector must have 7 components");
  const auto &b2 = basis(7, 2), &bq = basis(7, q);
  Matrix<double> K(21, int(bq.size()));
  for (int i = 0; i < 21; ++i)
    for (int j = 0; j < int(bq.size()); ++j)
      K(i, j) = top_coefficient(wedge({Form::basis_form(7, b2[i].indices()), Form::basis_form(7, bq[j].indices()), psi}));
  const size_t nout = vs.empty() ? 1 : vs.size();
  std::vector<double> per(U.volume() * nout);
  parallel_for(U.volume(), [&](size_t x) {
    auto F = field_strength(U, x);
    auto pair = [&](const std::vector<Lie> &X) {
      double s = 0;
      for (int i = 0; i < 21; ++i)
        for (int j = 0; j < int(bq.size()); ++j)
          if (K(i, j) != 0) s += K(i, j) * (F[i] * X[j]).trace().real();
      return s;
    };
    if (vs.empty()) {
      per[x] = pair(F);
      return;
    }
    for (size_t k = 0; k < nout; ++k) {
      // (v⌟F)_j = Σ_μ v_μ F_μj.
      std::vector<Lie> X(7, lie_zero(U.rank()));
      for (int i = 0; i < 21; ++i) {
        auto idx = b2[i].indices();
        int mu = idx[0] - 1, nu = idx[1] - 1;
        X[nu] += vs[k][mu] * F[i];
        X[mu] -= vs[k][nu] * F[i];
      }
      per[x * nout + k] = pair(X);
    }
  });
  std::vector<double> total(nout, 0.0);
  for (size_t x = 0; x < U.volume(); ++x)
    for (size_t k = 0; k < nout; ++k) total[k] += per[x * nout + k];
  for (double &t : total) t *= kChernWeil * U.cell_volume();
  return total;
}

} // namespace

double lattice_rho_translation(const LatticeGaugeField &U, const G2Structure<double> &s, const std::vector<double> &v) {
  return lattice_pairing(U, {v}, s.star_phi)[0];
}

std::vector<double> lattice_rho_translations(const LatticeGaugeField &U, const G2Structure<double> &s) {
  std::vector<std::vector<double>> vs;
  for (int i = 1; i <= 7; ++i) vs.push_back(unit_vector<double>(7, i));
  return lattice_pairing(U, vs, s.star_phi);
}

double lattice_perturbed_rho(const LatticeGaugeField &U, const std::vector<double> &v, const Form &xi) {
  return lattice_pairing(U, {v}, xi)[0];
}

double lattice_base_charge(const LatticeGaugeField &U) { return lattice_pairing(U, {}, e567())[0]; }

ObstructionReport lattice_obstruction_verdict(const LatticeGaugeField &U, const G2Structure<double> &s, const Form &xi, double tol) {
  return assemble_report(
      xi, tol, lattice_base_charge(U), [&](const std::vector<double> &v) { return lattice_rho_translation(U, s, v); },
      [&](const std::vector<double> &v, const Form &x) { return lattice_perturbed_rho(U, v, x); });
}

} // namespace g2lab
