#pragma once

// Chern–Simons functional ϑ and its 1-form ρ on the G2 torus, evaluated in
// lattice coordinates (φ = φ0, unit-cube volume, no Jacobians), translation
// tangents β_v = v⌟F, the perturbed 1-form r_φ and the obstruction verdict.
// All integrals carry the Chern–Weil factor 1/(8π²).

#include "g2lab/fibration.hpp"
#include "g2lab/gauge.hpp"
#include "g2lab/lattice.hpp"

#include <string>
#include <vector>

namespace g2lab {

struct CSContext {
  TorusFibration<double> fib;
  G2Structure<double> s; ///< fib.g2 in lattice coordinates, i.e. the structure of φ0
  Connection A0;         ///< reference connection, ϑ(A0) = 0

  /// Context over fib with the trivial reference connection of the given rank.
  static CSContext make(const TorusFibration<double> &fib, int rank);
};

/// ρ_A(b) = kChernWeil ∫ tr(F_A ∧ b) ∧ ⋆φ.
double cs_one_form(const CSContext &ctx, const FourierField &F, const FourierField &b);
/// ϑ(A0 + a) = kChernWeil · ½ ∫ tr(d_{A0}a ∧ a + ⅔ a∧a∧a) ∧ ⋆φ; A0 must be flat.
double cs_functional(const CSContext &ctx, const FourierField &a);

enum class CSPath { Linear, QuadraticDetour };
CSPath parse_cs_path(const std::string &s);

/// Fixed detour direction used by the quadratic path: each component of a moved
/// to the next base covector (e_i ↦ e_{i+1 mod 7}).
FourierField detour_direction(const FourierField &a);
/// Simpson rule for ∫₀¹ ρ_{A(t)}(Ȧ(t)) dt with A(t) = A0 + t a (linear) or
/// A0 + t a + t(1-t) c with c = detour_direction(a). n_steps even, ≥ 16.
double path_integrate(const CSContext &ctx, const FourierField &a, int n_steps, CSPath path);

/// |∫ tr(d_A a ∧ b - a ∧ d_A b) ∧ ⋆φ|.
double closedness_residual(const CSContext &ctx, const Connection &A, const FourierField &a, const FourierField &b);

/// β_v = v ⌟ F.
FourierField translation_tangent(const FourierField &F, const std::vector<double> &v);
/// ρ_{A + h o}(β_v) for each offset o, with the curvature recomputed at every probe.
std::vector<double> rho_on_translation(const CSContext &ctx, const Connection &A, const std::vector<double> &v,
                                       const std::vector<FourierField> &offsets, double h = 0.1);
/// r_φ(b) = kChernWeil ∫ tr(F ∧ b) ∧ ξ for a constant 4-form ξ (lattice coordinates).
double perturbed_rho(const CSContext &ctx, const FourierField &F, const FourierField &b, const Form &xi);
/// kChernWeil ∫ tr(F∧F) ∧ e567: the base charge of a lifted field.
double base_charge(const FourierField &F);

enum class Verdict { Survives, Obstructed };
std::string verdict_name(Verdict v);

struct ObstructionReport {
  Form xi;
  DeformationSplit<double> split;
  std::vector<double> v;
  std::vector<double> epsilon; ///< ε = -½ c_IV
  double rho_value = 0, r_phi_value = 0, n_phi_value = 0, q = 0, tolerance = 0;
  Verdict verdict = Verdict::Survives;
};

/// Decomposes ξ, picks the unit base vector v maximizing |ε(v)| (e1 when ε = 0), evaluates
/// ρ(β_v), r_φ(β_v) and N_φ(v) = ε(v)·q; obstructed iff |r_φ(β_v)| > 10·tol.
ObstructionReport obstruction_verdict(const CSContext &ctx, const FourierField &F, const Form &xi, double tol = 1e-12);

/// Lattice counterparts on a 7D link field in lattice coordinates (site sums).
double lattice_rho_translation(const LatticeGaugeField &U, const G2Structure<double> &s, const std::vector<double> &v);
/// ρ(β_{e_i}) for i = 1..7 from a single pass over the sites.
std::vector<double> lattice_rho_translations(const LatticeGaugeField &U, const G2Structure<double> &s);
double lattice_perturbed_rho(const LatticeGaugeField &U, const std::vector<double> &v, const Form &xi);
double lattice_base_charge(const LatticeGaugeField &U);
ObstructionReport lattice_obstruction_verdict(const LatticeGaugeField &U, const G2Structure<double> &s, const Form &xi,
                                              double tol = 1e-10);

} // namespace g2lab
