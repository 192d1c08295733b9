#pragma once

// Continuum gauge fields on unit tori: connections as a constant abelian
// background flux plus a periodic potential, their curvature and energies,
// the lift along a torus fibration, and the fibered curvature blocks of a
// connection on T^4 × T^3 written as A_t + Σ σ_i dt^i.

#include "g2lab/fibration.hpp"
#include "g2lab/fourier.hpp"

#include <array>
#include <vector>

namespace g2lab {

constexpr double kPi = 3.14159265358979323846264338327950288;
/// Chern–Weil normalization 1/(8π²): q = kChernWeil ∫ tr(F ∧ F).
constexpr double kChernWeil = 1.0 / (8.0 * kPi * kPi);

/// A connection on a bundle over the unit torus. Nontrivial bundles are
/// represented by a constant background curvature `flux` (zero-mode only,
/// rank 1) whose potential is never stored; `a` is a periodic correction.
struct Connection {
  FourierField flux; ///< degree 2
  FourierField a;    ///< degree 1

  static Connection trivial(int dim, int rank);
  static Connection from_potential(const FourierField &a);
  int dim() const { return a.dim(); }
  int rank() const { return a.rank(); }

  /// F = flux + da + a ∧ a.
  FourierField curvature() const;
  /// d_A x = dx + [a ∧ x] (the background potential is abelian and drops out).
  FourierField covariant_d(const FourierField &x) const;
  /// The connection A + h·b.
  Connection shifted(const FourierField &b, double h) const;
};

/// Integer antisymmetric flux matrix, 4×4 or 7×7 (entries m[j][k], j < k significant).
using FluxMatrix = std::vector<std::vector<int>>;

/// U(1) connection with constant curvature F = 2πi Σ_{j<k} m_jk e^{jk}.
Connection constant_curvature_u1(const FluxMatrix &m);
/// q = -(m12 m34 + m13 m42 + m14 m23), the value of kChernWeil ∫ tr(F∧F) for the field above on T^4.
int flux_topological_number(const FluxMatrix &m);
/// m12 = m34, m13 = m42, m14 = m23.
bool flux_is_self_dual(const FluxMatrix &m);

struct YMEnergy4D {
  double total = 0, sd_part = 0, asd_part = 0, q = 0;
};
/// ‖F‖², ‖F⁺‖², ‖F⁻‖² (⋆F± = ±F for the orientation e1234) and q = kChernWeil ∫tr(F∧F).
YMEnergy4D ym_energy_4d(const FourierField &F, const Metric<double> &eta = Metric<double>::euclidean(4));

/// Pullback of a base connection along the fibration map, in lattice coordinates.
Connection lift_to_7d(const Connection &base, const TorusFibration<double> &fib);
FourierField lift_to_7d(const FourierField &base, const TorusFibration<double> &fib);

/// O(F⁻) = (F34 - F12) e5 + (F42 - F13) e6 + (F23 - F14) e7 for a base 2-form.
FourierField asd_defect(const FourierField &F4);

struct Energy7D {
  double F7sq = 0, F14sq = 0, ym = 0, kappa_integral = 0;
};
/// ∫|π7 F|², ∫|π14 F|², ∫|F|² and the independent integral -∫ tr(F∧F) ∧ φ.
Energy7D energy_decomposition_7d(const FourierField &F, const G2Structure<double> &s);
/// (‖F ∧ ⋆φ‖, ‖F - λ14⁻¹ ⋆(F∧φ)‖, ‖π7 F‖) as L² norms over the unit torus.
InstantonResidual field_instanton_residual(const FourierField &F, const G2Structure<double> &s);

/// Q(e^{4+i} ∧ e^{4+j}) = Σ_k ε_ijk ω_k applied to Σ_{i<j} c_ij e^{4+i,4+j}.
Form q_map(const Matrix<double> &c);

/// 𝐀 = A_t + Σ σ_i dt^i on T^4 × T^3, sampled on a periodic t-grid (t1 slowest).
struct FiberedConnection {
  std::array<int, 3> tgrid{4, 4, 4};
  FourierField base_flux;                      ///< constant abelian background, degree 2 on T^4
  std::vector<FourierField> A;                 ///< periodic base potentials, degree 1
  std::vector<std::array<FourierField, 3>> sigma; ///< degree 0 fields

  size_t points() const { return size_t(tgrid[0]) * tgrid[1] * tgrid[2]; }
  size_t index(int i, int j, int k) const;
  /// Neighbour of grid point p shifted by s along t-direction dir (periodic).
  size_t neighbour(size_t p, int dir, int s) const;
  void validate() const;
};

struct FiberedCurvature {
  std::vector<FourierField> F_base;                       ///< F_{A_t}
  std::vector<std::array<FourierField, 3>> mixed;         ///< d_{A_t}σ_i - ∂A_t/∂t^i
  /// Coefficients Φ_ij of F_σ = Σ_{i,j} Φ_ij dt^i ∧ dt^j (full double sum, Φ antisymmetric):
  /// Φ_ij = ½(∂_i σ_j - ∂_j σ_i) + ½[σ_i, σ_j].
  std::vector<std::array<std::array<FourierField, 3>, 3>> F_sigma;
};

/// Blocks of F_𝐀 = F_{A_t} + Σ (d_{A_t}σ_i - ∂_i A_t) ∧ dt^i + F_σ; t-derivatives by
/// centered differences on the periodic grid.
FiberedCurvature fibered_curvature(const FiberedConnection &c);
/// The full 7D curvature at grid point p (x-dependence only), base in e1..e4, t in e5..e7.
FourierField assemble_7d(const FiberedCurvature &fc, size_t p);
/// sqrt of the t-averaged ∫|π7 F_𝐀|² over the grid.
double fibered_instanton_residual(const FiberedCurvature &fc, const G2Structure<double> &s);
/// Max over grid points and i of the L² norm of the mixed block.
double mixed_block_norm(const FiberedCurvature &fc);

} // namespace g2lab
