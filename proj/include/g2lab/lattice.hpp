#pragma once

// Link fields on periodic hypercubic lattices covering the unit torus. Link
// U_μ(x) sits between sites x and x+μ̂; the spacing along μ is a_μ (default
// 1/N_μ). Field strengths use the clover average in lattice units and are
// converted to physical units by 1/(a_μ a_ν); site sums carry the cell volume.

#include "g2lab/g2core.hpp"
#include "g2lab/gauge.hpp"
#include "g2lab/lie.hpp"
#include "g2lab/rng.hpp"

#include "json.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace g2lab {

enum class GaugeGroup { U1, SU2 };

int group_rank(GaugeGroup g);
std::string group_name(GaugeGroup g);
GaugeGroup parse_group(const std::string &s);

class LatticeGaugeField {
public:
  LatticeGaugeField() = default;
  /// All links identity; empty spacing means a_μ = 1/N_μ.
  LatticeGaugeField(std::vector<int> dims, GaugeGroup group, std::vector<double> spacing = {});

  int ndim() const { return int(dims_.size()); }
  size_t volume() const { return volume_; }
  GaugeGroup group() const { return group_; }
  int rank() const { return group_rank(group_); }
  const std::vector<int> &dims() const { return dims_; }
  const std::vector<double> &spacing() const { return spacing_; }
  double cell_volume() const;

  Lie &link(size_t site, int mu) { return links_[site * dims_.size() + mu]; }
  const Lie &link(size_t site, int mu) const { return links_[site * dims_.size() + mu]; }
  std::vector<Lie> &links() { return links_; }
  const std::vector<Lie> &links() const { return links_; }

  /// Row-major site index (first coordinate slowest); coordinates wrap periodically.
  size_t site(std::vector<int> x) const;
  std::vector<int> coords(size_t site) const;
  /// Neighbour x ± μ̂ (s = +1 or -1).
  size_t shift(size_t site, int mu, int s) const { return neighbours_[(site * dims_.size() + mu) * 2 + (s > 0)]; }

  void check_site(size_t site) const;
  void check_direction(int mu) const;
  double unitarity_defect() const;
  void reunitarize();

private:
  std::vector<int> dims_;
  std::vector<double> spacing_;
  GaugeGroup group_ = GaugeGroup::U1;
  size_t volume_ = 0;
  std::vector<Lie> links_;
  std::vector<size_t> neighbours_;
};

/// U_μ(x) U_ν(x+μ) U_μ(x+ν)† U_ν(x)†.
Lie plaquette(const LatticeGaugeField &U, size_t site, int mu, int nu);
/// Anti-Hermitian clover average F̂_μν(x) = (Q - Q†)/8 (traceless part for SU(2)), lattice units.
Lie clover(const LatticeGaugeField &U, size_t site, int mu, int nu);
/// Physical field strength at a site as a 2-form: components F_μν, μ<ν, lexicographic.
std::vector<Lie> field_strength(const LatticeGaugeField &U, size_t site);
/// (1/32π²) Σ_x ε^{μνρσ} tr(F̂_μν F̂_ρσ); 4D only.
double clover_charge(const LatticeGaugeField &U);

/// ‖F‖², ‖F⁺‖², ‖F⁻‖² as site sums (Euclidean metric on the unit torus) and the clover charge.
YMEnergy4D lattice_energy_4d(const LatticeGaugeField &U);
/// ‖F⁻‖² alone.
double asd_energy(const LatticeGaugeField &U);
/// ‖F⁻‖² / ‖F‖², zero for a flat field.
double asd_fraction(const LatticeGaugeField &U);
/// Gradient of ‖F⁻‖² for left variations U → exp(X) U, one Lie algebra element per link.
std::vector<Lie> asd_gradient(const LatticeGaugeField &U);

struct CoolingOptions {
  int max_steps = 5000;
  double step_size = 0.05;
  double tol = 1e-3;
  int max_halvings = 30;
};

struct CoolingRecord {
  int step = 0;
  double asd_fraction = 0, charge = 0, asd_energy = 0, step_size = 0;
};

struct CoolingResult {
  LatticeGaugeField field;
  std::vector<CoolingRecord> history; ///< entry 0 is the starting point
  bool converged = false;
  int steps = 0;
};

class CoolingDivergence : public std::runtime_error {
public:
  CoolingDivergence(const std::string &what, std::vector<CoolingRecord> history)
      : std::runtime_error(what), history(std::move(history)) {}
  std::vector<CoolingRecord> history;
};

/// Gradient descent on ‖F⁻‖² with backtracking; a step is accepted only if neither
/// ‖F⁻‖² nor the ASD fraction increases. Throws CoolingDivergence when backtracking
/// is exhausted before convergence.
CoolingResult cool_to_sd(const LatticeGaugeField &U, const CoolingOptions &opts = {});

/// U_μ(x) → g(x) U_μ(x) g(x+μ)†.
LatticeGaugeField gauge_transform(const LatticeGaugeField &U, const std::vector<Lie> &g);
std::vector<Lie> random_gauge(const LatticeGaugeField &U, SplitMix64 &rng);
/// U → exp(amplitude · X) U with X a standard normal Lie algebra element per link.
LatticeGaugeField add_noise(const LatticeGaugeField &U, double amplitude, SplitMix64 &rng);

/// U_μ(x) → exp(h a_μ o_μ(x + a_μ/2)) U_μ(x): the lattice version of A → A + h·o
/// for a smooth 1-form o sampled at link midpoints.
LatticeGaugeField perturb_links(const LatticeGaugeField &U, const FourierField &o, double h);
/// U(1) links with every (j,k) plaquette equal to exp(2πi m_jk a_j a_k): the lattice
/// version of constant_curvature_u1 on a d-dimensional lattice, d = size of m.
LatticeGaugeField discretize_u1_flux(const std::vector<int> &dims, const FluxMatrix &m);
/// SU(2) instanton of scale rho (torus units) in singular gauge, centred in a lattice
/// cell; sign = -1 or +1 selects the sign of the clover charge.
LatticeGaugeField instanton_seed(const std::vector<int> &dims, double rho, int sign);

/// 7D field on dims × tdims: base links copied across fiber slices, fiber links identity.
LatticeGaugeField lift_to_7d(const LatticeGaugeField &base, const std::vector<int> &tdims);

/// Site-sum versions of the continuum 7D quantities, in lattice coordinates where φ = φ0.
Energy7D lattice_energy_7d(const LatticeGaugeField &U, const G2Structure<double> &s);
InstantonResidual lattice_instanton_residual(const LatticeGaugeField &U, const G2Structure<double> &s);

/// Binary snapshot plus JSON manifest at path + ".json". `meta` is copied into the manifest.
void write_snapshot(const std::string &path, const LatticeGaugeField &U, const nlohmann::json &meta = nlohmann::json::object());
LatticeGaugeField read_snapshot(const std::string &path);

} // namespace g2lab
