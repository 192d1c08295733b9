#pragma once

// Lie-algebra valued differential forms on the unit torus R^n / Z^n, stored
// as finite Fourier series: a(x) = Σ_m a_m e^{2πi m·x}, each a_m a list of
// matrix coefficients over the lexicographic basis of Λ^k. Reality means
// a_{-m} = -a_m† (values in u(1) or su(2)). Products are exact convolutions,
// so integrals of polynomial expressions are exact up to rounding.

#include "g2lab/exterior.hpp"
#include "g2lab/lie.hpp"

#include <array>
#include <map>
#include <vector>

namespace g2lab {

using Frequency = std::array<int, kMaxDim>;

inline Frequency negate(const Frequency &m) {
  Frequency r;
  for (int i = 0; i < kMaxDim; ++i) r[i] = -m[i];
  return r;
}

class FourierField {
public:
  FourierField() = default;
  FourierField(int dim, int degree, int rank);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  int rank() const { return rank_; }
  int components() const { return binomial(dim_, degree_); }
  const std::map<Frequency, std::vector<Lie>> &modes() const { return modes_; }

  /// Coefficient list at mode m, created as zeros if absent.
  std::vector<Lie> &at(const Frequency &m);
  const std::vector<Lie> *find(const Frequency &m) const;
  void add(const Frequency &m, MultiIndex idx, const Lie &c);

  /// Adds c e^{2πi m·x} + (-c†) e^{-2πi m·x} on the basis form idx, i.e. the
  /// real field 2 Re-part; for m = 0 only the anti-Hermitian part of c is kept.
  void add_real(const Frequency &m, MultiIndex idx, const Lie &c);

  /// The constant field Σ_I f_I e^I ⊗ X.
  static FourierField constant(const Form &f, const Lie &x);

  FourierField &operator+=(const FourierField &o);
  FourierField &operator-=(const FourierField &o);
  FourierField &operator*=(double s);
  friend FourierField operator+(FourierField a, const FourierField &b) { return a += b; }
  friend FourierField operator-(FourierField a, const FourierField &b) { return a -= b; }
  friend FourierField operator*(FourierField a, double s) { return a *= s; }
  friend FourierField operator*(double s, FourierField a) { return a *= s; }

  /// Drops modes whose coefficients are all below tol in absolute value.
  void prune(double tol = 0.0);
  /// max |m|_∞ over stored modes.
  int cutoff() const;
  /// max |a_{-m} + a_m†| over modes.
  double reality_defect() const;
  /// Constant (zero-mode) part as a real form, assuming the values are
  /// multiples of the given generator: coefficient_I = <a_0,I, X> / <X, X>.
  Form zero_mode_along(const Lie &x) const;
  double max_abs() const;
  bool is_zero(double tol = 0.0) const { return max_abs() <= tol; }

private:
  int dim_ = 0, degree_ = 0, rank_ = 1;
  std::map<Frequency, std::vector<Lie>> modes_;
};

/// Exterior derivative: (da)_m = 2πi (Σ_k m_k e^k) ∧ a_m.
FourierField d(const FourierField &a);
/// Matrix-valued wedge product (a ∧ b)(x) with matrix multiplication of values.
FourierField wedge(const FourierField &a, const FourierField &b);
/// Graded commutator [a ∧ b] = a∧b - (-1)^{pq} b∧a.
FourierField bracket(const FourierField &a, const FourierField &b);
/// a ∧ ψ and ψ ∧ a for a constant real form ψ.
FourierField wedge(const FourierField &a, const Form &psi);
FourierField wedge(const Form &psi, const FourierField &a);
/// Contraction with a constant vector.
FourierField interior(const std::vector<double> &v, const FourierField &a);
/// Applies a constant linear map on Λ^k (matrix in lexicographic bases) modewise.
FourierField apply_matrix(const Matrix<double> &m, const FourierField &a, int out_degree);
/// Pullback along the linear map y ↦ M y, M an integer n×m matrix (modes become Mᵀ m).
FourierField pullback(const Matrix<double> &M, const FourierField &a);

/// Pointwise value of the components at x ∈ R^n.
std::vector<Lie> value_at(const FourierField &a, const std::vector<double> &x);
/// ∫ tr(a ∧ b) ∧ ψ over the unit torus; only paired modes m, -m contribute.
double integral_tr(const FourierField &a, const FourierField &b, const Form &psi);
/// ∫ |a|² = Σ_m Σ_I ‖a_m,I‖²_F for the Euclidean metric, or with a constant
/// metric g (Gram matrix of Λ^k times sqrt det g) when given.
double norm_sq(const FourierField &a, const Metric<double> *g = nullptr);

} // namespace g2lab
