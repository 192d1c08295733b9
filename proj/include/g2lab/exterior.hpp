#pragma once

// Constant-coefficient exterior algebra over R^n, n <= 7.

#include "g2lab/matrix.hpp"
#include "g2lab/scalar.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace g2lab {

constexpr int kMaxDim = 7;

class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Strictly increasing index tuple (1-based), stored as a bitmask.
class MultiIndex {
public:
  constexpr MultiIndex() = default;
  constexpr explicit MultiIndex(std::uint8_t mask) : mask_(mask) {}
  /// From a strictly increasing list of 1-based indices.
  static MultiIndex of(std::initializer_list<int> idx) { return of(std::vector<int>(idx)); }
  static MultiIndex of(const std::vector<int> &idx) {
    std::uint8_t m = 0;
    int prev = 0;
    for (int i : idx) {
      if (i <= prev || i > kMaxDim) throw std::invalid_argument("multi-index must be strictly increasing in 1..7");
      m |= std::uint8_t(1u << (i - 1));
      prev = i;
    }
    return MultiIndex(m);
  }

  constexpr std::uint8_t mask() const { return mask_; }
  constexpr int degree() const { return std::popcount(unsigned(mask_)); }
  constexpr bool contains(int i) const { return mask_ >> (i - 1) & 1u; }
  constexpr int max_index() const { return mask_ ? 8 - std::countl_zero(mask_) : 0; }

  std::vector<int> indices() const {
    std::vector<int> r;
    for (int i = 1; i <= kMaxDim; ++i)
      if (contains(i)) r.push_back(i);
    return r;
  }
  std::string str() const {
    std::string s;
    for (int i : indices()) s += char('0' + i);
    return s;
  }

  /// Lexicographic order on the index tuples.
  friend bool operator<(MultiIndex a, MultiIndex b) {
    std::uint8_t x = a.mask_, y = b.mask_;
    while (x && y) {
      int ix = std::countr_zero(x), iy = std::countr_zero(y);
      if (ix != iy) return ix < iy;
      x &= x - 1;
      y &= y - 1;
    }
    return !x && y;
  }
  friend bool operator==(MultiIndex a, MultiIndex b) { return a.mask_ == b.mask_; }

private:
  std::uint8_t mask_ = 0;
};

/// Sign of e^a ∧ e^b relative to e^{a∪b}; 0 if the indices overlap.
inline int wedge_sign(MultiIndex a, MultiIndex b) {
  if (a.mask() & b.mask()) return 0;
  int inv = 0;
  for (int j = 1; j <= kMaxDim; ++j)
    if (b.contains(j)) inv += std::popcount(unsigned(a.mask() >> j));
  return inv % 2 ? -1 : 1;
}

/// Basis k-indices of R^n in lexicographic order.
inline const std::vector<MultiIndex> &basis(int n, int k) {
  using Table = std::array<std::array<std::vector<MultiIndex>, kMaxDim + 1>, kMaxDim + 1>;
  static const Table cache = [] {
    Table t;
    for (int dim = 0; dim <= kMaxDim; ++dim) {
      for (unsigned m = 0; m < (1u << dim); ++m) t[dim][std::popcount(m)].push_back(MultiIndex(std::uint8_t(m)));
      for (auto &v : t[dim]) std::sort(v.begin(), v.end());
    }
    return t;
  }();
  static const std::vector<MultiIndex> empty;
  if (n < 0 || n > kMaxDim || k < 0 || k > n) return empty;
  return cache[n][k];
}

/// Position of `idx` in basis(n, idx.degree()).
inline int basis_position(int n, MultiIndex idx) {
  using Table = std::array<std::array<int, 128>, kMaxDim + 1>;
  static const Table table = [] {
    Table t;
    for (int dim = 0; dim <= kMaxDim; ++dim) {
      t[dim].fill(-1);
      for (int k = 0; k <= dim; ++k) {
        const auto &b = basis(dim, k);
        for (size_t p = 0; p < b.size(); ++p) t[dim][b[p].mask()] = int(p);
      }
    }
    return t;
  }();
  return table[n][idx.mask()];
}

inline int binomial(int n, int k) { return int(basis(n, k).size()); }

inline MultiIndex complement(int n, MultiIndex idx) {
  return MultiIndex(std::uint8_t(((1u << n) - 1) & ~unsigned(idx.mask())));
}

/// Constant k-form on R^n in canonical sparse form (no zero coefficients).
template <class S> class ConstForm {
public:
  using Terms = std::map<MultiIndex, S>;

  ConstForm() = default;
  ConstForm(int dim, int degree) : dim_(dim), degree_(degree) {
    if (dim < 0 || dim > kMaxDim) throw DimensionError("form dimension must be in 0..7");
    if (degree < 0) throw DimensionError("negative form degree");
  }

  /// Scalar multiple of the 0-form 1.
  static ConstForm constant(int dim, const S &c) {
    ConstForm f(dim, 0);
    f.add(MultiIndex{}, c);
    return f;
  }
  /// c * e^{i1...ik}; indices need not be sorted, repeated indices give 0.
  static ConstForm basis_form(int dim, std::vector<int> idx, const S &c = S(1)) {
    ConstForm f(dim, int(idx.size()));
    f.add_unsorted(std::move(idx), c);
    return f;
  }
  /// The covector with components v.
  static ConstForm covector(const std::vector<S> &v) {
    ConstForm f(int(v.size()), 1);
    for (size_t i = 0; i < v.size(); ++i) f.add(MultiIndex::of({int(i) + 1}), v[i]);
    return f;
  }

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  const Terms &terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  size_t size() const { return terms_.size(); }

  S coeff(MultiIndex idx) const {
    auto it = terms_.find(idx);
    return it == terms_.end() ? S(0) : it->second;
  }
  S coeff(std::initializer_list<int> idx) const { return coeff(MultiIndex::of(idx)); }

  void add(MultiIndex idx, const S &c) {
    if (idx.degree() != degree_ || idx.max_index() > dim_) throw DimensionError("basis index incompatible with form");
    if (c == 0) return;
    auto [it, inserted] = terms_.emplace(idx, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }
  void add_unsorted(std::vector<int> idx, const S &c) {
    int sign = 1;
    for (size_t i = 0; i < idx.size(); ++i)
      for (size_t j = 0; j + 1 < idx.size() - i; ++j)
        if (idx[j] > idx[j + 1]) {
          std::swap(idx[j], idx[j + 1]);
          sign = -sign;
        } else if (idx[j] == idx[j + 1]) {
          return;
        }
    for (size_t j = 0; j + 1 < idx.size(); ++j)
      if (idx[j] == idx[j + 1]) return;
    add(MultiIndex::of(idx), sign > 0 ? c : S(-c));
  }

  ConstForm &operator+=(const ConstForm &o) {
    check_same_shape(o);
    for (auto &[k, v] : o.terms_) add(k, v);
    return *this;
  }
  ConstForm &operator-=(const ConstForm &o) {
    check_same_shape(o);
    for (auto &[k, v] : o.terms_) add(k, S(-v));
    return *this;
  }
  ConstForm &operator*=(const S &s) {
    if (s == 0) {
      terms_.clear();
      return *this;
    }
    for (auto &[k, v] : terms_) v *= s;
    return *this;
  }
  friend ConstForm operator+(ConstForm a, const ConstForm &b) { return a += b; }
  friend ConstForm operator-(ConstForm a, const ConstForm &b) { return a -= b; }
  friend ConstForm operator-(ConstForm a) { return a *= S(-1); }
  friend ConstForm operator*(const S &s, ConstForm a) { return a *= s; }
  friend ConstForm operator*(ConstForm a, const S &s) { return a *= s; }
  friend bool operator==(const ConstForm &a, const ConstForm &b) {
    return a.dim_ == b.dim_ && a.degree_ == b.degree_ && a.terms_ == b.terms_;
  }

  /// Dense coefficient vector in the lexicographic basis.
  std::vector<S> dense() const {
    std::vector<S> v(basis(dim_, degree_).size(), S(0));
    for (auto &[k, c] : terms_) v[basis_position(dim_, k)] = c;
    return v;
  }
  static ConstForm from_dense(int dim, int degree, const std::vector<S> &v) {
    ConstForm f(dim, degree);
    const auto &b = basis(dim, degree);
    if (v.size() != b.size()) throw DimensionError("dense coefficient vector has wrong length");
    for (size_t i = 0; i < v.size(); ++i) f.add(b[i], v[i]);
    return f;
  }

  template <class T> ConstForm<T> cast() const {
    ConstForm<T> r(dim_, degree_);
    for (auto &[k, v] : terms_) r.add(k, T(v));
    return r;
  }

  /// Largest coefficient magnitude (as double).
  double max_abs() const {
    double m = 0;
    for (auto &[k, v] : terms_) m = std::max(m, std::fabs(to_double(v)));
    return m;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (auto &[k, v] : terms_) {
      if (!s.empty()) s += " + ";
      s += "(" + ScalarTraits<S>::to_string(v) + ")";
      if (k.degree()) s += "e" + k.str();
    }
    return s;
  }

private:
  void check_same_shape(const ConstForm &o) const {
    if (dim_ != o.dim_ || degree_ != o.degree_) throw DimensionError("form shape mismatch");
  }

  int dim_ = 0, degree_ = 0;
  Terms terms_;
};

using Form = ConstForm<double>;
using QForm = ConstForm<Rational>;

/// Orientation relative to e^1 ∧ ... ∧ e^n.
class Orientation {
public:
  constexpr Orientation() = default;
  constexpr explicit Orientation(int sign) : sign_(sign) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("orientation sign must be +1 or -1");
  }
  static constexpr Orientation positive() { return Orientation(1); }
  constexpr int sign() const { return sign_; }
  bool operator==(const Orientation &) const = default;

private:
  int sign_ = 1;
};

/// Symmetric positive-definite inner product on vectors of R^n.
template <class S> class Metric {
public:
  Metric() = default;
  explicit Metric(Matrix<S> g) : g_(std::move(g)) {
    const int n = g_.rows();
    if (n != g_.cols() || n > kMaxDim) throw DimensionError("metric must be square of size <= 7");
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j)
        if (g_(i, j) != g_(j, i)) throw std::domain_error("metric is not symmetric");
    check_positive_definite();
    inverse_ = g_.inverse();
    det_ = g_.determinant();
  }
  static Metric euclidean(int n) { return Metric(Matrix<S>::identity(n)); }

  int dim() const { return g_.rows(); }
  const Matrix<S> &matrix() const { return g_; }
  const Matrix<S> &inverse() const { return inverse_; }
  const S &determinant() const { return det_; }
  /// sqrt(det g); exact mode requires det g to be a perfect square.
  S volume_factor() const { return ScalarTraits<S>::root(det_, 2); }

  /// Induced inner product of basis forms e^I, e^J: det of the inverse metric minor.
  S basis_inner(MultiIndex a, MultiIndex b) const {
    if (a.degree() != b.degree()) return S(0);
    auto ia = a.indices(), ib = b.indices();
    for (auto &x : ia) --x;
    for (auto &x : ib) --x;
    return inverse_.submatrix(ia, ib).determinant();
  }

  bool is_identity() const { return g_ == Matrix<S>::identity(dim()); }

private:
  void check_positive_definite() const {
    const int n = g_.rows();
    if constexpr (ScalarTraits<S>::exact) {
      // Sylvester: all leading principal minors positive.
      for (int k = 1; k <= n; ++k) {
        std::vector<int> idx(k);
        for (int i = 0; i < k; ++i) idx[i] = i;
        if (g_.submatrix(idx, idx).determinant() <= 0) throw std::domain_error("metric is not positive definite");
      }
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g_.to_eigen());
      double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
      if (n > 0 && es.eigenvalues().minCoeff() <= 1e-12 * std::max(lmax, 1e-300))
        throw std::domain_error("metric is not positive definite");
    }
  }

  Matrix<S> g_, inverse_;
  S det_ = S(1);
};

// ---------------------------------------------------------------------------

template <class S> ConstForm<S> wedge(const ConstForm<S> &a, const ConstForm<S> &b) {
  if (a.dim() != b.dim()) throw DimensionError("wedge: dimension mismatch");
  ConstForm<S> r(a.dim(), a.degree() + b.degree());
  if (a.degree() + b.degree() > a.dim()) return r;
  for (auto &[ka, va] : a.terms())
    for (auto &[kb, vb] : b.terms()) {
      int s = wedge_sign(ka, kb);
      if (s == 0) continue;
      S c = va * vb;
      r.add(MultiIndex(ka.mask() | kb.mask()), s > 0 ? c : S(-c));
    }
  return r;
}

template <class S> ConstForm<S> wedge(std::initializer_list<ConstForm<S>> fs) {
  auto it = fs.begin();
  ConstForm<S> r = *it++;
  for (; it != fs.end(); ++it) r = wedge(r, *it);
  return r;
}

/// Hodge star: a ∧ ⋆b = <a,b> dVol with dVol = o·sqrt(det g)·e^{1..n}.
template <class S> ConstForm<S> hodge(const ConstForm<S> &b, const Metric<S> &g, Orientation o = Orientation::positive()) {
  const int n = b.dim();
  if (g.dim() != n) throw DimensionError("hodge: metric dimension mismatch");
  ConstForm<S> r(n, n - b.degree());
  if (b.is_zero()) return r;
  S vol = g.volume_factor();
  if (o.sign() < 0) vol = -vol;
  const bool diag = g.is_identity();
  for (MultiIndex I : basis(n, b.degree())) {
    S inner(0);
    if (diag) {
      inner = b.coeff(I);
    } else {
      for (auto &[J, c] : b.terms()) inner += g.basis_inner(I, J) * c;
    }
    if (inner == 0) continue;
    MultiIndex Ic = complement(n, I);
    S c = vol * inner;
    r.add(Ic, wedge_sign(I, Ic) > 0 ? c : S(-c));
  }
  return r;
}

/// Interior product v ⌟ a.
template <class S> ConstForm<S> interior(const std::vector<S> &v, const ConstForm<S> &a) {
  if (int(v.size()) != a.dim()) throw DimensionError("interior: vector dimension mismatch");
  ConstForm<S> r(a.dim(), std::max(a.degree() - 1, 0));
  if (a.degree() == 0) return r;
  for (auto &[k, c] : a.terms()) {
    int pos = 0;
    for (int i : k.indices()) {
      if (v[i - 1] != 0) {
        S t = v[i - 1] * c;
        r.add(MultiIndex(std::uint8_t(k.mask() & ~(1u << (i - 1)))), pos % 2 ? S(-t) : t);
      }
      ++pos;
    }
  }
  return r;
}

/// Unit vector e_i (1-based) of R^n.
template <class S> std::vector<S> unit_vector(int n, int i) {
  std::vector<S> v(n, S(0));
  v[i - 1] = S(1);
  return v;
}

template <class S> S form_inner(const ConstForm<S> &a, const ConstForm<S> &b, const Metric<S> &g) {
  if (a.dim() != b.dim() || a.dim() != g.dim()) throw DimensionError("form_inner: dimension mismatch");
  if (a.degree() != b.degree()) throw DimensionError("form_inner: degree mismatch");
  S r(0);
  if (g.is_identity()) {
    for (auto &[k, c] : a.terms()) r += c * b.coeff(k);
    return r;
  }
  for (auto &[ka, ca] : a.terms())
    for (auto &[kb, cb] : b.terms()) r += ca * cb * g.basis_inner(ka, kb);
  return r;
}

/// Euclidean inner product of coefficient vectors.
template <class S> S euclidean_inner(const ConstForm<S> &a, const ConstForm<S> &b) {
  S r(0);
  for (auto &[k, c] : a.terms()) r += c * b.coeff(k);
  return r;
}

template <class S> double euclidean_norm(const ConstForm<S> &a) { return std::sqrt(to_double(euclidean_inner(a, a))); }

/// Pullback M^* a for the linear map M: R^m -> R^n (an n×m matrix) and a on R^n.
/// (M^* a)_J = sum_I a_I det(M[I, J]).
template <class S> ConstForm<S> pullback_linear(const Matrix<S> &M, const ConstForm<S> &a) {
  if (a.dim() != M.rows()) throw DimensionError("pullback: form dimension must equal matrix rows");
  const int m = M.cols();
  if (m > kMaxDim) throw DimensionError("pullback: target dimension exceeds 7");
  ConstForm<S> r(m, a.degree());
  if (a.degree() > m) return r;
  for (auto &[I, c] : a.terms()) {
    auto ri = I.indices();
    for (auto &x : ri) --x;
    for (MultiIndex J : basis(m, a.degree())) {
      auto cj = J.indices();
      for (auto &x : cj) --x;
      S d = M.submatrix(ri, cj).determinant();
      if (d != 0) r.add(J, c * d);
    }
  }
  return r;
}

/// Coefficient of the top form e^{1..n}.
template <class S> S top_coefficient(const ConstForm<S> &a) {
  if (a.degree() != a.dim()) throw DimensionError("not a top-degree form");
  return a.coeff(MultiIndex(std::uint8_t((1u << a.dim()) - 1)));
}

/// Matrix of a linear map Λ^p -> Λ^q in the lexicographic bases (columns = images).
template <class S, class F> Matrix<S> operator_matrix(int n, int p, int q, F &&op) {
  const auto &src = basis(n, p);
  const auto &dst = basis(n, q);
  Matrix<S> m(int(dst.size()), int(src.size()));
  for (size_t j = 0; j < src.size(); ++j) {
    ConstForm<S> e(n, p);
    e.add(src[j], S(1));
    ConstForm<S> img = op(e);
    for (auto &[k, c] : img.terms()) m(basis_position(n, k), int(j)) = c;
  }
  return m;
}

template <class S> ConstForm<S> apply_matrix(const Matrix<S> &m, const ConstForm<S> &a, int out_degree) {
  std::vector<S> v = a.dense(), out(m.rows(), S(0));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (v[j] != 0) out[i] += m(i, j) * v[j];
  return ConstForm<S>::from_dense(a.dim(), out_degree, out);
}

} // namespace g2lab
