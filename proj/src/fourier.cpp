#include "g2lab/fourier.hpp"

#include <cmath>

namespace g2lab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_same(const FourierField &a, const FourierField &b, const char *what) {
  if (a.dim() != b.dim() || a.rank() != b.rank()) throw DimensionError(std::string(what) + ": field dimension or rank mismatch");
}

Frequency add_modes(const Frequency &a, const Frequency &b) {
  Frequency r;
  for (int i = 0; i < kMaxDim; ++i) r[i] = a[i] + b[i];
  return r;
}

} // namespace

FourierField::FourierField(int dim, int degree, int rank) : dim_(dim), degree_(degree), rank_(rank) {
  if (dim < 1 || dim > kMaxDim) throw DimensionError("field dimension must be in 1..7");
  if (degree < 0 || degree > dim) throw DimensionError("field degree out of range");
  if (rank != 1 && rank != 2) throw std::invalid_argument("only rank 1 (u(1)) and rank 2 (su(2)) fields are supported");
}

std::vector<Lie> &FourierField::at(const Frequency &m) {
  auto it = modes_.find(m);
  if (it == modes_.end()) it = modes_.emplace(m, std::vector<Lie>(components(), lie_zero(rank_))).first;
  return it->second;
}

const std::vector<Lie> *FourierField::find(const Frequency &m) const {
  auto it = modes_.find(m);
  return it == modes_.end() ? nullptr : &it->second;
}

void FourierField::add(const Frequency &m, MultiIndex idx, const Lie &c) {
  if (idx.degree() != degree_ || idx.max_index() > dim_) throw DimensionError("basis index incompatible with field");
  for (int i = dim_; i < kMaxDim; ++i)
    if (m[i] != 0) throw DimensionError("mode has components beyond the field dimension");
  at(m)[basis_position(dim_, idx)] += c;
}

void FourierField::add_real(const Frequency &m, MultiIndex idx, const Lie &c) {
  Frequency neg = negate(m);
  if (neg == m) {
    add(m, idx, 0.5 * (c - c.adjoint()));
    return;
  }
  add(m, idx, c);
  add(neg, idx, -c.adjoint());
}

FourierField FourierField::constant(const Form &f, const Lie &x) {
  FourierField r(f.dim(), f.degree(), int(x.rows()));
  Frequency zero{};
  for (auto &[idx, c] : f.terms()) r.add(zero, idx, c * x);
  return r;
}

FourierField &FourierField::operator+=(const FourierField &o) {
  check_same(*this, o, "field sum");
  if (degree_ != o.degree_) throw DimensionError("field sum: degree mismatch");
  for (auto &[m, cs] : o.modes_) {
    auto &mine = at(m);
    for (size_t i = 0; i < cs.size(); ++i) mine[i] += cs[i];
  }
  return *this;
}

FourierField &FourierField::operator-=(const FourierField &o) {
  FourierField neg = o;
  neg *= -1.0;
  return *this += neg;
}

FourierField &FourierField::operator*=(double s) {
  for (auto &[m, cs] : modes_)
    for (auto &c : cs) c *= s;
  return *this;
}

void FourierField::prune(double tol) {
  for (auto it = modes_.begin(); it != modes_.end();) {
    bool small = true;
    for (auto &c : it->second) small = small && c.cwiseAbs().maxCoeff() <= tol;
    it = small ? modes_.erase(it) : std::next(it);
  }
}

int FourierField::cutoff() const {
  int c = 0;
  for (auto &[m, cs] : modes_)
    for (int x : m) c = std::max(c, std::abs(x));
  return c;
}

double FourierField::reality_defect() const {
  double worst = 0;
  for (auto &[m, cs] : modes_) {
    const auto *other = find(negate(m));
    for (size_t i = 0; i < cs.size(); ++i) {
      Lie partner = other ? (*other)[i] : lie_zero(rank_);
      worst = std::max(worst, (partner + cs[i].adjoint()).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

Form FourierField::zero_mode_along(const Lie &x) const {
  Form f(dim_, degree_);
  const auto *z = find(Frequency{});
  if (!z) return f;
  double xx = (x.adjoint() * x).trace().real();
  const auto &b = basis(dim_, degree_);
  for (size_t i = 0; i < b.size(); ++i) f.add(b[i], (x.adjoint() * (*z)[i]).trace().real() / xx);
  return f;
}

double FourierField::max_abs() const {
  double m = 0;
  for (auto &[k, cs] : modes_)
    for (auto &c : cs) m = std::max(m, c.cwiseAbs().maxCoeff());
  return m;
}

FourierField d(const FourierField &a) {
  const int n = a.dim(), p = a.degree();
  if (p >= n) throw DimensionError("exterior derivative of a top-degree field");
  FourierField r(n, p + 1, a.rank());
  const auto &src = basis(n, p);
  for (auto &[m, cs] : a.modes()) {
    bool nonzero = false;
    for (int k = 0; k < n; ++k) nonzero = nonzero || m[k] != 0;
    if (!nonzero) continue;
    auto &out = r.at(m);
    for (size_t i = 0; i < src.size(); ++i) {
      if (cs[i].isZero(0)) continue;
      for (int k = 0; k < n; ++k) {
        if (m[k] == 0 || src[i].contains(k + 1)) continue;
        MultiIndex ek = MultiIndex::of({k + 1});
        MultiIndex target(ek.mask() | src[i].mask());
        out[basis_position(n, target)] += (cplx(0, kTwoPi * m[k]) * double(wedge_sign(ek, src[i]))) * cs[i];
      }
    }
  }
  r.prune();
  return r;
}

FourierField wedge(const FourierField &a, const FourierField &b) {
  check_same(a, b, "wedge");
  const int n = a.dim();
  const int deg = a.degree() + b.degree();
  if (deg > n) throw DimensionError("wedge: product degree exceeds the dimension");
  FourierField r(n, deg, a.rank());
  const auto &ba = basis(n, a.degree()), &bb = basis(n, b.degree());
  for (auto &[ma, ca] : a.modes())
    for (auto &[mb, cb] : b.modes()) {
      std::vector<Lie> *out = nullptr;
      for (size_t i = 0; i < ba.size(); ++i) {
        if (ca[i].isZero(0)) continue;
        for (size_t j = 0; j < bb.size(); ++j) {
          if ((ba[i].mask() & bb[j].mask()) || cb[j].isZero(0)) continue;
          if (!out) out = &r.at(add_modes(ma, mb));
          MultiIndex target(ba[i].mask() | bb[j].mask());
          (*out)[basis_position(n, target)] += double(wedge_sign(ba[i], bb[j])) * (ca[i] * cb[j]);
        }
      }
    }
  return r;
}

FourierField bracket(const FourierField &a, const FourierField &b) {
  double sign = (a.degree() * b.degree()) % 2 ? -1.0 : 1.0;
  return wedge(a, b) - wedge(b, a) * sign;
}

FourierField wedge(const FourierField &a, const Form &psi) {
  if (psi.dim() != a.dim()) throw DimensionError("wedge with constant form: dimension mismatch");
  FourierField c(a.dim(), psi.degree(), a.rank());
  Frequency zero{};
  for (auto &[idx, v] : psi.terms()) c.add(zero, idx, v * lie_identity(a.rank()));
  return wedge(a, c);
}

FourierField wedge(const Form &psi, const FourierField &a) {
  if (psi.dim() != a.dim()) throw DimensionError("wedge with constant form: dimension mismatch");
  FourierField c(a.dim(), psi.degree(), a.rank());
  Frequency zero{};
  for (auto &[idx, v] : psi.terms()) c.add(zero, idx, v * lie_identity(a.rank()));
  return wedge(c, a);
}

FourierField interior(const std::vector<double> &v, const FourierField &a) {
  if (int(v.size()) != a.dim()) throw DimensionError("interior: vector dimension mismatch");
  const int n = a.dim(), p = a.degree();
  if (p == 0) return FourierField(n, 0, a.rank());
  FourierField r(n, p - 1, a.rank());
  const auto &src = basis(n, p);
  for (auto &[m, cs] : a.modes()) {
    auto &out = r.at(m);
    for (size_t i = 0; i < src.size(); ++i) {
      int pos = 0;
      for (int k : src[i].indices()) {
        if (v[k - 1] != 0) {
          MultiIndex target(std::uint8_t(src[i].mask() & ~(1u << (k - 1))));
          out[basis_position(n, target)] += (pos % 2 ? -v[k - 1] : v[k - 1]) * cs[i];
        }
        ++pos;
      }
    }
  }
  return r;
}

FourierField apply_matrix(const Matrix<double> &mat, const FourierField &a, int out_degree) {
  const int n = a.dim();
  if (mat.cols() != a.components() || mat.rows() != binomial(n, out_degree)) throw DimensionError("apply_matrix: shape mismatch");
  FourierField r(n, out_degree, a.rank());
  for (auto &[m, cs] : a.modes()) {
    auto &out = r.at(m);
    for (int i = 0; i < mat.rows(); ++i)
      for (int j = 0; j < mat.cols(); ++j)
        if (mat(i, j) != 0) out[i] += mat(i, j) * cs[j];
  }
  return r;
}

FourierField pullback(const Matrix<double> &M, const FourierField &a) {
  if (M.rows() != a.dim()) throw DimensionError("pullback: matrix rows must equal the field dimension");
  const int target_dim = M.cols();
  FourierField r(target_dim, a.degree(), a.rank());
  const auto &src = basis(a.dim(), a.degree());
  const auto &dst = basis(target_dim, a.degree());
  // Form part: (M^*e^I)_J = det M[I, J].
  std::vector<std::vector<double>> minors(src.size(), std::vector<double>(dst.size()));
  for (size_t i = 0; i < src.size(); ++i) {
    auto ri = src[i].indices();
    for (auto &x : ri) --x;
    for (size_t j = 0; j < dst.size(); ++j) {
      auto cj = dst[j].indices();
      for (auto &x : cj) --x;
      minors[i][j] = M.submatrix(ri, cj).determinant();
    }
  }
  for (auto &[m, cs] : a.modes()) {
    Frequency mt{};
    for (int j = 0; j < target_dim; ++j) {
      double s = 0;
      for (int i = 0; i < a.dim(); ++i) s += M(i, j) * m[i];
      if (std::fabs(s - std::round(s)) > 1e-12) throw std::invalid_argument("pullback: matrix does not map integer modes to integer modes");
      mt[j] = int(std::lround(s));
    }
    auto &out = r.at(mt);
    for (size_t i = 0; i < src.size(); ++i) {
      if (cs[i].isZero(0)) continue;
      for (size_t j = 0; j < dst.size(); ++j)
        if (minors[i][j] != 0) out[j] += minors[i][j] * cs[i];
    }
  }
  return r;
}

std::vector<Lie> value_at(const FourierField &a, const std::vector<double> &x) {
  if (int(x.size()) != a.dim()) throw DimensionError("value_at: point has the wrong dimension");
  std::vector<Lie> v(a.components(), lie_zero(a.rank()));
  for (auto &[m, cs] : a.modes()) {
    double ph = 0;
    for (int i = 0; i < a.dim(); ++i) ph += m[i] * x[i];
    cplx e = std::exp(cplx(0, kTwoPi * ph));
    for (size_t i = 0; i < cs.size(); ++i) v[i] += e * cs[i];
  }
  return v;
}

double integral_tr(const FourierField &a, const FourierField &b, const Form &psi) {
  check_same(a, b, "integral_tr");
  const int n = a.dim();
  if (a.degree() + b.degree() + psi.degree() != n || psi.dim() != n) throw DimensionError("integral_tr: degrees must add up to the dimension");
  const auto &ba = basis(n, a.degree()), &bb = basis(n, b.degree());
  const std::uint8_t full = std::uint8_t((1u << n) - 1);
  cplx total = 0;
  for (auto &[m, ca] : a.modes()) {
    const auto *cb = b.find(negate(m));
    if (!cb) continue;
    for (size_t i = 0; i < ba.size(); ++i) {
      if (ca[i].isZero(0)) continue;
      for (size_t j = 0; j < bb.size(); ++j) {
        if (ba[i].mask() & bb[j].mask()) continue;
        MultiIndex ij(ba[i].mask() | bb[j].mask());
        MultiIndex rest(std::uint8_t(full & ~ij.mask()));
        double w = psi.coeff(rest);
        if (w == 0) continue;
        double sign = wedge_sign(ba[i], bb[j]) * wedge_sign(ij, rest);
        total += (sign * w) * (ca[i] * (*cb)[j]).trace();
      }
    }
  }
  return total.real();
}

double norm_sq(const FourierField &a, const Metric<double> *g) {
  double total = 0;
  if (!g) {
    for (auto &[m, cs] : a.modes())
      for (auto &c : cs) total += c.squaredNorm();
    return total;
  }
  if (g->dim() != a.dim()) throw DimensionError("norm_sq: metric dimension mismatch");
  const auto &b = basis(a.dim(), a.degree());
  for (auto &[m, cs] : a.modes())
    for (size_t i = 0; i < b.size(); ++i)
      for (size_t j = 0; j < b.size(); ++j) {
        double gij = g->basis_inner(b[i], b[j]);
        if (gij != 0) total += gij * (cs[i].adjoint() * cs[j]).trace().real();
      }
  return total * g->volume_factor();
}

} // namespace g2lab
