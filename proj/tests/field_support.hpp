#pragma once

// Random fields and flux matrices shared by the continuum tests.

#include "g2lab/gauge.hpp"
#include "g2lab/rng.hpp"

#include <cmath>
#include <vector>

namespace g2lab::testing {

inline Lie random_lie(SplitMix64 &rng, int rank) {
  if (rank == 1) return u1_element(rng.normal());
  Lie x = lie_zero(2);
  for (int a = 1; a <= 3; ++a) x += rng.normal() * su2_generator(a);
  return x;
}

inline Frequency random_mode(SplitMix64 &rng, int dim, int cutoff) {
  Frequency m{};
  for (int i = 0; i < dim; ++i) m[i] = rng.integer(-cutoff, cutoff);
  return m;
}

inline FourierField random_field(SplitMix64 &rng, int dim, int degree, int rank, int modes, int cutoff, double amp = 1.0) {
  FourierField f(dim, degree, rank);
  const auto &b = basis(dim, degree);
  for (int t = 0; t < modes; ++t) {
    Frequency m = random_mode(rng, dim, cutoff);
    Lie c = random_lie(rng, rank) * amp;
    if (rng.uniform() < 0.5) c += cplx(0, 1) * random_lie(rng, rank) * amp; // complex amplitude
    f.add_real(m, b[rng.integer(0, int(b.size()) - 1)], c);
  }
  return f;
}

// Like random_field, but every mode fills all components with complex
// amplitudes, so a ∧ da does not vanish mode by mode.
inline FourierField dense_field(SplitMix64 &rng, int dim, int degree, int rank, int modes, int cutoff, double amp = 1.0) {
  FourierField f(dim, degree, rank);
  for (int t = 0; t < modes; ++t) {
    Frequency m = random_mode(rng, dim, cutoff);
    for (auto &idx : basis(dim, degree)) {
      Lie c = random_lie(rng, rank) + cplx(0, 1) * random_lie(rng, rank);
      f.add_real(m, idx, c * amp);
    }
  }
  return f;
}

inline FluxMatrix flux4(int m12, int m13, int m14, int m23, int m24, int m34) {
  FluxMatrix m(4, std::vector<int>(4, 0));
  auto set = [&](int j, int k, int v) {
    m[j][k] = v;
    m[k][j] = -v;
  };
  set(0, 1, m12);
  set(0, 2, m13);
  set(0, 3, m14);
  set(1, 2, m23);
  set(1, 3, m24);
  set(2, 3, m34);
  return m;
}

// Pointwise evaluation, used as an independent quadrature oracle.
std::vector<Lie> evaluate(const FourierField &f, const std::vector<double> &x) {
  std::vector<Lie> v(f.components(), lie_zero(f.rank()));
  for (auto &[m, cs] : f.modes()) {
    double ph = 0;
    for (int i = 0; i < f.dim(); ++i) ph += m[i] * x[i];
    cplx e = std::exp(cplx(0, 2 * kPi * ph));
    for (size_t i = 0; i < cs.size(); ++i) v[i] += e * cs[i];
  }
  return v;
}

/// SD flux with m12 = m34 = a, m13 = m42 = b, m14 = m23 = c.
inline FluxMatrix sd_flux(int a, int b, int c) { return flux4(a, b, c, c, -b, a); }

} // namespace g2lab::testing
