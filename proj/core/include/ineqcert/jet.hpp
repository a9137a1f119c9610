#pragma once

#include <array>
#include <cmath>

namespace ineqcert {

inline constexpr int kMaxDim = 3;

// Second-order forward-mode jet in up to three variables. The Hessian is stored
// packed (upper triangle), so symmetry holds structurally.
struct Jet {
  double v = 0.0;
  std::array<double, kMaxDim> g{};
  std::array<double, 6> h{};

  static constexpr int packed(int p, int q) noexcept {
    if (p > q) {
      const int t = p;
      p = q;
      q = t;
    }
    return p * (5 - p) / 2 + q;
  }

  static Jet constant(double c) noexcept {
    Jet j;
    j.v = c;
    return j;
  }

  static Jet variable(double value, int index) noexcept {
    Jet j;
    j.v = value;
    j.g[index] = 1.0;
    return j;
  }

  double hess(int p, int q) const noexcept { return h[packed(p, q)]; }
};

// Applies a scalar function with derivatives (f0, f1, f2) at a.v.
inline Jet chain(const Jet& a, double f0, double f1, double f2) noexcept {
  Jet r;
  r.v = f0;
  for (int p = 0; p < kMaxDim; ++p) r.g[p] = f1 * a.g[p];
  for (int p = 0; p < kMaxDim; ++p)
    for (int q = p; q < kMaxDim; ++q) {
      const int k = Jet::packed(p, q);
      r.h[k] = f1 * a.h[k] + f2 * a.g[p] * a.g[q];
    }
  return r;
}

inline Jet operator+(const Jet& a, const Jet& b) noexcept {
  Jet r;
  r.v = a.v + b.v;
  for (int p = 0; p < kMaxDim; ++p) r.g[p] = a.g[p] + b.g[p];
  for (int k = 0; k < 6; ++k) r.h[k] = a.h[k] + b.h[k];
  return r;
}

inline Jet operator-(const Jet& a, const Jet& b) noexcept {
  Jet r;
  r.v = a.v - b.v;
  for (int p = 0; p < kMaxDim; ++p) r.g[p] = a.g[p] - b.g[p];
  for (int k = 0; k < 6; ++k) r.h[k] = a.h[k] - b.h[k];
  return r;
}

inline Jet operator-(const Jet& a) noexcept {
  Jet r;
  r.v = -a.v;
  for (int p = 0; p < kMaxDim; ++p) r.g[p] = -a.g[p];
  for (int k = 0; k < 6; ++k) r.h[k] = -a.h[k];
  return r;
}

inline Jet operator*(const Jet& a, const Jet& b) noexcept {
  Jet r;
  r.v = a.v * b.v;
  for (int p = 0; p < kMaxDim; ++p) r.g[p] = a.v * b.g[p] + b.v * a.g[p];
  for (int p = 0; p < kMaxDim; ++p)
    for (int q = p; q < kMaxDim; ++q) {
      const int k = Jet::packed(p, q);
      r.h[k] = a.v * b.h[k] + b.v * a.h[k] + a.g[p] * b.g[q] + a.g[q] * b.g[p];
    }
  return r;
}

inline Jet reciprocal(const Jet& a) noexcept {
  const double inv = 1.0 / a.v;
  return chain(a, inv, -inv * inv, 2.0 * inv * inv * inv);
}

inline Jet operator/(const Jet& a, const Jet& b) noexcept { return a * reciprocal(b); }

}  // namespace ineqcert
