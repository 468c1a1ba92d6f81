#pragma once

// Forward-mode value + gradient for the K-coordinate Hamiltonians.

#include <array>
#include <cmath>

namespace euler2c::detail {

template <int K>
struct Dual {
  double v = 0.0;
  std::array<double, K> d{};

  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT: constants promote implicitly

  static Dual variable(double value, int index) {
    Dual x(value);
    x.d[index] = 1.0;
    return x;
  }
};

template <int K>
Dual<K> operator+(Dual<K> a, const Dual<K>& b) {
  a.v += b.v;
  for (int i = 0; i < K; ++i) a.d[i] += b.d[i];
  return a;
}

template <int K>
Dual<K> operator-(Dual<K> a, const Dual<K>& b) {
  a.v -= b.v;
  for (int i = 0; i < K; ++i) a.d[i] -= b.d[i];
  return a;
}

template <int K>
Dual<K> operator-(Dual<K> a) {
  a.v = -a.v;
  for (int i = 0; i < K; ++i) a.d[i] = -a.d[i];
  return a;
}

template <int K>
Dual<K> operator*(const Dual<K>& a, const Dual<K>& b) {
  Dual<K> c(a.v * b.v);
  for (int i = 0; i < K; ++i) c.d[i] = a.d[i] * b.v + a.v * b.d[i];
  return c;
}

template <int K>
Dual<K> operator/(const Dual<K>& a, const Dual<K>& b) {
  const double inv = 1.0 / b.v;
  Dual<K> c(a.v * inv);
  for (int i = 0; i < K; ++i) c.d[i] = (a.d[i] - c.v * b.d[i]) * inv;
  return c;
}

template <int K> Dual<K> operator+(Dual<K> a, double b) { a.v += b; return a; }
template <int K> Dual<K> operator+(double b, Dual<K> a) { a.v += b; return a; }
template <int K> Dual<K> operator-(Dual<K> a, double b) { a.v -= b; return a; }
template <int K> Dual<K> operator-(double b, const Dual<K>& a) { return Dual<K>(b) - a; }

template <int K>
Dual<K> operator*(Dual<K> a, double b) {
  a.v *= b;
  for (int i = 0; i < K; ++i) a.d[i] *= b;
  return a;
}
template <int K> Dual<K> operator*(double b, Dual<K> a) { return a * b; }
template <int K> Dual<K> operator/(Dual<K> a, double b) { return a * (1.0 / b); }
template <int K> Dual<K> operator/(double b, const Dual<K>& a) { return Dual<K>(b) / a; }

template <int K>
Dual<K> chain(const Dual<K>& a, double value, double slope) {
  Dual<K> c(value);
  for (int i = 0; i < K; ++i) c.d[i] = slope * a.d[i];
  return c;
}

template <int K>
Dual<K> sqrt(const Dual<K>& a) {
  const double s = std::sqrt(a.v);
  return chain(a, s, 0.5 / s);
}

template <int K>
Dual<K> sin(const Dual<K>& a) {
  return chain(a, std::sin(a.v), std::cos(a.v));
}

template <int K>
Dual<K> cos(const Dual<K>& a) {
  return chain(a, std::cos(a.v), -std::sin(a.v));
}

inline double value_of(double x) { return x; }
template <int K> double value_of(const Dual<K>& x) { return x.v; }

}  // namespace euler2c::detail
