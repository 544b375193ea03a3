#pragma once

// Truncated Taylor series (normalized coefficients f^(k)/k!) over a scalar
// type T, which may be double or Interval.  With T = Interval and an
// interval base point, coefficient k encloses f^(k)(xi)/k! for every xi in
// the base interval.

#include <array>
#include <cstddef>

#include "mbc/interval.hpp"

namespace mbc {

template <typename T, std::size_t N>
struct Jet {
  std::array<T, N> c{};

  static Jet variable(const T& x0) {
    Jet j;
    j.c[0] = x0;
    if constexpr (N > 1) j.c[1] = T(1.0);
    return j;
  }
  static Jet constant(const T& x0) {
    Jet j;
    j.c[0] = x0;
    return j;
  }

  const T& operator[](std::size_t k) const { return c[k]; }
  T& operator[](std::size_t k) { return c[k]; }
};

template <typename T, std::size_t N>
Jet<T, N> operator+(const Jet<T, N>& a, const Jet<T, N>& b) {
  Jet<T, N> r;
  for (std::size_t k = 0; k < N; ++k) r.c[k] = a.c[k] + b.c[k];
  return r;
}

template <typename T, std::size_t N>
Jet<T, N> operator-(const Jet<T, N>& a, const Jet<T, N>& b) {
  Jet<T, N> r;
  for (std::size_t k = 0; k < N; ++k) r.c[k] = a.c[k] - b.c[k];
  return r;
}

template <typename T, std::size_t N>
Jet<T, N> operator-(const Jet<T, N>& a) {
  Jet<T, N> r;
  for (std::size_t k = 0; k < N; ++k) r.c[k] = -a.c[k];
  return r;
}

template <typename T, std::size_t N>
Jet<T, N> operator*(const T& s, const Jet<T, N>& a) {
  Jet<T, N> r;
  for (std::size_t k = 0; k < N; ++k) r.c[k] = s * a.c[k];
  return r;
}

template <typename T, std::size_t N>
Jet<T, N> operator+(const T& s, const Jet<T, N>& a) {
  Jet<T, N> r = a;
  r.c[0] = s + a.c[0];
  return r;
}

template <typename T, std::size_t N>
Jet<T, N> operator*(const Jet<T, N>& a, const Jet<T, N>& b) {
  Jet<T, N> r;
  for (std::size_t k = 0; k < N; ++k) {
    T s = a.c[0] * b.c[k];
    for (std::size_t i = 1; i <= k; ++i) s = s + a.c[i] * b.c[k - i];
    r.c[k] = s;
  }
  return r;
}

template <typename T, std::size_t N>
Jet<T, N> operator/(const Jet<T, N>& a, const Jet<T, N>& b) {
  Jet<T, N> r;
  for (std::size_t k = 0; k < N; ++k) {
    T s = a.c[k];
    for (std::size_t i = 1; i <= k; ++i) s = s - b.c[i] * r.c[k - i];
    r.c[k] = s / b.c[0];
  }
  return r;
}

template <typename T, std::size_t N>
Jet<T, N> exp(const Jet<T, N>& a) {
  using std::exp;
  Jet<T, N> r;
  r.c[0] = exp(a.c[0]);
  for (std::size_t k = 1; k < N; ++k) {
    T s = T(1.0 * k) * a.c[k] * r.c[0];
    for (std::size_t i = 1; i < k; ++i) s = s + T(1.0 * i) * a.c[i] * r.c[k - i];
    r.c[k] = s / T(1.0 * k);
  }
  return r;
}

template <typename T, std::size_t N>
Jet<T, N> sqrt(const Jet<T, N>& a) {
  using std::sqrt;
  Jet<T, N> r;
  r.c[0] = sqrt(a.c[0]);
  T two_r0 = T(2.0) * r.c[0];
  for (std::size_t k = 1; k < N; ++k) {
    T s = a.c[k];
    for (std::size_t i = 1; i < k; ++i) s = s - r.c[i] * r.c[k - i];
    r.c[k] = s / two_r0;
  }
  return r;
}

}  // namespace mbc
