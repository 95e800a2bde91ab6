#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "loopreg/errors.hpp"

namespace loopreg {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// Signed mode index for FFT bin k of an n-point transform: k for k < n/2,
/// k - n otherwise (so the Nyquist bin counts as mode -n/2).
inline int bin_mode(std::size_t k, std::size_t n) {
  return k < n / 2 ? static_cast<int>(k) : static_cast<int>(k) - static_cast<int>(n);
}

namespace detail {

// In-place radix-2 transform, sign = -1 forward / +1 backward, unscaled.
// Twiddles come from sincos of the exact angle at every butterfly; at the
// grid sizes used here that costs nothing and keeps roundoff flat.
inline void fft_radix2(std::vector<Complex>& a, int sign) {
  const std::size_t n = a.size();
  if (!is_power_of_two(n)) throw ConfigError("fft: length must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = static_cast<double>(sign) * kTwoPi / static_cast<double>(len);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const Complex w = std::polar(1.0, ang * static_cast<double>(k));
        const Complex u = a[i + k];
        const Complex v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

}  // namespace detail

/// samples -> bin-ordered Fourier coefficients, c_k = (1/n) sum_j z_j e^{-2pi i k j / n}.
inline std::vector<Complex> fft_forward(std::vector<Complex> samples) {
  detail::fft_radix2(samples, -1);
  const double scale = 1.0 / static_cast<double>(samples.size());
  for (auto& c : samples) c *= scale;
  return samples;
}

/// bin-ordered coefficients -> samples, z_j = sum_k c_k e^{+2pi i k j / n}.
inline std::vector<Complex> fft_backward(std::vector<Complex> coefficients) {
  detail::fft_radix2(coefficients, +1);
  return coefficients;
}

/// Value of the band-limited interpolant sum_{m=-n/2}^{n/2-1} c_m e^{2pi i m u}
/// at u in [0,1), from bin-ordered coefficients, via a single Horner pass in
/// omega = e^{2pi i u}.
inline Complex trig_eval(const std::vector<Complex>& bins, double u) {
  const std::size_t n = bins.size();
  const std::size_t half = n / 2;
  const Complex w = std::polar(1.0, kTwoPi * u);
  Complex acc{0.0, 0.0};
  // a_j = coefficient of omega^j after factoring out omega^{-n/2}
  for (std::size_t j = n; j-- > 0;) acc = acc * w + bins[(j + half) & (n - 1)];
  return acc * std::polar(1.0, -kTwoPi * 0.5 * static_cast<double>(n) * u);
}

/// Bin-ordered coefficients of the spectral derivative (multiply mode m by 2pi i m).
inline std::vector<Complex> derivative_bins(const std::vector<Complex>& bins) {
  const std::size_t n = bins.size();
  std::vector<Complex> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double f = kTwoPi * static_cast<double>(bin_mode(k, n));
    out[k] = Complex{-f * bins[k].imag(), f * bins[k].real()};
  }
  return out;
}

/// Zero-pad bin-ordered coefficients of an n-grid to an m-grid (m >= n, both
/// powers of two); mode indices are preserved.
inline std::vector<Complex> pad_bins(const std::vector<Complex>& bins, std::size_t m) {
  const std::size_t n = bins.size();
  if (!is_power_of_two(m) || m < n) throw ConfigError("pad_bins: target grid must be a power of two >= source");
  if (m == n) return bins;
  std::vector<Complex> out(m, Complex{0.0, 0.0});
  for (std::size_t k = 0; k < n; ++k) {
    const int mode = bin_mode(k, n);
    const std::size_t kk = static_cast<std::size_t>(mode >= 0 ? mode : static_cast<int>(m) + mode);
    out[kk] = bins[k];
  }
  return out;
}

/// W^{2+level,2} norm of the periodic function with the given bin-ordered
/// coefficients: ( sum_m (1+(2pi m)^2)^{2+level} |c_m|^2 )^{1/2}.
inline double sobolev_norm_bins(const std::vector<Complex>& bins, int level) {
  if (level < 0) throw ConfigError("sobolev norm: level must be >= 0");
  const std::size_t n = bins.size();
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double f = kTwoPi * static_cast<double>(bin_mode(k, n));
    sum += std::pow(1.0 + f * f, 2 + level) * std::norm(bins[k]);
  }
  return std::sqrt(sum);
}

}  // namespace loopreg
