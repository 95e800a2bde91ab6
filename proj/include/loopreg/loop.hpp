#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "loopreg/errors.hpp"
#include "loopreg/fft.hpp"

namespace loopreg {

inline constexpr int kMinGridSize = 8;
inline constexpr double kDefaultCollisionEps = 1e-8;

namespace detail {

// Lazily computed Fourier coefficients. call_once keeps concurrent first
// reads idempotent; copies of the owner share the cache (samples are
// immutable, so the cached value is the same).
struct CoeffCache {
  std::once_flag flag;
  std::vector<Complex> bins;
};

inline void check_grid(std::size_t n, const char* what) {
  if (!is_power_of_two(n) || n < kMinGridSize)
    throw ConfigError(std::string(what) + ": grid size must be a power of two >= 8, got " + std::to_string(n));
}

inline double reduce_mod1(double t) {
  double u = t - std::floor(t);
  if (u >= 1.0) u = 0.0;
  return u;
}

// Index of u on the n-grid if u is exactly a grid node, else -1. Grid nodes
// j/n are dyadic, so u*n is exact whenever u came from one.
inline long grid_index(double u, std::size_t n) {
  const double jn = u * static_cast<double>(n);
  const auto j = static_cast<long>(std::llround(jn));
  if (j >= 0 && j < static_cast<long>(n) && static_cast<double>(j) == jn) return j;
  return -1;
}

}  // namespace detail

/// A discretized loop S^1 -> C: n uniform samples z(j/n) with Fourier
/// coefficients for modes m = -n/2 .. n/2-1 cached on demand. Values are
/// immutable after construction.
class Loop {
 public:
  explicit Loop(std::vector<Complex> samples)
      : samples_(std::move(samples)), cache_(std::make_shared<detail::CoeffCache>()) {
    detail::check_grid(samples_.size(), "Loop");
    for (const auto& z : samples_)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw ConfigError("Loop: samples must be finite");
  }

  /// Build from bin-ordered coefficients; the cache is seeded with them.
  static Loop from_coefficients(std::vector<Complex> bins) {
    detail::check_grid(bins.size(), "Loop");
    Loop z(fft_backward(bins));
    std::call_once(z.cache_->flag, [] {});
    z.cache_->bins = std::move(bins);
    return z;
  }

  /// c * z scaled in both representations: samples and cached coefficients
  /// are each multiplied directly, never re-derived through a transform.
  /// Re-analysis would add round-trip noise of order 1e-17 and break the
  /// exact vanishing of the time differential along i*z.
  static Loop scaled(const Loop& z, Complex c) {
    std::vector<Complex> s(z.samples());
    for (auto& v : s) v *= c;
    std::vector<Complex> b(z.coefficients());
    for (auto& v : b) v *= c;
    Loop out(std::move(s));
    std::call_once(out.cache_->flag, [] {});
    out.cache_->bins = std::move(b);
    return out;
  }

  int grid_size() const noexcept { return static_cast<int>(samples_.size()); }
  const std::vector<Complex>& samples() const noexcept { return samples_; }

  /// Bin-ordered Fourier coefficients (mode of bin k is k for k < n/2, k-n above).
  const std::vector<Complex>& coefficients() const {
    std::call_once(cache_->flag, [this] { cache_->bins = fft_forward(samples_); });
    return cache_->bins;
  }

  /// Coefficient of mode m, m in [-n/2, n/2).
  Complex mode(int m) const {
    const int n = grid_size();
    if (m < -n / 2 || m >= n / 2) throw ConfigError("Loop::mode: mode index out of band");
    return coefficients()[static_cast<std::size_t>(m >= 0 ? m : m + n)];
  }

  /// Band-limited interpolant at t (reduced mod 1). Grid nodes return the
  /// stored sample exactly.
  Complex evaluate(double t) const {
    const double u = detail::reduce_mod1(t);
    const long j = detail::grid_index(u, samples_.size());
    if (j >= 0) return samples_[static_cast<std::size_t>(j)];
    return trig_eval(coefficients(), u);
  }

  /// Spectral derivative: mode m multiplied by 2 pi i m.
  Loop derivative() const { return from_coefficients(derivative_bins(coefficients())); }

  /// W^{2+level,2} norm.
  double sobolev_norm(int level) const { return sobolev_norm_bins(coefficients(), level); }

  /// Squared L^2 norm, sum_m |c_m|^2.
  double l2_norm_sq() const {
    double sum = 0.0;
    for (const auto& c : coefficients()) sum += std::norm(c);
    return sum;
  }

  /// Same loop on a finer power-of-two grid (spectral zero-padding).
  Loop resampled(int m) const {
    if (m == grid_size()) return *this;
    return from_coefficients(pad_bins(coefficients(), static_cast<std::size_t>(m)));
  }

 private:
  std::vector<Complex> samples_;
  std::shared_ptr<detail::CoeffCache> cache_;
};

/// Constant loop z == c on an n-grid.
inline Loop constant_loop(int n, Complex c) {
  return Loop(std::vector<Complex>(static_cast<std::size_t>(n), c));
}

/// Loop from a sparse mode map {m: c_m}; unlisted modes are zero.
inline Loop loop_from_modes(int n, const std::map<int, Complex>& modes) {
  detail::check_grid(static_cast<std::size_t>(n), "loop_from_modes");
  std::vector<Complex> bins(static_cast<std::size_t>(n), Complex{0.0, 0.0});
  for (const auto& [m, c] : modes) {
    if (m < -n / 2 || m >= n / 2) throw ConfigError("loop_from_modes: mode index out of band");
    bins[static_cast<std::size_t>(m >= 0 ? m : m + n)] = c;
  }
  return Loop::from_coefficients(std::move(bins));
}

/// Forward transform of a loop's samples (bin-ordered coefficients).
inline std::vector<Complex> analyze(const Loop& z) { return z.coefficients(); }

/// Loop whose coefficients are the given bin-ordered array.
inline Loop synthesize(std::vector<Complex> bins) { return Loop::from_coefficients(std::move(bins)); }

namespace detail {

template <typename Op>
Loop pointwise(const Loop& a, const Loop& b, Op op) {
  const int m = std::max(a.grid_size(), b.grid_size());
  const Loop au = a.resampled(m);
  const Loop bu = b.resampled(m);
  std::vector<Complex> out(static_cast<std::size_t>(m));
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = op(au.samples()[j], bu.samples()[j]);
  return Loop(std::move(out));
}

}  // namespace detail

inline Loop operator+(const Loop& a, const Loop& b) {
  return detail::pointwise(a, b, [](Complex x, Complex y) { return x + y; });
}

inline Loop operator-(const Loop& a, const Loop& b) {
  return detail::pointwise(a, b, [](Complex x, Complex y) { return x - y; });
}

inline Loop operator*(Complex c, const Loop& z) { return Loop::scaled(z, c); }

inline Loop operator*(double c, const Loop& z) { return Complex{c, 0.0} * z; }

inline Loop operator-(const Loop& z) { return Complex{-1.0, 0.0} * z; }

/// Pointwise product a(t)b(t), exact on the doubled grid.
inline Loop pointwise_product(const Loop& a, const Loop& b) {
  const int m = 2 * std::max(a.grid_size(), b.grid_size());
  const Loop au = a.resampled(m);
  const Loop bu = b.resampled(m);
  std::vector<Complex> out(static_cast<std::size_t>(m));
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = au.samples()[j] * bu.samples()[j];
  return Loop(std::move(out));
}

/// z^2 as a loop on the doubled grid; exact for band-limited z at the grid
/// points of the result.
inline Loop square(const Loop& z) { return pointwise_product(z, z); }

/// Minimum of |z(t)| over the 4n-point refined grid.
inline double min_modulus(const Loop& z) {
  const Loop fine = z.resampled(4 * z.grid_size());
  double m = std::abs(fine.samples()[0]);
  for (const auto& v : fine.samples()) m = std::min(m, std::abs(v));
  return m;
}

/// Total change of arg z / 2 pi over one period, from unwrapped argument
/// differences on the 4n refined grid. Steps within 0.1 rad of a half turn
/// signal an under-resolved loop.
inline int winding_number(const Loop& z, double eps_collision = kDefaultCollisionEps) {
  const Loop fine = z.resampled(4 * z.grid_size());
  const auto& s = fine.samples();
  for (const auto& v : s)
    if (std::abs(v) <= eps_collision)
      throw CollisionError("winding_number: loop leaves the punctured plane (collision guard)");
  double total = 0.0;
  const std::size_t n = s.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double step = std::arg(s[(j + 1) % n] / s[j]);
    if (std::abs(step) >= std::numbers::pi - 0.1)
      throw ResolutionError("winding_number: angular step near pi between adjacent samples; loop under-sampled");
    total += step;
  }
  const double turns = total / kTwoPi;
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 1e-6)
    throw ResolutionError("winding_number: argument sum is not an integer number of turns");
  return static_cast<int>(rounded);
}

}  // namespace loopreg
