#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "loopreg/errors.hpp"
#include "loopreg/fft.hpp"
#include "loopreg/loop.hpp"

namespace loopreg {

inline constexpr double kDefaultMonoDelta = 1e-6;
inline constexpr double kInvertResidualTol = 1e-13;
inline constexpr int kInvertMaxIter = 50;

/// A periodic real-valued function on a uniform grid: tangent vectors to the
/// diffeomorphism group, and the periodic parts of lifts. Spectral evaluation
/// mirrors Loop; grid nodes return stored samples exactly.
class TangentDiffeo {
 public:
  explicit TangentDiffeo(std::vector<double> samples)
      : samples_(std::move(samples)), cache_(std::make_shared<detail::CoeffCache>()) {
    detail::check_grid(samples_.size(), "TangentDiffeo");
    for (double v : samples_)
      if (!std::isfinite(v)) throw ConfigError("TangentDiffeo: samples must be finite");
  }

  int grid_size() const noexcept { return static_cast<int>(samples_.size()); }
  const std::vector<double>& samples() const noexcept { return samples_; }

  const std::vector<Complex>& coefficients() const {
    std::call_once(cache_->flag, [this] {
      std::vector<Complex> in(samples_.begin(), samples_.end());
      cache_->bins = fft_forward(std::move(in));
    });
    return cache_->bins;
  }

  double evaluate(double t) const {
    const double u = detail::reduce_mod1(t);
    const long j = detail::grid_index(u, samples_.size());
    if (j >= 0) return samples_[static_cast<std::size_t>(j)];
    return trig_eval(coefficients(), u).real();
  }

  TangentDiffeo derivative() const {
    auto bins = derivative_bins(coefficients());
    auto vals = fft_backward(std::move(bins));
    std::vector<double> out(vals.size());
    for (std::size_t j = 0; j < vals.size(); ++j) out[j] = vals[j].real();
    return TangentDiffeo(std::move(out));
  }

  double sobolev_norm(int level) const { return sobolev_norm_bins(coefficients(), level); }

  TangentDiffeo resampled(int m) const {
    if (m == grid_size()) return *this;
    auto vals = fft_backward(pad_bins(coefficients(), static_cast<std::size_t>(m)));
    std::vector<double> out(vals.size());
    for (std::size_t j = 0; j < vals.size(); ++j) out[j] = vals[j].real();
    return TangentDiffeo(std::move(out));
  }

 private:
  std::vector<double> samples_;
  std::shared_ptr<detail::CoeffCache> cache_;
};

namespace detail {

template <typename Op>
TangentDiffeo pointwise(const TangentDiffeo& a, const TangentDiffeo& b, Op op) {
  const int m = std::max(a.grid_size(), b.grid_size());
  const TangentDiffeo au = a.resampled(m);
  const TangentDiffeo bu = b.resampled(m);
  std::vector<double> out(static_cast<std::size_t>(m));
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = op(au.samples()[j], bu.samples()[j]);
  return TangentDiffeo(std::move(out));
}

}  // namespace detail

inline TangentDiffeo operator+(const TangentDiffeo& a, const TangentDiffeo& b) {
  return detail::pointwise(a, b, [](double x, double y) { return x + y; });
}

inline TangentDiffeo operator-(const TangentDiffeo& a, const TangentDiffeo& b) {
  return detail::pointwise(a, b, [](double x, double y) { return x - y; });
}

inline TangentDiffeo operator*(double c, const TangentDiffeo& f) {
  std::vector<double> out(f.samples());
  for (auto& v : out) v *= c;
  return TangentDiffeo(std::move(out));
}

/// An orientation-preserving circle diffeomorphism, stored through its
/// degree-1 lift on a uniform grid: lift(t) = t + p(t) with p periodic.
/// Construction validates strict monotonicity of the lift on the 4n refined
/// grid against the delta_mono floor.
class CircleDiffeo {
 public:
  CircleDiffeo(std::vector<double> lift_samples, double delta_mono = kDefaultMonoDelta)
      : delta_mono_(delta_mono) {
    detail::check_grid(lift_samples.size(), "CircleDiffeo");
    const auto n = lift_samples.size();
    for (double v : lift_samples)
      if (!std::isfinite(v)) throw ConfigError("CircleDiffeo: lift samples must be finite");
    // adding an integer to the lift is the same circle map; put lift(0) in [0,1)
    const double shift = std::floor(lift_samples[0]);
    if (shift != 0.0)
      for (auto& v : lift_samples) v -= shift;
    std::vector<double> periodic(n);
    for (std::size_t j = 0; j < n; ++j)
      periodic[j] = lift_samples[j] - static_cast<double>(j) / static_cast<double>(n);
    lift_ = std::move(lift_samples);
    periodic_.emplace(std::move(periodic));
    slope_periodic_.emplace(periodic_->derivative());

    const TangentDiffeo fine = slope_periodic_->resampled(4 * static_cast<int>(n));
    min_slope_ = 1.0 + *std::min_element(fine.samples().begin(), fine.samples().end());
    if (!(min_slope_ > delta_mono_))
      throw NotADiffeoError("CircleDiffeo: lift slope " + std::to_string(min_slope_) +
                            " not above the monotonicity floor " + std::to_string(delta_mono_));
  }

  int grid_size() const noexcept { return static_cast<int>(lift_.size()); }
  const std::vector<double>& lift_samples() const noexcept { return lift_; }
  const TangentDiffeo& periodic_part() const { return *periodic_; }
  double min_slope() const noexcept { return min_slope_; }
  double delta_mono() const noexcept { return delta_mono_; }

  /// Degree-1 lift at any real t: lift(t) = t + p(t mod 1).
  double lift_at(double t) const { return t + periodic_->evaluate(t); }

  /// Lift derivative 1 + p'(t); bounded below by min_slope on the refined grid.
  double slope_at(double t) const { return 1.0 + slope_periodic_->evaluate(t); }

  /// Second derivative of the lift, p''(t).
  TangentDiffeo curvature() const { return slope_periodic_->derivative(); }

 private:
  std::vector<double> lift_;
  std::optional<TangentDiffeo> periodic_;
  std::optional<TangentDiffeo> slope_periodic_;
  double min_slope_ = 0.0;
  double delta_mono_ = kDefaultMonoDelta;
};

/// Validated constructor for the diffeomorphism group.
inline CircleDiffeo make_diffeo(std::vector<double> lift_samples, double delta_mono = kDefaultMonoDelta) {
  return CircleDiffeo(std::move(lift_samples), delta_mono);
}

inline CircleDiffeo identity_diffeo(int n) {
  std::vector<double> lift(static_cast<std::size_t>(n));
  for (std::size_t j = 0; j < lift.size(); ++j) lift[j] = static_cast<double>(j) / static_cast<double>(n);
  return CircleDiffeo(std::move(lift));
}

/// Rigid rotation t -> t + s.
inline CircleDiffeo shift_diffeo(int n, double s) {
  std::vector<double> lift(static_cast<std::size_t>(n));
  for (std::size_t j = 0; j < lift.size(); ++j)
    lift[j] = static_cast<double>(j) / static_cast<double>(n) + s;
  return CircleDiffeo(std::move(lift));
}

/// Reparametrization z o psi: samples of z evaluated at the lift values on
/// the finer of the two grids. Winding number is preserved.
inline Loop compose_loop(const Loop& z, const CircleDiffeo& psi) {
  const int m = std::max(z.grid_size(), psi.grid_size());
  std::vector<Complex> out(static_cast<std::size_t>(m));
  const bool on_grid = psi.grid_size() == m;
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(m);
    const double y = on_grid ? psi.lift_samples()[j] : psi.lift_at(t);
    out[j] = z.evaluate(y);
  }
  return Loop(std::move(out));
}

/// Group operation: lift of psi o phi evaluated through psi's periodic part.
inline CircleDiffeo compose_diffeo(const CircleDiffeo& psi, const CircleDiffeo& phi) {
  const int m = std::max(psi.grid_size(), phi.grid_size());
  std::vector<double> out(static_cast<std::size_t>(m));
  const bool on_grid = phi.grid_size() == m;
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(m);
    const double y = on_grid ? phi.lift_samples()[j] : phi.lift_at(t);
    out[j] = y + psi.periodic_part().evaluate(y);
  }
  return CircleDiffeo(std::move(out), std::max(psi.delta_mono(), phi.delta_mono()));
}

/// Inverse diffeomorphism: solves lift(x) = j/n per grid point by bracketed,
/// bisection-safeguarded Newton on the trigonometric interpolant of the lift.
/// Residual tolerance 1e-13, at most 50 iterations per point.
inline CircleDiffeo invert(const CircleDiffeo& psi) {
  const int n = psi.grid_size();
  const auto& p = psi.periodic_part().samples();
  const auto [pmin_it, pmax_it] = std::minmax_element(p.begin(), p.end());
  const double pmin = *pmin_it;
  const double pmax = *pmax_it;

  std::vector<double> out(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(n);
    // root of lift(x) - t lies in [t - pmax, t - pmin]
    double pad = 1e-3;
    double lo = t - pmax - pad;
    double hi = t - pmin + pad;
    int widen = 0;
    while (psi.lift_at(lo) > t || psi.lift_at(hi) < t) {
      pad *= 4.0;
      lo = t - pmax - pad;
      hi = t - pmin + pad;
      if (++widen > 8) throw ConvergenceError("invert: failed to bracket the root");
    }
    double x = std::clamp(t - psi.periodic_part().evaluate(t), lo, hi);
    bool done = false;
    for (int iter = 0; iter < kInvertMaxIter; ++iter) {
      const double f = psi.lift_at(x) - t;
      if (std::abs(f) <= kInvertResidualTol) {
        done = true;
        break;
      }
      if (f > 0.0)
        hi = x;
      else
        lo = x;
      double xn = x - f / psi.slope_at(x);
      if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
      x = xn;
    }
    if (!done)
      throw ConvergenceError("invert: Newton did not reach tolerance at node " + std::to_string(j) +
                             " (monotonicity floor too small?)");
    out[static_cast<std::size_t>(j)] = x;
  }
  return CircleDiffeo(std::move(out), psi.delta_mono());
}

/// max_j |lift_psi(lift_chi(j/n)) - j/n| on chi's grid, measured modulo 1:
/// lifts of the same circle map may sit one integer apart across the wrap.
inline double inversion_residual(const CircleDiffeo& psi, const CircleDiffeo& chi) {
  const int n = chi.grid_size();
  double worst = 0.0;
  for (int j = 0; j < n; ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(n);
    double d = psi.lift_at(chi.lift_samples()[static_cast<std::size_t>(j)]) - t;
    d -= std::round(d);
    worst = std::max(worst, std::abs(d));
  }
  return worst;
}

/// First differential of inversion with a precomputed inverse:
/// (DI psi_hat)(t) = -psi_hat(psi^{-1}(t)) / psi'(psi^{-1}(t)).
inline TangentDiffeo d_invert(const CircleDiffeo& psi, const TangentDiffeo& psi_hat,
                              const CircleDiffeo& psi_inverse) {
  const int n = psi_inverse.grid_size();
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double x = psi_inverse.lift_samples()[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(j)] = -psi_hat.evaluate(x) / psi.slope_at(x);
  }
  return TangentDiffeo(std::move(out));
}

inline TangentDiffeo d_invert(const CircleDiffeo& psi, const TangentDiffeo& psi_hat) {
  return d_invert(psi, psi_hat, invert(psi));
}

/// Second differential of inversion: with A = 1/(psi' o psi^{-1}), the sum
///   A^2 (psi_hat_2' o psi^{-1})(psi_hat_1 o psi^{-1})
/// - A^3 (psi'' o psi^{-1})(psi_hat_2 o psi^{-1})(psi_hat_1 o psi^{-1})
/// + A^2 (psi_hat_1' o psi^{-1})(psi_hat_2 o psi^{-1}),
/// symmetric in the two tangent arguments.
inline TangentDiffeo d2_invert(const CircleDiffeo& psi, const TangentDiffeo& hat1,
                               const TangentDiffeo& hat2, const CircleDiffeo& psi_inverse) {
  const int n = psi_inverse.grid_size();
  const TangentDiffeo dhat1 = hat1.derivative();
  const TangentDiffeo dhat2 = hat2.derivative();
  const TangentDiffeo curv = psi.curvature();
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double x = psi_inverse.lift_samples()[static_cast<std::size_t>(j)];
    const double a = 1.0 / psi.slope_at(x);
    const double h1 = hat1.evaluate(x);
    const double h2 = hat2.evaluate(x);
    out[static_cast<std::size_t>(j)] = a * a * dhat2.evaluate(x) * h1 -
                                       a * a * a * curv.evaluate(x) * h2 * h1 +
                                       a * a * dhat1.evaluate(x) * h2;
  }
  return TangentDiffeo(std::move(out));
}

inline TangentDiffeo d2_invert(const CircleDiffeo& psi, const TangentDiffeo& hat1,
                               const TangentDiffeo& hat2) {
  return d2_invert(psi, hat1, hat2, invert(psi));
}

}  // namespace loopreg
