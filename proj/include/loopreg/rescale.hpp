#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "loopreg/diffeo.hpp"
#include "loopreg/errors.hpp"
#include "loopreg/fft.hpp"
#include "loopreg/loop.hpp"

namespace loopreg {

namespace detail {

inline void collision_guard(const Loop& z, double eps_collision, const char* where) {
  const double m = ::loopreg::min_modulus(z);
  if (!(m > eps_collision))
    throw CollisionError(std::string(where) + ": collision guard violated, min |z| = " +
                         std::to_string(m) + " <= eps_collision = " + std::to_string(eps_collision));
}

/// |z|^2 sampled on the zero-padded 2n grid (|z|^2 has twice the band limit
/// of z, so the doubled grid represents it without aliasing).
inline std::vector<double> speed_samples(const Loop& z) {
  const Loop zu = z.resampled(2 * z.grid_size());
  std::vector<double> w(zu.samples().size());
  for (std::size_t j = 0; j < w.size(); ++j) {
    const Complex v = zu.samples()[j];
    w[j] = v.real() * v.real() + v.imag() * v.imag();
  }
  return w;
}

/// Periodic antiderivative, normalized: given bins of a real function g and
/// a positive normalizer N, returns bins of the periodic part of
/// (1/N) * integral of (g - mean(g)), anchored so the value at 0 vanishes.
inline std::vector<Complex> antiderivative_bins(const std::vector<Complex>& g_bins, double normalizer) {
  const std::size_t m = g_bins.size();
  std::vector<Complex> q(m, Complex{0.0, 0.0});
  Complex zero_mode{0.0, 0.0};
  for (std::size_t k = 1; k < m; ++k) {
    const int mode = bin_mode(k, m);
    q[k] = g_bins[k] / Complex(0.0, kTwoPi * static_cast<double>(mode) * normalizer);
    zero_mode -= q[k];
  }
  q[0] = zero_mode;
  return q;
}

}  // namespace detail

/// The time rescaling t_z: lift t(tau) = (1/||z||^2_{L2}) * integral_0^tau |z|^2,
/// returned as a CircleDiffeo on the 2n grid. The lift gains exactly 1 per
/// period by construction and its slope equals |z|^2 / ||z||^2_{L2}.
inline CircleDiffeo time_rescale(const Loop& z, double eps_collision = kDefaultCollisionEps,
                                 double delta_mono = kDefaultMonoDelta) {
  detail::collision_guard(z, eps_collision, "time_rescale");
  std::vector<double> w = detail::speed_samples(z);
  const std::size_t m = w.size();
  const std::vector<Complex> w_bins = fft_forward(std::vector<Complex>(w.begin(), w.end()));
  const double normalizer = w_bins[0].real();  // grid mean = ||z||^2_{L2} exactly for band-limited |z|^2
  auto q = detail::antiderivative_bins(w_bins, normalizer);
  const auto p = fft_backward(std::move(q));
  std::vector<double> lift(m);
  for (std::size_t j = 0; j < m; ++j)
    lift[j] = static_cast<double>(j) / static_cast<double>(m) + p[j].real();
  // t_z(0) = 0 identically; pin the node so FFT roundoff of order 1e-17
  // cannot push lift[0] below zero and shift the whole representative by 1.
  lift[0] = 0.0;
  return CircleDiffeo(std::move(lift), delta_mono);
}

/// tau_z = t_z^{-1}.
inline CircleDiffeo inverse_time(const Loop& z, double eps_collision = kDefaultCollisionEps,
                                 double delta_mono = kDefaultMonoDelta) {
  return invert(time_rescale(z, eps_collision, delta_mono));
}

/// The rescale-square operation R(z) = z^2 o tau_z, computed as the
/// composition compose_loop(square(z), invert(time_rescale(z))). The result
/// lives on the 2n grid and has twice the winding number of z.
inline Loop regularize(const Loop& z, double eps_collision = kDefaultCollisionEps,
                       double delta_mono = kDefaultMonoDelta) {
  const CircleDiffeo tau = inverse_time(z, eps_collision, delta_mono);
  return compose_loop(square(z), tau);
}

/// Directional derivative of z -> t_z. With g = 2 Re(conj(z) z_hat),
/// N = ||z||^2_{L2} and G the periodic antiderivative machinery above:
/// (Dt)(tau) = (1/N) integral_0^tau g  -  t_z(tau) * (integral_0^1 g) / N.
/// Bin-level grouping keeps the identities Dt = 0 for z_hat = z and
/// z_hat = i z exact in floating point.
inline TangentDiffeo d_time_rescale(const Loop& z, const Loop& z_hat,
                                    double eps_collision = kDefaultCollisionEps) {
  detail::collision_guard(z, eps_collision, "d_time_rescale");
  const int nc = std::max(z.grid_size(), z_hat.grid_size());
  const Loop zu = z.resampled(2 * nc);
  const Loop hu = z_hat.resampled(2 * nc);
  const std::size_t m = zu.samples().size();

  std::vector<Complex> w(m), g(m);
  for (std::size_t j = 0; j < m; ++j) {
    const Complex zv = zu.samples()[j];
    const Complex hv = hu.samples()[j];
    w[j] = Complex(zv.real() * zv.real() + zv.imag() * zv.imag(), 0.0);
    g[j] = Complex(2.0 * (zv.real() * hv.real() + zv.imag() * hv.imag()), 0.0);
  }
  const auto w_bins = fft_forward(std::move(w));
  const auto g_bins = fft_forward(std::move(g));
  const double normalizer = w_bins[0].real();
  const double ratio = g_bins[0].real() / normalizer;  // (integral g) / N

  // numerator bins of Dt' * N: g - |z|^2 * ratio; integrate term-wise.
  std::vector<Complex> num(m);
  for (std::size_t k = 0; k < m; ++k) num[k] = g_bins[k] - w_bins[k] * ratio;
  const auto q = detail::antiderivative_bins(num, normalizer);
  const auto vals = fft_backward(std::vector<Complex>(q));
  std::vector<double> out(m);
  for (std::size_t j = 0; j < m; ++j) out[j] = vals[j].real();
  return TangentDiffeo(std::move(out));
}

/// Chain-rule assembly of DR. With w = z^2 and psi = tau_z:
/// DR(z_hat) = (2 z z_hat) o psi + (w' o psi) * DI|_{t_z}(Dt z_hat),
/// each factor computed by its own analytic operation.
inline Loop d_regularize(const Loop& z, const Loop& z_hat,
                         double eps_collision = kDefaultCollisionEps,
                         double delta_mono = kDefaultMonoDelta) {
  const int nc = std::max(z.grid_size(), z_hat.grid_size());
  const Loop zu = z.resampled(nc);
  const Loop hu = z_hat.resampled(nc);

  const CircleDiffeo t = time_rescale(zu, eps_collision, delta_mono);
  const CircleDiffeo tau = invert(t);
  const TangentDiffeo dt = d_time_rescale(zu, hu, eps_collision);
  const TangentDiffeo dtau = d_invert(t, dt, tau);

  const Loop first = compose_loop(2.0 * pointwise_product(zu, hu), tau);
  const Loop w_prime = square(zu).derivative();
  const Loop w_prime_tau = compose_loop(w_prime, tau);

  std::vector<Complex> out(first.samples().size());
  for (std::size_t j = 0; j < out.size(); ++j)
    out[j] = first.samples()[j] + w_prime_tau.samples()[j] * dtau.samples()[j];
  return Loop(std::move(out));
}

}  // namespace loopreg
