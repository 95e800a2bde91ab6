#pragma once

// Shared test helpers: slow reference transforms, closed-form oracles, and
// comparison utilities kept deliberately independent of the library's fast
// paths, so agreement is evidence rather than tautology.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "loopreg/loopreg.hpp"

namespace testsupport {

using loopreg::Complex;
using loopreg::kTwoPi;

// O(n^2) discrete Fourier transform with the same 1/n forward normalization
// as the library transform.
inline std::vector<Complex> dft_reference(const std::vector<Complex>& x) {
  const std::size_t n = x.size();
  std::vector<Complex> out(n, Complex{0.0, 0.0});
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      const double ang = -kTwoPi * static_cast<double>(k) * static_cast<double>(j) / static_cast<double>(n);
      out[k] += x[j] * Complex{std::cos(ang), std::sin(ang)};
    }
    out[k] /= static_cast<double>(n);
  }
  return out;
}

inline double max_abs_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double worst = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) worst = std::max(worst, std::abs(a[j] - b[j]));
  return worst;
}

// Max node distance of two loops on the same grid.
inline double max_sample_diff(const loopreg::Loop& a, const loopreg::Loop& b) {
  double worst = 0.0;
  for (std::size_t j = 0; j < a.samples().size(); ++j)
    worst = std::max(worst, std::abs(a.samples()[j] - b.samples()[j]));
  return worst;
}

// Max pointwise distance of two loops at off-grid probes.
inline double loop_distance(const loopreg::Loop& a, const loopreg::Loop& b, int probes = 409) {
  double worst = 0.0;
  for (int i = 0; i < probes; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(probes);
    worst = std::max(worst, std::abs(a.evaluate(t) - b.evaluate(t)));
  }
  return worst;
}

// Max lift distance of two circle diffeomorphisms, measured modulo 1 because
// lifts of the same circle map may sit an integer apart.
inline double circle_distance(const loopreg::CircleDiffeo& a, const loopreg::CircleDiffeo& b,
                              int probes = 257) {
  double worst = 0.0;
  for (int i = 0; i < probes; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(probes);
    double d = a.lift_at(t) - b.lift_at(t);
    d -= std::round(d);
    worst = std::max(worst, std::abs(d));
  }
  return worst;
}

// The offset circle 1 + 0.5 e^{2 pi i t} and the closed form of its time
// rescaling: speed 1.25 + cos(2 pi t), mean 1.25, so
// t(tau) = tau + sin(2 pi tau) / (2.5 pi).
inline loopreg::Loop offset_circle(int n) {
  return loopreg::loop_from_modes(n, {{0, Complex{1.0, 0.0}}, {1, Complex{0.5, 0.0}}});
}

inline double offset_time(double tau) {
  return tau + std::sin(kTwoPi * tau) / (2.5 * std::numbers::pi);
}

// Lift samples of t + amp * sin(2 pi t) on an n-grid.
inline std::vector<double> sine_lift(int n, double amp) {
  std::vector<double> lift(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(n);
    lift[static_cast<std::size_t>(j)] = t + amp * std::sin(kTwoPi * t);
  }
  return lift;
}

// Brute-force time-rescaling oracle, independent of the library's spectral
// antiderivative: direct DFT of the squared modulus, term-by-term closed-form
// integration, and plain bisection for the inverse. M = 64 bins hold the
// squared modulus of every band-limited test loop used here exactly.
struct SlowTimeOracle {
  std::vector<Complex> bins;
  double mean;

  explicit SlowTimeOracle(const loopreg::Loop& z, int M = 64) {
    std::vector<Complex> speed(static_cast<std::size_t>(M));
    for (int j = 0; j < M; ++j) {
      const Complex v = z.evaluate(static_cast<double>(j) / static_cast<double>(M));
      speed[static_cast<std::size_t>(j)] = Complex{std::norm(v), 0.0};
    }
    bins = dft_reference(speed);
    mean = bins[0].real();
  }

  double t_at(double tau) const {
    double acc = tau;
    const int M = static_cast<int>(bins.size());
    for (int k = 1; k < M; ++k) {
      const int m = loopreg::bin_mode(static_cast<std::size_t>(k), bins.size());
      const Complex em{std::cos(kTwoPi * m * tau), std::sin(kTwoPi * m * tau)};
      acc += ((bins[static_cast<std::size_t>(k)] * (em - 1.0)) / Complex{0.0, kTwoPi * m}).real() / mean;
    }
    return acc;
  }

  double tau_at(double t) const {
    double lo = t - 0.6;
    double hi = t + 0.6;
    for (int i = 0; i < 80; ++i) {
      const double mid = 0.5 * (lo + hi);
      (t_at(mid) < t ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }
};

}  // namespace testsupport
