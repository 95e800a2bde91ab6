#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "loopreg/loopreg.hpp"
#include "support.hpp"

using namespace loopreg;
using testsupport::circle_distance;
using testsupport::loop_distance;
using testsupport::max_sample_diff;
using testsupport::offset_circle;
using testsupport::offset_time;
using testsupport::SlowTimeOracle;

TEST_CASE("time rescaling matches the closed form for the offset circle") {
  const Loop z = offset_circle(64);
  const CircleDiffeo t = time_rescale(z);
  REQUIRE(t.grid_size() == 128);
  REQUIRE(t.lift_samples()[0] == 0.0);

  double worst = 0.0;
  for (int j = 0; j < 1000; ++j) {
    const double tau = static_cast<double>(j) / 1000.0;
    worst = std::max(worst, std::abs(t.lift_at(tau) - offset_time(tau)));
  }
  REQUIRE(worst <= 1e-10);

  // slope is the normalized squared modulus
  const double N = z.l2_norm_sq();
  for (double tau : {0.05, 0.31, 0.62, 0.94}) {
    const double want = std::norm(z.evaluate(tau)) / N;
    REQUIRE(std::abs(t.slope_at(tau) - want) <= 1e-10);
    REQUIRE(t.slope_at(tau) > 0.0);
  }
}

TEST_CASE("time rescaling is the identity for constant-speed loops") {
  REQUIRE(circle_distance(time_rescale(constant_loop(8, Complex{2.0, -1.0})), identity_diffeo(8)) <= 1e-14);
  const Loop e = loop_from_modes(32, {{1, Complex{1.0, 0.0}}});
  REQUIRE(circle_distance(time_rescale(e), identity_diffeo(32)) <= 1e-14);
}

TEST_CASE("time rescaling normalizes total progress to one period") {
  Rng rng(301);
  for (int i = 0; i < 10; ++i) {
    const Loop z = random_loop(rng, 64, i % 3 - 1);
    const CircleDiffeo t = time_rescale(z);
    REQUIRE(t.lift_at(1.0) - t.lift_at(0.0) == 1.0);
    REQUIRE(t.min_slope() > 0.0);
    // scaling the loop cancels in the normalization
    REQUIRE(circle_distance(time_rescale(3.0 * z), t) <= 1e-13);
  }
}

TEST_CASE("collision guard rejects loops that reach the origin") {
  const Loop touching = loop_from_modes(16, {{1, Complex{1.0, 0.0}}, {0, Complex{-1.0, 0.0}}});
  REQUIRE_THROWS_AS(time_rescale(touching), CollisionError);
  REQUIRE_THROWS_AS(regularize(touching), CollisionError);
  REQUIRE_THROWS_AS(d_time_rescale(touching, constant_loop(16, Complex{1.0, 0.0})), CollisionError);
  // a custom guard above the actual minimum modulus also rejects
  REQUIRE_THROWS_AS(time_rescale(offset_circle(64), 0.6), CollisionError);
  REQUIRE_NOTHROW(time_rescale(offset_circle(64), 0.4));
}

TEST_CASE("inverse time rescaling inverts the lift") {
  Rng rng(302);
  for (int i = 0; i < 20; ++i) {
    const Loop z = random_loop(rng, 64, i % 5 - 2);
    const CircleDiffeo t = time_rescale(z);
    REQUIRE(inversion_residual(t, inverse_time(z)) <= 1e-12);
  }
}

TEST_CASE("regularize closed forms") {
  // constants map to their squares
  const Complex c{1.3, -0.7};
  const Loop rc = regularize(constant_loop(8, c));
  for (const auto& v : rc.samples()) REQUIRE(std::abs(v - c * c) <= 1e-12);

  // the unit circle maps to the doubly wound circle on the doubled grid
  const Loop e = loop_from_modes(32, {{1, Complex{1.0, 0.0}}});
  const Loop re = regularize(e);
  REQUIRE(re.grid_size() == 64);
  for (int j = 0; j < 64; ++j) {
    const double t = static_cast<double>(j) / 64.0;
    const Complex want{std::cos(2.0 * kTwoPi * t), std::sin(2.0 * kTwoPi * t)};
    REQUIRE(std::abs(re.samples()[static_cast<std::size_t>(j)] - want) <= 1e-10);
  }

  // winding doubles across the random suite
  Rng rng(303);
  for (int w = -2; w <= 2; ++w) {
    const Loop z = random_loop(rng, 64, w);
    REQUIRE(winding_number(regularize(z)) == 2 * w);
  }
}

TEST_CASE("regularize matches brute-force composition") {
  // independent oracle: direct DFT of the speed, closed-form integral,
  // bisection inverse, squared loop evaluation
  Rng rng(304);
  const Loop z = random_loop(rng, 256, 1);
  const Loop r = regularize(z);
  const SlowTimeOracle oracle(z);
  double worst = 0.0;
  for (int j = 0; j < 10000; ++j) {
    const double t = static_cast<double>(j) / 10000.0;
    const Complex w = z.evaluate(oracle.tau_at(t));
    worst = std::max(worst, std::abs(r.evaluate(t) - w * w));
  }
  REQUIRE(worst <= 1e-9);

  // offset circle against the fully closed-form oracle
  const Loop off = offset_circle(256);
  const Loop roff = regularize(off);
  worst = 0.0;
  for (int j = 0; j < 10000; ++j) {
    const double t = static_cast<double>(j) / 10000.0;
    double lo = t - 0.2;
    double hi = t + 0.2;
    for (int i = 0; i < 80; ++i) {
      const double mid = 0.5 * (lo + hi);
      (offset_time(mid) < t ? lo : hi) = mid;
    }
    const double tau = 0.5 * (lo + hi);
    const Complex w = Complex{1.0, 0.0} + 0.5 * Complex{std::cos(kTwoPi * tau), std::sin(kTwoPi * tau)};
    worst = std::max(worst, std::abs(roff.evaluate(t) - w * w));
  }
  REQUIRE(worst <= 1e-9);
}

TEST_CASE("time differential vanishes along symmetry directions") {
  Rng rng(305);
  for (int i = 0; i < 5; ++i) {
    const Loop z = random_loop(rng, 64, i - 2);
    // scaling direction: t is scale invariant; rotation direction: |z| unchanged
    const TangentDiffeo along_z = d_time_rescale(z, z);
    const TangentDiffeo along_iz = d_time_rescale(z, Complex{0.0, 1.0} * z);
    for (double v : along_z.samples()) REQUIRE(v == 0.0);
    for (double v : along_iz.samples()) REQUIRE(v == 0.0);
  }
}

TEST_CASE("time differential: anchoring, linearity, finite differences") {
  Rng rng(306);
  const Loop z = random_loop(rng, 64);
  const Loop h1 = random_tangent_loop(rng, 64);
  const Loop h2 = random_tangent_loop(rng, 64);

  const TangentDiffeo d1 = d_time_rescale(z, h1);
  REQUIRE(std::abs(d1.samples()[0]) <= 1e-15);

  // linear in the tangent argument
  const TangentDiffeo lhs = d_time_rescale(z, 2.0 * h1 + h2);
  const TangentDiffeo rhs = 2.0 * d1 + d_time_rescale(z, h2);
  for (std::size_t j = 0; j < lhs.samples().size(); ++j)
    REQUIRE(std::abs(lhs.samples()[j] - rhs.samples()[j]) <= 1e-12);

  // second-order agreement with central differences
  const std::function<CircleDiffeo(const Loop&)> tmap = [](const Loop& q) { return time_rescale(q); };
  for (int i = 0; i < 10; ++i) {
    const Loop base = random_loop(rng, 64);
    const Loop dir = random_tangent_loop(rng, 64);
    const TangentDiffeo analytic = d_time_rescale(base, dir);
    double best = std::numeric_limits<double>::infinity();
    double h = 5e-2;
    for (int k = 0; k < 14; ++k, h *= 0.5) {
      try {
        const TangentDiffeo fd = fd_directional(tmap, base, dir, h);
        best = std::min(best, (fd - analytic).sobolev_norm(0) / analytic.sobolev_norm(0));
      } catch (const CollisionError&) {
        // large perturbations may leave the punctured plane; smaller steps decide
      }
    }
    REQUIRE(best <= 1e-6);
  }
}

TEST_CASE("regularize differential: closed forms, linearity, finite differences") {
  // constants: R(c + h d) = (c + h d)^2, so DR = 2 c d
  const Complex c{2.0, 0.0};
  const Complex d{0.3, 0.4};
  const Loop dc = d_regularize(constant_loop(8, c), constant_loop(8, d));
  for (const auto& v : dc.samples()) REQUIRE(std::abs(v - 2.0 * c * d) <= 1e-12);

  // rotation direction on the unit circle: DR = 2 i R
  const Loop e = loop_from_modes(32, {{1, Complex{1.0, 0.0}}});
  const Loop de = d_regularize(e, Complex{0.0, 1.0} * e);
  const Loop want = Complex{0.0, 2.0} * regularize(e);
  REQUIRE(max_sample_diff(de, want) <= 1e-10);

  Rng rng(307);
  const Loop z = random_loop(rng, 64);
  const Loop h1 = random_tangent_loop(rng, 64);
  const Loop h2 = random_tangent_loop(rng, 64);
  const Loop lhs = d_regularize(z, 2.0 * h1 + h2);
  const Loop rhs = 2.0 * d_regularize(z, h1) + d_regularize(z, h2);
  REQUIRE(max_sample_diff(lhs, rhs) <= 1e-10);

  const std::function<Loop(const Loop&)> rmap = [](const Loop& q) { return regularize(q); };
  for (int i = 0; i < 10; ++i) {
    const Loop base = random_loop(rng, 64);
    const Loop dir = random_tangent_loop(rng, 64);
    const Loop analytic = d_regularize(base, dir);
    double best = std::numeric_limits<double>::infinity();
    double h = 5e-2;
    for (int k = 0; k < 14; ++k, h *= 0.5) {
      try {
        const Loop fd = fd_directional(rmap, base, dir, h);
        best = std::min(best, (fd - analytic).sobolev_norm(0) / analytic.sobolev_norm(0));
      } catch (const CollisionError&) {
        // large perturbations may leave the punctured plane; smaller steps decide
      }
    }
    REQUIRE(best <= 1e-6);
  }
}

TEST_CASE("equivariances of regularize") {
  Rng rng(308);

  // sign flip: identical down to the bit
  for (int i = 0; i < 5; ++i) {
    const Loop z = random_loop(rng, 64, i - 2);
    REQUIRE(max_sample_diff(regularize(-z), regularize(z)) == 0.0);
  }

  // complex scaling: R(cz) = c^2 R(z)
  const Complex c{0.7, 0.4};
  for (int i = 0; i < 5; ++i) {
    const Loop z = random_loop(rng, 64, i - 2);
    REQUIRE(max_sample_diff(regularize(c * z), c * (c * regularize(z))) <= 1e-10);
  }

  // time shift: R(z o r_s) = R(z) o r_{t_z(s)}; resolved at n = 256 where the
  // regularized loop's spectral tail is below the comparison tolerance
  Rng rng_fine(7);
  for (int i = 0; i < 6; ++i) {
    const Loop z = random_loop(rng_fine, 256, i % 5 - 2);
    const double s = 0.3;
    const CircleDiffeo t = time_rescale(z);
    const Loop lhs = regularize(compose_loop(z, shift_diffeo(256, s)));
    const Loop rhs = compose_loop(regularize(z), shift_diffeo(512, t.lift_at(s)));
    REQUIRE(max_sample_diff(lhs, rhs) <= 1e-9);
  }

  // modulus identity on the output grid: |R(z)(t)| = |z(tau_z(t))|^2
  const Loop z = random_loop(rng, 64, 1);
  const Loop r = regularize(z);
  const CircleDiffeo tau = inverse_time(z);
  for (int j = 0; j < r.grid_size(); ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(r.grid_size());
    const double want = std::norm(z.evaluate(tau.lift_at(t)));
    REQUIRE(std::abs(std::abs(r.samples()[static_cast<std::size_t>(j)]) - want) <= 1e-10);
  }
  // and pointwise for the offset circle; the regularized loop is not
  // band-limited, so off-node evaluation needs the n = 256 representation
  // before its interpolation tail drops below the tolerance
  const Loop off = offset_circle(256);
  const Loop roff = regularize(off);
  const CircleDiffeo tau_off = inverse_time(off);
  for (double t : {0.013, 0.27, 0.555, 0.871}) {
    const double want = std::norm(off.evaluate(tau_off.lift_at(t)));
    REQUIRE(std::abs(std::abs(roff.evaluate(t)) - want) <= 1e-10);
  }
  REQUIRE(min_modulus(r) > 0.0);
}

TEST_CASE("level profiles of regularized loops stay finite and ordered") {
  Rng rng(309);
  const Loop z = random_loop(rng, 64);
  const LevelProfile p = level_norm_profile(regularize(z), 3);
  REQUIRE(p.norms.size() == 4);
  for (std::size_t k = 0; k + 1 < p.norms.size(); ++k) {
    REQUIRE(std::isfinite(p.norms[k]));
    REQUIRE(p.norms[k + 1] >= p.norms[k]);
  }
}
