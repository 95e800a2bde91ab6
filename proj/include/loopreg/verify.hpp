#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "loopreg/diffeo.hpp"
#include "loopreg/errors.hpp"
#include "loopreg/loop.hpp"
#include "loopreg/rescale.hpp"

namespace loopreg {

/// Runtime configuration shared by the harness and the CLI. Tolerances not
/// present in the override map fall back to the built-in defaults.
struct Config {
  int n = 64;
  double eps_collision = kDefaultCollisionEps;
  double delta_mono = kDefaultMonoDelta;
  std::uint64_t seed = 42;
  int k_max = 3;
  bool inject_corruption = false;
  std::map<std::string, double> tolerances;

  double tol(const std::string& name, double fallback) const {
    const auto it = tolerances.find(name);
    return it == tolerances.end() ? fallback : it->second;
  }

  void validate() const {
    if (!is_power_of_two(static_cast<std::size_t>(n)) || n < kMinGridSize)
      throw ConfigError("Config: n must be a power of two >= 8");
    if (!(eps_collision > 0.0) || !(delta_mono > 0.0))
      throw ConfigError("Config: eps_collision and delta_mono must be positive");
    if (k_max < 0) throw ConfigError("Config: k_max must be >= 0");
    for (const auto& [name, value] : tolerances)
      if (!(value > 0.0)) throw ConfigError("Config: tolerance '" + name + "' must be positive");
  }
};

/// Result of one differential or remainder check: the step sweep, measured
/// errors, the log-log slope fitted over the pre-roundoff window, and the
/// verdict against the configured thresholds.
struct ScReport {
  std::string map_name;
  std::string base_descriptor;
  std::string kind;  // "fd-order" or "sc1-remainder"
  int level = 0;
  std::vector<double> steps;
  std::vector<double> errors;
  double fitted_slope = std::numeric_limits<double>::quiet_NaN();
  double slope_lo = 0.0;
  double slope_hi = std::numeric_limits<double>::infinity();
  double min_error = 0.0;
  double exclusion_floor = 0.0;
  int n_excluded = 0;
  bool negative_control = false;
  bool pass = false;
  std::string note;
};

/// Sobolev norms of one loop at levels 0..k_max.
struct LevelProfile {
  std::vector<double> norms;
};

inline LevelProfile level_norm_profile(const Loop& z, int k_max) {
  if (k_max < 0) throw ConfigError("level_norm_profile: k_max must be >= 0");
  LevelProfile out;
  out.norms.reserve(static_cast<std::size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k) out.norms.push_back(z.sobolev_norm(k));
  return out;
}

/// Deterministic random source: a fixed 64-bit engine with hand-rolled
/// uniform and normal transforms, so identical seeds give identical suites
/// on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  double uniform() { return static_cast<double>(state_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(kTwoPi * u2);
    have_spare_ = true;
    return r * std::cos(kTwoPi * u2);
  }

  Complex complex_normal() {
    const double re = normal();
    const double im = normal();
    return Complex{re, im};
  }

 private:
  std::mt19937_64 state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// Random band-limited loop: modes |m| <= 5 around a unit constant term,
/// rejection-resampled until min |z| > 0.1 so the collision and monotonicity
/// guards stay comfortably satisfied under small perturbations. A nonzero
/// winding multiplies in a pure mode (a spectral shift, exact).
inline Loop random_loop(Rng& rng, int n, int winding = 0) {
  for (int attempt = 0; attempt < 200; ++attempt) {
    std::map<int, Complex> modes;
    modes[winding] = Complex{1.0, 0.0} + 0.3 * rng.complex_normal();
    for (int m = 1; m <= 5; ++m) {
      const double amp = 0.25 / (1.0 + static_cast<double>(m * m));
      modes[winding + m] = amp * rng.complex_normal();
      modes[winding - m] = amp * rng.complex_normal();
    }
    Loop z = loop_from_modes(n, modes);
    if (min_modulus(z) > 0.1) return z;
  }
  throw ConvergenceError("random_loop: rejection sampling failed to avoid the origin");
}

/// Random tangent loop: band-limited, no avoidance constraint.
inline Loop random_tangent_loop(Rng& rng, int n) {
  std::map<int, Complex> modes;
  for (int m = -5; m <= 5; ++m) {
    const double amp = 0.5 / (1.0 + static_cast<double>(m * m));
    modes[m] = amp * rng.complex_normal();
  }
  return loop_from_modes(n, modes);
}

namespace detail {

inline std::vector<double> trig_poly_samples(int n, const std::vector<double>& cos_amp,
                                             const std::vector<double>& sin_amp, double constant) {
  std::vector<double> out(static_cast<std::size_t>(n), constant);
  for (std::size_t m = 1; m < cos_amp.size(); ++m)
    for (int j = 0; j < n; ++j) {
      const double ang = kTwoPi * static_cast<double>(m) * static_cast<double>(j) / static_cast<double>(n);
      out[static_cast<std::size_t>(j)] += cos_amp[m] * std::cos(ang) + sin_amp[m] * std::sin(ang);
    }
  return out;
}

}  // namespace detail

/// Random circle diffeomorphism: periodic part with modes 1..5, rescaled so
/// the lift slope deviates from 1 by a budget drawn in [0.1, 0.45]; the
/// minimum slope stays above 0.5.
inline CircleDiffeo random_diffeo(Rng& rng, int n, double delta_mono = kDefaultMonoDelta) {
  std::vector<double> ca(6, 0.0), sa(6, 0.0);
  for (std::size_t m = 1; m <= 5; ++m) {
    const double amp = 1.0 / static_cast<double>(m * m);
    ca[m] = amp * rng.normal();
    sa[m] = amp * rng.normal();
  }
  const double budget = rng.uniform(0.1, 0.45);
  const TangentDiffeo raw(detail::trig_poly_samples(n, ca, sa, 0.0));
  const TangentDiffeo d = raw.derivative().resampled(4 * n);
  double peak = 0.0;
  for (double v : d.samples()) peak = std::max(peak, std::abs(v));
  const double scale = budget / peak;
  std::vector<double> lift(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    lift[static_cast<std::size_t>(j)] =
        static_cast<double>(j) / static_cast<double>(n) + scale * raw.samples()[static_cast<std::size_t>(j)];
  return CircleDiffeo(std::move(lift), delta_mono);
}

/// Random diffeo tangent: modes 0..5, gentle amplitudes.
inline TangentDiffeo random_tangent(Rng& rng, int n) {
  std::vector<double> ca(6, 0.0), sa(6, 0.0);
  const double constant = 0.25 * rng.normal();
  for (std::size_t m = 1; m <= 5; ++m) {
    const double amp = 0.25 / (1.0 + static_cast<double>(m * m));
    ca[m] = amp * rng.normal();
    sa[m] = amp * rng.normal();
  }
  return TangentDiffeo(detail::trig_poly_samples(n, ca, sa, constant));
}

/// Difference of two lifts as a periodic tangent. Lifts of the same circle
/// map may differ by an integer (the representative normalization), so the
/// nearest integer at node 0 is removed; valid whenever the true difference
/// is below 1/2 there, which holds for every finite-difference use.
inline TangentDiffeo lift_difference(const CircleDiffeo& a, const CircleDiffeo& b) {
  const TangentDiffeo d = a.periodic_part() - b.periodic_part();
  const double k = std::round(d.samples()[0]);
  if (k == 0.0) return d;
  std::vector<double> out(d.samples());
  for (auto& v : out) v -= k;
  return TangentDiffeo(std::move(out));
}

/// The lift of base nudged by s * dir, revalidated.
inline CircleDiffeo nudged_diffeo(const CircleDiffeo& base, const TangentDiffeo& dir, double s) {
  const int m = std::max(base.grid_size(), dir.grid_size());
  const TangentDiffeo p = base.periodic_part().resampled(m);
  const TangentDiffeo d = dir.resampled(m);
  std::vector<double> lift(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j)
    lift[static_cast<std::size_t>(j)] = static_cast<double>(j) / static_cast<double>(m) +
                                        p.samples()[static_cast<std::size_t>(j)] +
                                        s * d.samples()[static_cast<std::size_t>(j)];
  return CircleDiffeo(std::move(lift), base.delta_mono());
}

/// Central difference (map(base + h dir) - map(base - h dir)) / (2h), one
/// overload per (domain, codomain) pairing in use.
inline Loop fd_directional(const std::function<Loop(const Loop&)>& map, const Loop& base,
                           const Loop& dir, double h) {
  return (1.0 / (2.0 * h)) * (map(base + h * dir) - map(base - h * dir));
}

inline TangentDiffeo fd_directional(const std::function<CircleDiffeo(const Loop&)>& map,
                                    const Loop& base, const Loop& dir, double h) {
  return (1.0 / (2.0 * h)) * lift_difference(map(base + h * dir), map(base - h * dir));
}

inline TangentDiffeo fd_directional(const std::function<CircleDiffeo(const CircleDiffeo&)>& map,
                                    const CircleDiffeo& base, const TangentDiffeo& dir, double h) {
  return (1.0 / (2.0 * h)) *
         lift_difference(map(nudged_diffeo(base, dir, h)), map(nudged_diffeo(base, dir, -h)));
}

namespace detail {

inline double tangent_level_norm(const Loop& x, int level) { return x.sobolev_norm(level); }
inline double tangent_level_norm(const TangentDiffeo& x, int level) { return x.sobolev_norm(level); }

inline std::vector<double> geometric_steps(double start, int count) {
  std::vector<double> steps(static_cast<std::size_t>(count));
  double h = start;
  for (auto& s : steps) {
    s = h;
    h *= 0.5;
  }
  return steps;
}

/// Least-squares slope of log(error) vs log(step) over the pre-roundoff
/// window: entries above the floor, and no deeper than the error minimum
/// (steps are decreasing, so once the error turns back up the sweep has hit
/// the roundoff plateau and stops carrying order information). NaN when
/// fewer than two points survive.
inline double loglog_slope(const std::vector<double>& steps, const std::vector<double>& errors,
                           double floor, int& n_excluded) {
  const std::size_t arg_min = static_cast<std::size_t>(
      std::min_element(errors.begin(), errors.end()) - errors.begin());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int m = 0;
  for (std::size_t i = 0; i <= arg_min; ++i) {
    if (!(errors[i] > floor)) continue;
    const double x = std::log(steps[i]);
    const double y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  n_excluded = static_cast<int>(steps.size()) - m;
  if (m < 2) return std::numeric_limits<double>::quiet_NaN();
  const double denom = static_cast<double>(m) * sxx - sx * sx;
  return (static_cast<double>(m) * sxy - sx * sy) / denom;
}

/// Shared sweep driver: evaluates error_at over the step list, halving the
/// whole sweep (up to 12 times) when a validity guard trips at a perturbed
/// point, so the surviving steps keep their geometric spacing.
inline void run_sweep(std::vector<double>& steps, std::vector<double>& errors,
                      const std::function<double(double)>& error_at, std::string& note) {
  int shrink = 0;
  for (;;) {
    try {
      errors.clear();
      errors.reserve(steps.size());
      for (double h : steps) errors.push_back(error_at(h));
      return;
    } catch (const CollisionError&) {
      if (++shrink > 12) throw;
    } catch (const NotADiffeoError&) {
      if (++shrink > 12) throw;
    }
    for (auto& h : steps) h *= 0.5;
    note += "sweep halved after guard violation; ";
  }
}

inline void finish_report(ScReport& rep) {
  rep.exclusion_floor = 100.0 * std::numeric_limits<double>::epsilon();
  rep.min_error = *std::min_element(rep.errors.begin(), rep.errors.end());
  rep.fitted_slope = loglog_slope(rep.steps, rep.errors, rep.exclusion_floor, rep.n_excluded);
}

template <typename Tangent>
ScReport check_differential_core(std::string map_name, std::string base_desc, int level,
                                 const std::function<Tangent(double)>& fd_at, const Tangent& analytic,
                                 std::vector<double> steps, const Config& cfg, bool negative_control) {
  ScReport rep;
  rep.map_name = std::move(map_name);
  rep.base_descriptor = std::move(base_desc);
  rep.kind = "fd-order";
  rep.level = level;
  rep.slope_lo = cfg.tol("fd_slope_lo", 1.8);
  rep.slope_hi = cfg.tol("fd_slope_hi", 2.2);
  rep.negative_control = negative_control;
  const double tol_rel = cfg.tol("fd_rel", 1e-6);
  const double denom = std::max(tangent_level_norm(analytic, level), 1e-12);

  rep.steps = std::move(steps);
  run_sweep(rep.steps, rep.errors,
            [&](double h) { return tangent_level_norm(fd_at(h) - analytic, level) / denom; }, rep.note);
  finish_report(rep);

  if (rep.n_excluded == static_cast<int>(rep.steps.size())) {
    rep.pass = true;  // the difference never rose above roundoff: exact match
    rep.note += "all errors at roundoff floor; ";
  } else if (std::isnan(rep.fitted_slope)) {
    rep.pass = false;
    rep.note += "too few points above roundoff floor to fit a slope; ";
  } else {
    rep.pass = rep.min_error <= tol_rel && rep.fitted_slope >= rep.slope_lo &&
               rep.fitted_slope <= rep.slope_hi;
  }
  return rep;
}

template <typename Tangent>
ScReport sc1_core(std::string map_name, std::string base_desc, int m,
                  const std::function<Tangent(double)>& remainder_at, double scale_denom,
                  std::vector<double> steps, const Config& cfg, bool negative_control) {
  ScReport rep;
  rep.map_name = std::move(map_name);
  rep.base_descriptor = std::move(base_desc);
  rep.kind = "sc1-remainder";
  rep.level = m;
  rep.slope_lo = 1.0 + cfg.tol("sc1_margin", 0.5);
  rep.negative_control = negative_control;
  rep.note = "remainder measured at level " + std::to_string(m) + ", inputs read at level " +
             std::to_string(m + 1) + "; ";

  rep.steps = std::move(steps);
  run_sweep(rep.steps, rep.errors,
            [&](double h) { return tangent_level_norm(remainder_at(h), m) / scale_denom; }, rep.note);
  finish_report(rep);

  if (rep.n_excluded == static_cast<int>(rep.steps.size())) {
    rep.pass = true;  // remainder vanished to roundoff: map is affine in this direction
    rep.note += "all remainders at roundoff floor; ";
  } else if (std::isnan(rep.fitted_slope)) {
    rep.pass = false;
    rep.note += "too few points above roundoff floor to fit a slope; ";
  } else {
    rep.pass = rep.fitted_slope >= rep.slope_lo;
  }
  return rep;
}

}  // namespace detail

/// FD-order check of an analytic differential in one direction. The error at
/// each step is the relative Sobolev-norm distance between the central
/// difference and the analytic value; pass requires the configured accuracy
/// and a fitted slope within the second-order window.
inline ScReport check_differential(std::string map_name, std::string base_desc,
                                   const std::function<Loop(const Loop&)>& map, const Loop& base,
                                   const Loop& dir, const Loop& analytic, std::vector<double> steps,
                                   int level, const Config& cfg, bool negative_control = false) {
  const std::function<Loop(double)> fd_at = [map, base, dir](double h) {
    return fd_directional(map, base, dir, h);
  };
  return detail::check_differential_core<Loop>(std::move(map_name), std::move(base_desc), level,
                                               fd_at, analytic, std::move(steps), cfg,
                                               negative_control);
}

inline ScReport check_differential(std::string map_name, std::string base_desc,
                                   const std::function<CircleDiffeo(const Loop&)>& map,
                                   const Loop& base, const Loop& dir, const TangentDiffeo& analytic,
                                   std::vector<double> steps, int level, const Config& cfg,
                                   bool negative_control = false) {
  const std::function<TangentDiffeo(double)> fd_at = [map, base, dir](double h) {
    return fd_directional(map, base, dir, h);
  };
  return detail::check_differential_core<TangentDiffeo>(std::move(map_name), std::move(base_desc),
                                                        level, fd_at, analytic, std::move(steps),
                                                        cfg, negative_control);
}

inline ScReport check_differential(std::string map_name, std::string base_desc,
                                   const std::function<CircleDiffeo(const CircleDiffeo&)>& map,
                                   const CircleDiffeo& base, const TangentDiffeo& dir,
                                   const TangentDiffeo& analytic, std::vector<double> steps,
                                   int level, const Config& cfg, bool negative_control = false) {
  const std::function<TangentDiffeo(double)> fd_at = [map, base, dir](double h) {
    return fd_directional(map, base, dir, h);
  };
  return detail::check_differential_core<TangentDiffeo>(std::move(map_name), std::move(base_desc),
                                                        level, fd_at, analytic, std::move(steps),
                                                        cfg, negative_control);
}

/// Direction-list form: one report per direction, differentials supplied as
/// a map from direction to tangent.
inline std::vector<ScReport> check_differential(const std::string& map_name,
                                                const std::string& base_desc,
                                                const std::function<Loop(const Loop&)>& map,
                                                const std::function<Loop(const Loop&)>& d_map,
                                                const Loop& base, const std::vector<Loop>& dirs,
                                                std::vector<double> steps, int level,
                                                const Config& cfg) {
  std::vector<ScReport> out;
  out.reserve(dirs.size());
  for (std::size_t i = 0; i < dirs.size(); ++i)
    out.push_back(check_differential(map_name, base_desc + "/dir" + std::to_string(i), map, base,
                                     dirs[i], d_map(dirs[i]), steps, level, cfg));
  return out;
}

/// sc1 remainder check for a loop-valued map: fits the decay slope of
/// || map(base + h dir) - map(base) - h analytic ||_{W^{2+m,2}} and passes
/// when it clears 1 + margin.
inline ScReport sc1_remainder_slope(std::string map_name, std::string base_desc,
                                    const std::function<Loop(const Loop&)>& map, const Loop& base,
                                    const Loop& dir, const Loop& analytic, int m,
                                    std::vector<double> steps, const Config& cfg,
                                    bool negative_control = false) {
  const Loop at_base = map(base);
  const double scale = std::max(detail::tangent_level_norm(at_base, m), 1e-12);
  const std::function<Loop(double)> rem = [map, base, dir, analytic, at_base](double h) {
    return map(base + h * dir) - at_base - h * analytic;
  };
  return detail::sc1_core<Loop>(std::move(map_name), std::move(base_desc), m, rem, scale,
                                std::move(steps), cfg, negative_control);
}

/// sc1 remainder check for a diffeo-valued map of a diffeo (inversion).
inline ScReport sc1_remainder_slope(std::string map_name, std::string base_desc,
                                    const std::function<CircleDiffeo(const CircleDiffeo&)>& map,
                                    const CircleDiffeo& base, const TangentDiffeo& dir,
                                    const TangentDiffeo& analytic, int m, std::vector<double> steps,
                                    const Config& cfg, bool negative_control = false) {
  const CircleDiffeo at_base = map(base);
  const double scale = std::max(detail::tangent_level_norm(at_base.periodic_part(), m), 1.0);
  const std::function<TangentDiffeo(double)> rem = [map, base, dir, analytic,
                                                    at_base](double h) {
    return lift_difference(map(nudged_diffeo(base, dir, h)), at_base) - h * analytic;
  };
  return detail::sc1_core<TangentDiffeo>(std::move(map_name), std::move(base_desc), m, rem, scale,
                                         std::move(steps), cfg, negative_control);
}

namespace detail {

inline std::string case_label(const Config& cfg, const char* family, int index) {
  return std::string(family) + "/seed" + std::to_string(cfg.seed) + "/case" + std::to_string(index);
}

}  // namespace detail

/// FD validation suite: every analytic differential against its central
/// difference, plus designated corrupted-differential negative controls.
/// With inject_corruption set, every differential is corrupted and every
/// case becomes a negative control (the harness must then report failures).
inline std::vector<ScReport> run_fd_suite(const Config& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  std::vector<ScReport> out;
  // deep enough that second-order truncation clears the 1e-6 accuracy bar
  // and a 1% corruption plateau dominates the small-h end
  const auto steps = detail::geometric_steps(5e-2, 12);
  const double corruption = 1.01;

  const std::function<CircleDiffeo(const CircleDiffeo&)> invert_map =
      [](const CircleDiffeo& q) { return invert(q); };
  const std::function<CircleDiffeo(const Loop&)> time_map = [cfg](const Loop& q) {
    return time_rescale(q, cfg.eps_collision, cfg.delta_mono);
  };
  const std::function<Loop(const Loop&)> reg_map = [cfg](const Loop& q) {
    return regularize(q, cfg.eps_collision, cfg.delta_mono);
  };

  const auto add_invert = [&](int index, bool corrupt) {
    const CircleDiffeo psi = random_diffeo(rng, cfg.n, cfg.delta_mono);
    const TangentDiffeo hat = random_tangent(rng, cfg.n);
    TangentDiffeo analytic = d_invert(psi, hat);
    if (corrupt) analytic = corruption * analytic;
    out.push_back(check_differential("invert", detail::case_label(cfg, "invert", index), invert_map,
                                     psi, hat, analytic, steps, 0, cfg, corrupt));
  };
  const auto add_time = [&](int index, bool corrupt) {
    const Loop z = random_loop(rng, cfg.n);
    const Loop zh = random_tangent_loop(rng, cfg.n);
    TangentDiffeo analytic = d_time_rescale(z, zh, cfg.eps_collision);
    if (corrupt) analytic = corruption * analytic;
    out.push_back(check_differential("time_rescale", detail::case_label(cfg, "time_rescale", index),
                                     time_map, z, zh, analytic, steps, 0, cfg, corrupt));
  };
  const auto add_reg = [&](int index, bool corrupt) {
    const Loop z = random_loop(rng, cfg.n);
    const Loop zh = random_tangent_loop(rng, cfg.n);
    Loop analytic = d_regularize(z, zh, cfg.eps_collision, cfg.delta_mono);
    if (corrupt) analytic = corruption * analytic;
    out.push_back(check_differential("regularize", detail::case_label(cfg, "regularize", index),
                                     reg_map, z, zh, analytic, steps, 0, cfg, corrupt));
  };

  for (int i = 0; i < 20; ++i) add_invert(i, cfg.inject_corruption);
  for (int i = 0; i < 10; ++i) add_time(i, cfg.inject_corruption);
  for (int i = 0; i < 20; ++i) add_reg(i, cfg.inject_corruption);
  // designated negative controls: the suite must be able to fail
  add_invert(20, true);
  add_time(10, true);
  add_reg(20, true);
  return out;
}

/// sc1 remainder suite at level pairs (m, m+1) over the requested m values,
/// plus the exactly-quadratic square map and negative controls.
inline std::vector<ScReport> run_sc1_suite(const Config& cfg,
                                           const std::vector<int>& levels = {0, 1}) {
  cfg.validate();
  Rng rng(cfg.seed + 1);
  std::vector<ScReport> out;
  // the sweep must reach steps where a 1% linear corruption outgrows the
  // genuine quadratic remainder, or negative controls could not fail; the
  // plateau trim in the fit keeps the extra depth harmless for clean cases
  const auto steps = detail::geometric_steps(1e-1, 15);
  const double corruption = 1.01;

  const std::function<Loop(const Loop&)> reg_map = [cfg](const Loop& q) {
    return regularize(q, cfg.eps_collision, cfg.delta_mono);
  };
  const std::function<CircleDiffeo(const CircleDiffeo&)> invert_map =
      [](const CircleDiffeo& q) { return invert(q); };
  const std::function<Loop(const Loop&)> square_map = [](const Loop& q) { return square(q); };

  const auto add_reg = [&](int index, int m, bool corrupt) {
    const Loop z = random_loop(rng, cfg.n);
    const Loop zh = random_tangent_loop(rng, cfg.n);
    Loop analytic = d_regularize(z, zh, cfg.eps_collision, cfg.delta_mono);
    if (corrupt) analytic = corruption * analytic;
    out.push_back(sc1_remainder_slope("regularize",
                                      detail::case_label(cfg, "regularize", index) + "/m" +
                                          std::to_string(m),
                                      reg_map, z, zh, analytic, m, steps, cfg, corrupt));
  };
  const auto add_invert = [&](int index, int m, bool corrupt) {
    const CircleDiffeo psi = random_diffeo(rng, cfg.n, cfg.delta_mono);
    const TangentDiffeo hat = random_tangent(rng, cfg.n);
    TangentDiffeo analytic = d_invert(psi, hat);
    if (corrupt) analytic = corruption * analytic;
    out.push_back(sc1_remainder_slope("invert",
                                      detail::case_label(cfg, "invert", index) + "/m" +
                                          std::to_string(m),
                                      invert_map, psi, hat, analytic, m, steps, cfg, corrupt));
  };

  for (int m : levels)
    for (int i = 0; i < 10; ++i) add_reg(i, m, cfg.inject_corruption);
  for (int m : levels)
    for (int i = 0; i < 10; ++i) add_invert(i, m, cfg.inject_corruption);

  {
    const Loop z = random_loop(rng, cfg.n);
    const Loop zh = random_tangent_loop(rng, cfg.n);
    Loop analytic = 2.0 * pointwise_product(z, zh);
    if (cfg.inject_corruption) analytic = corruption * analytic;
    ScReport rep = sc1_remainder_slope("square", detail::case_label(cfg, "square", 0) + "/m0",
                                       square_map, z, zh, analytic, 0, steps, cfg,
                                       cfg.inject_corruption);
    rep.note += "quadratic map: remainder slope must equal 2; ";
    out.push_back(std::move(rep));
  }

  // designated negative controls
  add_reg(20, 0, true);
  add_invert(20, 0, true);
  return out;
}

inline std::vector<ScReport> run_all_suites(const Config& cfg,
                                            const std::vector<int>& levels = {0, 1}) {
  std::vector<ScReport> out = run_fd_suite(cfg);
  std::vector<ScReport> sc1 = run_sc1_suite(cfg, levels);
  out.insert(out.end(), std::make_move_iterator(sc1.begin()), std::make_move_iterator(sc1.end()));
  return out;
}

/// A suite is healthy when every ordinary case passes, every negative
/// control fails, and at least one negative control is present.
inline bool suite_ok(const std::vector<ScReport>& reports) {
  bool has_negative = false;
  for (const auto& r : reports) {
    if (r.negative_control) {
      has_negative = true;
      if (r.pass) return false;
    } else if (!r.pass) {
      return false;
    }
  }
  return has_negative;
}

}  // namespace loopreg
