#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "loopreg/diffeo.hpp"
#include "loopreg/errors.hpp"
#include "loopreg/loop.hpp"
#include "loopreg/verify.hpp"

namespace loopreg {

namespace detail {

inline nlohmann::json json_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return j;
}

inline void json_to_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
  if (!out.good()) throw ParseError("write failed: " + path);
}

inline double finite_number(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(where + ": number must be finite");
  return v;
}

inline Complex complex_pair(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw ParseError(where + ": expected [re, im]");
  return Complex{finite_number(j[0], where), finite_number(j[1], where)};
}

}  // namespace detail

/// Loop file format: {"n": int, "samples": [[re, im], ...]} or
/// {"n": int, "modes": {"<m>": [re, im], ...}}.
inline Loop loop_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("loop: expected a JSON object");
  if (j.contains("samples")) {
    const auto& arr = j.at("samples");
    if (!arr.is_array() || arr.empty()) throw ParseError("loop: samples must be a non-empty array");
    std::vector<Complex> samples;
    samples.reserve(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i)
      samples.push_back(detail::complex_pair(arr[i], "loop.samples[" + std::to_string(i) + "]"));
    if (j.contains("n") && j.at("n").get<long long>() != static_cast<long long>(samples.size()))
      throw ParseError("loop: n does not match the sample count");
    try {
      return Loop(std::move(samples));
    } catch (const ConfigError& e) {
      throw ParseError(std::string("loop: ") + e.what());
    }
  }
  if (j.contains("modes")) {
    if (!j.contains("n")) throw ParseError("loop: mode form requires n");
    const auto n = j.at("n").get<long long>();
    const auto& obj = j.at("modes");
    if (!obj.is_object()) throw ParseError("loop: modes must be an object");
    std::map<int, Complex> modes;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      int m = 0;
      try {
        m = std::stoi(it.key());
      } catch (const std::exception&) {
        throw ParseError("loop.modes: key '" + it.key() + "' is not an integer");
      }
      modes[m] = detail::complex_pair(it.value(), "loop.modes[" + it.key() + "]");
    }
    try {
      return loop_from_modes(static_cast<int>(n), modes);
    } catch (const ConfigError& e) {
      throw ParseError(std::string("loop: ") + e.what());
    }
  }
  throw ParseError("loop: need either samples or modes");
}

inline nlohmann::json loop_to_json(const Loop& z) {
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& v : z.samples()) samples.push_back({v.real(), v.imag()});
  return nlohmann::json{{"n", z.grid_size()}, {"samples", std::move(samples)}};
}

inline Loop read_loop(const std::string& path) { return loop_from_json(detail::json_from_file(path)); }

inline void write_loop(const std::string& path, const Loop& z) {
  detail::json_to_file(path, loop_to_json(z));
}

/// Diffeo file format: {"n": int, "lift": [real, ...]} with lift[0] in [0,1).
inline CircleDiffeo diffeo_from_json(const nlohmann::json& j, double delta_mono = kDefaultMonoDelta) {
  if (!j.is_object() || !j.contains("lift")) throw ParseError("diffeo: expected an object with lift");
  const auto& arr = j.at("lift");
  if (!arr.is_array() || arr.empty()) throw ParseError("diffeo: lift must be a non-empty array");
  std::vector<double> lift;
  lift.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i)
    lift.push_back(detail::finite_number(arr[i], "diffeo.lift[" + std::to_string(i) + "]"));
  if (j.contains("n") && j.at("n").get<long long>() != static_cast<long long>(lift.size()))
    throw ParseError("diffeo: n does not match the lift length");
  try {
    return CircleDiffeo(std::move(lift), delta_mono);
  } catch (const ConfigError& e) {
    throw ParseError(std::string("diffeo: ") + e.what());
  }
}

inline nlohmann::json diffeo_to_json(const CircleDiffeo& psi) {
  return nlohmann::json{{"n", psi.grid_size()}, {"lift", psi.lift_samples()}};
}

inline CircleDiffeo read_diffeo(const std::string& path, double delta_mono = kDefaultMonoDelta) {
  return diffeo_from_json(detail::json_from_file(path), delta_mono);
}

inline void write_diffeo(const std::string& path, const CircleDiffeo& psi) {
  detail::json_to_file(path, diffeo_to_json(psi));
}

inline nlohmann::json to_json(const ScReport& r) {
  nlohmann::json j{{"map_name", r.map_name},
                   {"base_descriptor", r.base_descriptor},
                   {"kind", r.kind},
                   {"level", r.level},
                   {"steps", r.steps},
                   {"errors", r.errors},
                   {"fitted_slope", r.fitted_slope},
                   {"slope_lo", r.slope_lo},
                   {"slope_hi", r.slope_hi},
                   {"min_error", r.min_error},
                   {"exclusion_floor", r.exclusion_floor},
                   {"n_excluded", r.n_excluded},
                   {"negative_control", r.negative_control},
                   {"pass", r.pass},
                   {"note", r.note}};
  return j;  // non-finite slopes serialize as null
}

inline nlohmann::json to_json(const LevelProfile& p) {
  return nlohmann::json{{"norms", p.norms}};
}

inline void write_reports(const std::string& path, const std::vector<ScReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  detail::json_to_file(path, arr);
}

/// One tidy CSV across all cases: case index, map, kind, step, error.
inline void write_case_csv(const std::string& path, const std::vector<ScReport>& reports) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  out << "case,map_name,kind,level,h,error\n";
  char buf[64];
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    for (std::size_t k = 0; k < r.steps.size(); ++k) {
      out << i << ',' << r.map_name << ',' << r.kind << ',' << r.level << ',';
      std::snprintf(buf, sizeof buf, "%.17g", r.steps[k]);
      out << buf << ',';
      std::snprintf(buf, sizeof buf, "%.17g", r.errors[k]);
      out << buf << '\n';
    }
  }
  if (!out.good()) throw ParseError("write failed: " + path);
}

}  // namespace loopreg
