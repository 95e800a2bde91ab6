// loopreg: apply the rescale-square operation to loop files, run the
// numerical verification suites, and emit the worked example gallery.
//
// Exit codes: 0 success, 1 verification failure, 2 I/O or parse or config
// error, 3 domain guard rejection (collision / monotonicity).

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "loopreg/loopreg.hpp"

namespace {

using namespace loopreg;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitIoError = 2;
constexpr int kExitDomainError = 3;

nlohmann::json side_profile(const Loop& z, int k_max) {
  return nlohmann::json{{"winding", winding_number(z)},
                        {"min_modulus", min_modulus(z)},
                        {"level_profile", level_norm_profile(z, k_max).norms}};
}

int cmd_regularize(const std::string& input, const std::string& output, const Config& cfg) {
  const Loop z = read_loop(input);
  const CircleDiffeo t = time_rescale(z, cfg.eps_collision, cfg.delta_mono);
  const CircleDiffeo tau = invert(t);
  const Loop r = compose_loop(square(z), tau);
  write_loop(output, r);

  nlohmann::json diag{{"input", side_profile(z, cfg.k_max)},
                      {"output", side_profile(r, cfg.k_max)},
                      {"t_roundtrip_residual", inversion_residual(t, tau)}};
  detail::json_to_file(output + ".diag.json", diag);
  std::printf("regularized %s -> %s (winding %d -> %d)\n", input.c_str(), output.c_str(),
              winding_number(z), winding_number(r));
  return kExitOk;
}

int cmd_verify(const std::string& suite, const std::string& out_path,
               const std::vector<int>& levels, const Config& cfg) {
  std::vector<ScReport> reports;
  if (suite == "fd")
    reports = run_fd_suite(cfg);
  else if (suite == "sc1")
    reports = run_sc1_suite(cfg, levels);
  else
    reports = run_all_suites(cfg, levels);

  write_reports(out_path, reports);
  std::string csv_path = out_path;
  const auto dot = csv_path.rfind(".json");
  if (dot != std::string::npos) csv_path.erase(dot);
  write_case_csv(csv_path + ".csv", reports);

  int ordinary = 0, failed = 0, controls = 0, undetected = 0;
  for (const auto& r : reports) {
    if (r.negative_control) {
      ++controls;
      if (r.pass) {
        ++undetected;
        std::printf("UNDETECTED CORRUPTION %s %s (slope %.3f)\n", r.map_name.c_str(),
                    r.base_descriptor.c_str(), r.fitted_slope);
      }
    } else {
      ++ordinary;
      if (!r.pass) {
        ++failed;
        std::printf("FAIL %s %s (min_err %.3e, slope %.3f) %s\n", r.map_name.c_str(),
                    r.base_descriptor.c_str(), r.min_error, r.fitted_slope, r.note.c_str());
      }
    }
  }
  const bool ok = suite_ok(reports);
  std::printf("suite %s: %d cases (%d checks, %d negative controls), %d failing, %d undetected: %s\n",
              suite.c_str(), static_cast<int>(reports.size()), ordinary, controls, failed,
              undetected, ok ? "ok" : "FAILED");
  return ok ? kExitOk : kExitVerifyFail;
}

int cmd_gallery(const std::string& out_dir, const Config& cfg) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw ParseError("cannot create directory " + out_dir + ": " + ec.message());
  const auto path = [&](const std::string& name) { return (fs::path(out_dir) / name).string(); };

  nlohmann::json manifest;
  manifest["config"] = {{"n", cfg.n},
                        {"eps_collision", cfg.eps_collision},
                        {"delta_mono", cfg.delta_mono},
                        {"k_max", cfg.k_max}};
  manifest["examples"] = nlohmann::json::array();

  const auto emit = [&](const std::string& name, const Loop& z, const std::string& description) {
    const std::string in_name = name + ".json";
    const std::string out_name = name + "_regularized.json";
    write_loop(path(in_name), z);
    write_loop(path(out_name), regularize(z, cfg.eps_collision, cfg.delta_mono));
    manifest["examples"].push_back({{"name", name},
                                    {"input", in_name},
                                    {"expected_output", out_name},
                                    {"description", description}});
  };

  emit("constant", constant_loop(8, Complex{2.0, 0.0}), "constant loop c; R(c) = c^2");
  emit("pure_mode", loop_from_modes(32, {{1, Complex{1.0, 0.0}}}),
       "unit circle e^{2 pi i t}; R doubles the winding");
  const Loop offset =
      loop_from_modes(64, {{0, Complex{1.0, 0.0}}, {1, Complex{0.5, 0.0}}});
  emit("offset_circle", offset, "offset circle 1 + 0.5 e^{2 pi i t}");

  // closed-form-checkable profile of the time rescaling for the offset circle
  {
    const CircleDiffeo t = time_rescale(offset, cfg.eps_collision, cfg.delta_mono);
    std::ofstream csv(path("offset_circle_tz.csv"));
    if (!csv) throw ParseError("cannot open " + path("offset_circle_tz.csv") + " for writing");
    csv << "tau,t\n";
    char buf[64];
    for (int j = 0; j < 1000; ++j) {
      const double tau = static_cast<double>(j) / 1000.0;
      std::snprintf(buf, sizeof buf, "%.17g", tau);
      csv << buf << ',';
      std::snprintf(buf, sizeof buf, "%.17g", t.lift_at(tau));
      csv << buf << '\n';
    }
    if (!csv.good()) throw ParseError("write failed: offset_circle_tz.csv");
    manifest["profiles"] = {{"offset_circle_tz", "offset_circle_tz.csv"}};
  }

  detail::json_to_file(path("manifest.json"), manifest);
  std::printf("gallery written to %s (3 example pairs + manifest)\n", out_dir.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rescale-square regularization toolkit"};
  app.require_subcommand(1);

  Config cfg;
  const auto add_common = [&cfg](CLI::App* sub) {
    sub->add_option("--n", cfg.n, "grid size (power of two >= 8)");
    sub->add_option("--seed", cfg.seed, "random suite seed");
    sub->add_option("--eps-collision", cfg.eps_collision, "collision guard on min |z|");
    sub->add_option("--delta-mono", cfg.delta_mono, "monotonicity floor for lift slopes");
    sub->add_option("--k-max", cfg.k_max, "highest Sobolev level in diagnostics");
  };

  std::string input, output = "regularized.json";
  CLI::App* reg = app.add_subcommand("regularize", "apply R to a loop file");
  reg->add_option("input", input, "input loop JSON")->required();
  reg->add_option("--out", output, "output loop JSON path");
  add_common(reg);

  std::string suite = "all", report_path = "reports.json", level_list = "0,1";
  bool inject = false;
  CLI::App* ver = app.add_subcommand("verify", "run the certification suites");
  ver->add_option("suite", suite, "fd, sc1, or all")
      ->check(CLI::IsMember({"fd", "sc1", "all"}));
  ver->add_option("--out", report_path, "report JSON path (CSV written alongside)");
  ver->add_option("--k", level_list, "comma-separated sc1 level indices");
  ver->add_flag("--inject-corruption", inject,
                "corrupt every differential by 1%; the run must detect it");
  add_common(ver);

  std::string gallery_dir = "gallery";
  CLI::App* gal = app.add_subcommand("gallery", "emit the worked examples");
  gal->add_option("--out", gallery_dir, "output directory");
  add_common(gal);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitIoError;
  }

  try {
    cfg.validate();
    if (reg->parsed()) return cmd_regularize(input, output, cfg);
    if (ver->parsed()) {
      cfg.inject_corruption = inject;
      std::vector<int> levels;
      std::size_t pos = 0;
      while (pos < level_list.size()) {
        const auto comma = level_list.find(',', pos);
        const std::string tok = level_list.substr(pos, comma - pos);
        try {
          levels.push_back(std::stoi(tok));
        } catch (const std::exception&) {
          throw ConfigError("--k: '" + tok + "' is not an integer");
        }
        if (levels.back() < 0) throw ConfigError("--k: level indices must be >= 0");
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      if (levels.empty()) throw ConfigError("--k: need at least one level index");
      return cmd_verify(suite, report_path, levels, cfg);
    }
    return cmd_gallery(gallery_dir, cfg);
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIoError;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIoError;
  } catch (const CollisionError& e) {
    std::fprintf(stderr, "domain error: %s\n", e.what());
    return kExitDomainError;
  } catch (const NotADiffeoError& e) {
    std::fprintf(stderr, "domain error: %s\n", e.what());
    return kExitDomainError;
  } catch (const ConvergenceError& e) {
    std::fprintf(stderr, "domain error: %s\n", e.what());
    return kExitDomainError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIoError;
  }
}
