// catlink: command-line front end.
//
//   catlink wigner          input and teleported Wigner grids (fixed channel)
//   catlink channel-pdf     transmissivity densities and raw samples
//   catlink fidelity-curve  mean fidelity vs mean loss per channel model
//   catlink sweep           ordering check over (r, |alpha0|^2, phi)
//   catlink calibrate-elliptic  width broadening for a target loss
//
// Settings are layered: built-in defaults < defaults file < --config < flags.
// Exit codes: 0 ok, 1 other failure, 2 usage, 3 numerical failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "catlink/catlink.hpp"
#include "catlink/commands.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace catlink;
using commands::UsageError;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

// Flags shared by every subcommand; unset ones leave the layered config alone.
struct CommonFlags {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<unsigned> workers;
  std::string out_dir = "out";
  std::string config;
  bool no_defaults = false;
};

// Physics flags; strings so that "1.5i" and "pi/2" parse the same way as in JSON.
struct StateFlags {
  std::string alpha0;
  std::string phi;
  std::optional<double> r;
  std::optional<double> eta_sq;
};

struct CurveFlags {
  std::vector<std::string> models;
  bool models_given = false;
  std::vector<double> losses;
  std::string method;
  std::string arms;
  std::string gain_mode;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--seed", f.seed, "master seed");
  sub->add_option("--samples", f.samples, "channel draws per point");
  sub->add_option("--workers", f.workers, "worker threads (0 = all cores; never changes results)");
  sub->add_option("--out-dir", f.out_dir, "output directory")->capture_default_str();
  sub->add_option("--config", f.config, "JSON config or a previous run manifest");
  sub->add_flag("--no-defaults", f.no_defaults, "skip the installed defaults file");
}

void add_state(CLI::App* sub, StateFlags& f) {
  sub->add_option("--alpha0", f.alpha0, "cat amplitude, e.g. 1.5i or 0.3+1.2i");
  sub->add_option("--phi", f.phi, "cat phase, e.g. pi or 0.5*pi");
  sub->add_option("--r", f.r, "squeezing parameter");
  sub->add_option("--eta-sq", f.eta_sq, "detector intensity efficiency");
}

void add_curve(CLI::App* sub, CurveFlags& f) {
  sub->add_option("--method", f.method, "exact | binned | closed-form");
  sub->add_option("--arms", f.arms, "both | alice | bob");
  sub->add_option("--gain-mode", f.gain_mode, "balanced | unity");
}

fs::path default_config_path() {
  if (const char* env = std::getenv("CATLINK_DEFAULTS")) return env;
#ifdef CATLINK_DEFAULT_CONFIG
  return CATLINK_DEFAULT_CONFIG;
#else
  return {};
#endif
}

RunConfig load_config(const CommonFlags& common, const StateFlags* state,
                      const CurveFlags* curve) {
  RunConfig cfg;
  try {
    if (!common.no_defaults) {
      const fs::path d = default_config_path();
      if (!d.empty() && fs::exists(d)) apply_json(read_json_file(d.string()), cfg);
    }
    if (!common.config.empty()) {
      json j = read_json_file(common.config);
      // A manifest carries its resolved config under "config".
      if (j.is_object() && j.contains("command") && j.contains("config")) j = j.at("config");
      apply_json(j, cfg);
    }
    if (common.seed) cfg.seed = *common.seed;
    if (common.samples) cfg.samples = *common.samples;
    if (common.workers) cfg.workers = *common.workers;
    if (state != nullptr) {
      if (!state->alpha0.empty()) cfg.alpha0 = parse::complex_number(state->alpha0);
      if (!state->phi.empty()) cfg.phi = parse::angle(state->phi);
      if (state->r) cfg.r = *state->r;
      if (state->eta_sq) cfg.eta_sq = *state->eta_sq;
    }
    if (curve != nullptr) {
      if (curve->models_given) cfg.models = curve->models;
      if (!curve->losses.empty()) cfg.losses_db = curve->losses;
      if (!curve->method.empty()) cfg.method = fidelity_method_from_string(curve->method);
      if (!curve->arms.empty()) cfg.arms = arm_mode_from_string(curve->arms);
      if (!curve->gain_mode.empty()) cfg.gain_mode = gain_mode_from_string(curve->gain_mode);
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

// Written before the run (status "running") and rewritten at the end, so an
// interrupted run leaves visible evidence.
class Manifest {
 public:
  Manifest(std::string command, const RunConfig& cfg, fs::path out_dir, int argc, char** argv)
      : path_(out_dir / ("manifest_" + command + ".json")),
        out_dir_(std::move(out_dir)),
        start_(std::chrono::steady_clock::now()) {
    std::vector<std::string> args(argv, argv + argc);
    doc_ = {{"command", command},       {"version", CATLINK_VERSION},
            {"seed", cfg.seed},         {"workers", cfg.workers},
            {"config", to_json(cfg)},   {"argv", args},
            {"status", "running"},      {"outputs", json::array()}};
    fs::create_directories(out_dir_);
    write();
  }

  void finish(const std::vector<fs::path>& outputs, const json& summary) {
    for (const auto& p : outputs) doc_["outputs"].push_back(p.lexically_relative(out_dir_).string());
    doc_["summary"] = summary;
    close("complete");
  }

  void fail(const std::string& what) {
    doc_["error"] = what;
    close("failed");
  }

 private:
  void close(const char* status) {
    doc_["status"] = status;
    doc_["duration_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    write();
  }

  void write() const {
    std::ofstream os(path_);
    os << doc_.dump(2) << '\n';
  }

  fs::path path_;
  fs::path out_dir_;
  std::chrono::steady_clock::time_point start_;
  json doc_;
};

json run_wigner(const RunConfig& cfg, const fs::path& out, std::vector<fs::path>& files) {
  const auto s = commands::cmd_wigner(cfg, out);
  files = s.outputs;
  std::printf("loss %.3f dB per link pair, T = %.6f per arm, V' = %.6f\n", cfg.loss_db,
              s.transmissivity, s.variance_eff);
  std::printf("input      W(0,0) = %+.10f\n", s.input_origin);
  std::printf("teleported W(0,0) = %+.10f (grid), %+.10f (analytic): %s\n", s.teleported_origin,
              s.teleported_origin_analytic,
              s.teleported_origin < 0.0 ? "negative" : "non-negative");
  return {{"input_origin", s.input_origin},
          {"teleported_origin", s.teleported_origin},
          {"teleported_origin_analytic", s.teleported_origin_analytic},
          {"variance_eff", s.variance_eff}};
}

json run_channel_pdf(const RunConfig& cfg, const fs::path& out, std::vector<fs::path>& files) {
  const auto s = commands::cmd_channel_pdf(cfg, out);
  files = s.outputs;
  json lines = json::array();
  std::printf("%-15s %8s %10s %14s\n", "model", "sigma/a", "<T>", "loss dB");
  for (const auto& l : s.lines) {
    std::printf("%-15s %8.3f %10.6f %8.4f +- %.4f\n", l.model.c_str(), l.sigma_over_a, l.mean_t,
                l.mean_loss_db, l.loss_stderr_db);
    lines.push_back({{"model", l.model},
                     {"sigma_over_a", l.sigma_over_a},
                     {"mean_T", l.mean_t},
                     {"mean_loss_db", l.mean_loss_db},
                     {"loss_stderr_db", l.loss_stderr_db}});
  }
  return lines;
}

json run_fidelity_curve(const RunConfig& cfg, const fs::path& out, std::vector<fs::path>& files) {
  const auto s = commands::cmd_fidelity_curve(cfg, out);
  files = s.outputs;
  json curves = json::object();
  for (const auto& c : s.curves) {
    std::printf("%s\n", c.model.c_str());
    if (c.model != "fixed") std::printf("  cut-off loss %.4f dB\n", c.cutoff_loss_db);
    for (double l : c.skipped_losses) {
      std::fprintf(stderr, "note: %s: %.2f dB is below the cut-off loss, skipped\n",
                   c.model.c_str(), l);
    }
    for (const auto& r : c.rows) {
      std::printf("  %8.4f dB  F = %.6f +- %.6f\n", r.mean_loss_db, r.mean_fidelity, r.stderr);
    }
    curves[c.model] = {{"cutoff_loss_db", c.cutoff_loss_db},
                       {"skipped_losses_db", c.skipped_losses},
                       {"points", c.rows.size()}};
  }
  return curves;
}

json run_sweep(const RunConfig& cfg, const fs::path& out, std::vector<fs::path>& files) {
  const auto s = commands::cmd_sweep(cfg, out);
  files = s.outputs;
  json tuples = json::array();
  for (const auto& t : s.tuples) {
    std::printf("r = %.3f  |alpha0|^2 = %.3f  phi = %.4f  violations %zu/%zu\n", t.r, t.alpha_sq,
                t.phi, t.violations(), t.checks.size());
    tuples.push_back(
        {{"r", t.r}, {"alpha_sq", t.alpha_sq}, {"phi", t.phi}, {"violations", t.violations()}});
  }
  std::printf("ordering violations: %zu\n", s.violations);
  return {{"violations", s.violations}, {"tuples", tuples}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cat-state teleportation through lossy and fading channels", "catlink"};
  app.set_version_flag("--version", std::string(CATLINK_VERSION));
  app.require_subcommand(1);

  CommonFlags common;
  StateFlags state;
  CurveFlags curve;
  std::optional<double> loss_db;
  std::optional<std::size_t> grid_points;
  std::optional<double> half_width;
  std::vector<double> sigmas;
  std::string r_range;
  std::string alpha_sq_range;
  std::string phi_range;
  double target_db = 3.0;
  double target_sigma = 0.4;

  auto* wigner = app.add_subcommand("wigner", "input and teleported Wigner grids");
  add_common(wigner, common);
  add_state(wigner, state);
  wigner->add_option("--loss-db", loss_db, "total two-arm loss of the fixed channel");
  wigner->add_option("--grid-points", grid_points, "lattice points per axis (power of two)");
  wigner->add_option("--half-width", half_width, "lattice half-width");

  auto* pdf = app.add_subcommand("channel-pdf", "transmissivity densities and samples");
  add_common(pdf, common);
  pdf->add_option("--model", curve.models, "beam-wandering, elliptic")->delimiter(',');
  pdf->add_option("--sigmas", sigmas, "sigma/a values")->delimiter(',');

  auto* fid = app.add_subcommand("fidelity-curve", "mean fidelity vs mean loss");
  add_common(fid, common);
  add_state(fid, state);
  add_curve(fid, curve);
  fid->add_option("--models", curve.models, "fixed, beam-wandering, elliptic")->delimiter(',');
  fid->add_option("--losses", curve.losses, "target mean losses in dB")->delimiter(',');

  auto* sweep = app.add_subcommand("sweep", "ordering check across input parameters");
  add_common(sweep, common);
  add_state(sweep, state);
  add_curve(sweep, curve);
  sweep->add_option("--r-range", r_range, "lo:hi:count within [0.5, 3]");
  sweep->add_option("--alpha-sq-range", alpha_sq_range, "lo:hi:count within [0.1, 25]");
  sweep->add_option("--phi-range", phi_range, "lo:hi:count within [0, pi]");

  auto* cal = app.add_subcommand("calibrate-elliptic", "width broadening for a target loss");
  add_common(cal, common);
  cal->add_option("--target-db", target_db, "single-arm mean loss")->capture_default_str();
  cal->add_option("--sigma", target_sigma, "sigma/a of the calibration point")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  for (const char* flag : {"--models", "--model"}) {
    if (const auto* opt = sub->get_option_no_throw(flag); opt != nullptr && opt->count() > 0) {
      curve.models_given = true;
    }
  }

  RunConfig cfg;
  std::optional<Manifest> manifest;
  try {
    const bool has_state = name != "channel-pdf" && name != "calibrate-elliptic";
    const bool has_curve = name == "fidelity-curve" || name == "sweep" || name == "channel-pdf";
    cfg = load_config(common, has_state ? &state : nullptr, has_curve ? &curve : nullptr);
    if (loss_db) cfg.loss_db = *loss_db;
    if (grid_points) cfg.grid_points = *grid_points;
    if (half_width) cfg.grid_half_width = *half_width;
    if (!sigmas.empty()) cfg.sigmas_over_a = sigmas;
    if (name == "channel-pdf" && !curve.models_given) cfg.models = {"beam-wandering", "elliptic"};
    if (!r_range.empty()) cfg.sweep.r = commands::parse_range(r_range);
    if (!alpha_sq_range.empty()) cfg.sweep.alpha_sq = commands::parse_range(alpha_sq_range);
    if (!phi_range.empty()) cfg.sweep.phi = commands::parse_range(phi_range, true);

    if (name == "wigner") commands::validate_wigner(cfg);
    if (name == "channel-pdf") commands::validate_channel_pdf(cfg);
    if (name == "fidelity-curve") commands::validate_fidelity_curve(cfg);
    if (name == "sweep") commands::validate_sweep(cfg);
    if (name == "calibrate-elliptic" && !(target_sigma > 0.0 && target_db > 0.0)) {
      throw UsageError("calibrate-elliptic: --sigma and --target-db must be positive");
    }

    const fs::path out = common.out_dir;
    manifest.emplace(name, cfg, out, argc, argv);
    std::vector<fs::path> files;
    json summary;
    if (name == "wigner") summary = run_wigner(cfg, out, files);
    if (name == "channel-pdf") summary = run_channel_pdf(cfg, out, files);
    if (name == "fidelity-curve") summary = run_fidelity_curve(cfg, out, files);
    if (name == "sweep") summary = run_sweep(cfg, out, files);
    if (name == "calibrate-elliptic") {
      const double kappa = calibrate_width_broadening(
          cfg.geometry, cfg.elliptic.var_log_sq_width, cfg.elliptic.corr, target_sigma, target_db,
          cfg.samples, cfg.seed, cfg.workers);
      std::printf("width_broadening = %.6f\n", kappa);
      summary = {{"width_broadening", kappa}, {"target_db", target_db}, {"sigma_over_a", target_sigma}};
    }
    manifest->finish(files, summary);
    return kExitOk;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    if (manifest) manifest->fail(e.what());
    return kExitUsage;
  } catch (const TruncationError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    if (manifest) manifest->fail(e.what());
    return kExitNumeric;
  } catch (const std::range_error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    if (manifest) manifest->fail(e.what());
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    if (manifest) manifest->fail(e.what());
    return kExitFailure;
  }
}
