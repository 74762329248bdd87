// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
// Runtime is dominated by the 27-tuple parameter sweep (criterion 9).

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "catlink/catlink.hpp"
#include "catlink/commands.hpp"

namespace {

using namespace catlink;
namespace fs = std::filesystem;
constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [X]");
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const CatState kCat({0.0, 1.5}, kPi);

double origin_value(double loss_db, double eta_sq, const GridSpec& spec, double* grid_value) {
  const double t = symmetric_transmissivity_for_loss(loss_db);
  const double eta = eta_from_intensity(eta_sq);
  const double v = effective_variance(teleport_variance({1.15, 1.0, t, t, eta}), eta);
  const auto out = teleport_grid(WignerGrid::sample(spec, cat_mixture(kCat)), 1.0, v);
  *grid_value = out.at(spec.n_x / 2, spec.n_p / 2);
  return teleported_cat_analytic(kCat, 1.0, v, {0.0, 0.0});
}

Outcome negativity_thresholds() {
  Outcome o;
  const auto spec = GridSpec::for_cat(kCat, 512);
  struct Case {
    double loss;
    double eta_sq;
    bool negative;
  };
  for (const Case c : {Case{0, 1.0, true}, Case{0, 0.99, true}, Case{5, 1.0, true},
                       Case{5, 0.99, false}}) {
    double grid = 0.0;
    const double w = origin_value(c.loss, c.eta_sq, spec, &grid);
    const bool ok = (c.negative ? w < 0.0 && grid < 0.0 : w >= 0.0 && grid >= 0.0);
    o.require(ok, fmt("%.0f dB", c.loss) + fmt("/%.2f: W(0)=", c.eta_sq) + fmt("%.3e", w));
  }
  const double t5 = symmetric_transmissivity_for_loss(5.0);
  const double eta = eta_from_intensity(0.99);
  const double v = effective_variance(teleport_variance({1.15, 1.0, t5, t5, eta}), eta);
  o.require(v > 0.5, "V'(5 dB, 0.99)=" + fmt("%.6f", v));
  return o;
}

Outcome variance_formulas() {
  Outcome o;
  double worst_reduction = 0.0;
  for (double r : {0.0, 0.5, 1.15, 2.0, 3.0}) {
    worst_reduction = std::max(
        worst_reduction, std::abs(teleport_variance({r, 1.0, 1.0, 1.0, 1.0}) - std::exp(-2 * r)));
  }
  o.require(worst_reduction < 1e-12, "T=1,g=1 reduction err " + fmt("%.1e", worst_reduction));

  std::mt19937_64 rng(20190101);
  std::uniform_real_distribution<double> t(0.01, 1.0);
  std::uniform_real_distribution<double> rr(0.5, 3.0);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const double ta = t(rng);
    const double tb = t(rng);
    const double r = rr(rng);
    const double g = gain_for(GainMode::Balanced, ta, tb);
    const double c_plus = teleport_variance_terms(g, ta, tb).c_plus;
    worst = std::max(worst, c_plus * std::exp(2 * r));
  }
  o.require(worst < 1e-15, "balanced e^{2r} term max " + fmt("%.1e", worst));
  return o;
}

Outcome fidelity_cross_validation() {
  Outcome o;
  const auto spec = GridSpec::for_cat(kCat, 512);
  const auto in = WignerGrid::sample(spec, cat_mixture(kCat));
  double worst = 0.0;
  for (double t : {1.0, 0.8, 0.562, 0.3}) {
    for (double eta_sq : {1.0, 0.99}) {
      const double eta = eta_from_intensity(eta_sq);
      const double v = effective_variance(teleport_variance({1.15, 1.0, t, t, eta}), eta);
      const double numeric = fidelity_overlap(in, teleport_grid(in, 1.0, v));
      worst = std::max(worst, std::abs(closed_form_fidelity(v, kCat) - numeric));
    }
  }
  o.require(worst < 1e-4, "max |closed form - grid overlap| " + fmt("%.2e", worst));
  return o;
}

Outcome channel_calibration() {
  Outcome o;
  const RunConfig cfg;
  const auto bw = estimate_mean_loss(cfg.channel("beam-wandering", 0.7), 100000, cfg.seed);
  o.require(std::abs(bw.loss_db - 3.0) <= 0.15, "beam-wandering(0.7a) " + fmt("%.3f dB", bw.loss_db));
  const auto el = estimate_mean_loss(cfg.channel("elliptic", 0.4), 100000, cfg.seed);
  o.require(std::abs(el.loss_db - 3.0) <= 0.2, "elliptic(0.4a) " + fmt("%.3f dB", el.loss_db));
  return o;
}

Outcome pdf_agreement() {
  Outcome o;
  const BeamGeometry g;
  const auto law = BeamWanderingLaw::for_geometry(g);
  const std::size_t n = 1000000;
  for (double s : {0.2, 0.7, 1.5}) {
    const BeamWanderingChannel ch{g, s * g.aperture};
    std::vector<double> t(n);
    parallel_for(n, 0, [&](std::size_t i) {
      auto rng = RandomStream::for_sample(20190101, 0, i);
      t[i] = std::sqrt(sample_transmissivity(ch, rng));
    });
    std::sort(t.begin(), t.end());
    double sup = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double f = law.coefficient_cdf(t[i], s);
      sup = std::max({sup, std::abs(f - static_cast<double>(i) / static_cast<double>(n)),
                      std::abs(f - static_cast<double>(i + 1) / static_cast<double>(n))});
    }
    o.require(sup < 0.005, fmt("sigma=%.1fa", s) + fmt(" sup %.2e", sup));
  }
  return o;
}

Outcome ordering() {
  Outcome o;
  const RunConfig cfg;
  for (const auto& c : commands::ordering_at_losses(cfg, commands::kOrderingLosses)) {
    std::string line = fmt("%.0f dB: ", c.loss_db) + fmt("fixed %.4f ", c.fixed) +
                       fmt("bw %.4f", c.beam_wandering) + fmt("(%.4f) ", c.bw_stderr) +
                       fmt("el %.4f", c.elliptic) + fmt("(%.4f)", c.el_stderr);
    if (!c.bw_above_fixed()) line += " bw<=fixed";
    if (!c.elliptic_above_bw()) line += " el<=bw";
    o.require(c.holds(), line);
  }
  return o;
}

Outcome reductions() {
  Outcome o;
  const BeamGeometry g;
  double worst_circ = 0.0;
  for (double d = 0.0; d <= 3.0; d += 0.01) {
    for (double dir : {0.0, 0.9, 2.3}) {
      const EllipticSample s{d * std::cos(dir), d * std::sin(dir), g.width, g.width, 0.3};
      worst_circ = std::max(worst_circ, std::abs(elliptic_transmissivity(s, g.aperture) -
                                                 bw_transmissivity(d, g)));
    }
  }
  o.require(worst_circ < 1e-3, "elliptic W1=W2 vs circular " + fmt("%.1e", worst_circ));

  std::mt19937_64 rng(7);
  std::normal_distribution<double> z(0.0, 1.0);
  double worst_tmsv = 0.0;
  for (int k = 0; k < 200; ++k) {
    const TmsvState st(0.5 + 0.01 * k);
    const PhasePoint a{z(rng), z(rng)};
    const PhasePoint b{z(rng), z(rng)};
    worst_tmsv =
        std::max(worst_tmsv, std::abs(attenuated_tmsv_wigner(st, 1.0, 1.0, a, b) - tmsv_wigner(st, a, b)));
  }
  o.require(worst_tmsv < 1e-12, "attenuated TMSV at T=1 " + fmt("%.1e", worst_tmsv));

  const RunConfig cfg;
  auto fixed = cfg.experiment("fixed");
  fixed.sweep = {{SweepPoint::Kind::Transmissivity, BeamWanderingLaw::for_geometry(g).max_transmissivity}};
  auto fading = cfg.experiment("beam-wandering");
  fading.sweep = {{SweepPoint::Kind::SigmaOverAperture, 0.0}};
  fading.n_samples = 10000;
  const double ff = run_fixed_curve(fixed).points.at(0).mean_fidelity;
  double worst_fading = 0.0;
  for (auto m : {FidelityMethod::Exact, FidelityMethod::Binned}) {
    fading.method = m;
    worst_fading = std::max(worst_fading,
                            std::abs(run_fading_curve(fading).points.at(0).mean_fidelity - ff));
  }
  o.require(worst_fading < 1e-4, "fading(sigma=0) vs fixed(T0) " + fmt("%.1e", worst_fading));
  return o;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CATLINK_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  Outcome o;
  const fs::path base = fs::temp_directory_path() / "catlink_acceptance_determinism";
  fs::remove_all(base);
  const std::string args = "fidelity-curve --samples 20000 --seed 424242 --out-dir ";
  const int a = run_cli(args + (base / "w1").string() + " --workers 1");
  const int b = run_cli(args + (base / "w4").string() + " --workers 4");
  o.require(a == 0 && b == 0, "both runs exit 0");
  std::size_t compared = 0;
  bool identical = true;
  for (const auto& e : fs::directory_iterator(base / "w1")) {
    if (e.path().extension() != ".csv") continue;
    ++compared;
    identical = identical && slurp(e.path()) == slurp(base / "w4" / e.path().filename());
  }
  o.require(identical && compared >= 4,
            std::to_string(compared) + " CSVs byte-identical across --workers 1/4");
  fs::remove_all(base);
  return o;
}

Outcome parameter_sweep() {
  Outcome o;
  RunConfig cfg;
  const fs::path dir = fs::temp_directory_path() / "catlink_acceptance_sweep";
  fs::remove_all(dir);
  // Ordering is required below 30 dB.
  const auto s = commands::cmd_sweep(cfg, dir, {5.0, 10.0, 20.0});
  std::size_t bad_tuples = 0;
  std::size_t bw_fixed = 0;
  std::size_t el_bw = 0;
  for (const auto& t : s.tuples) {
    if (t.violations() > 0) ++bad_tuples;
    for (const auto& c : t.checks) {
      bw_fixed += c.bw_above_fixed() ? 0 : 1;
      el_bw += c.elliptic_above_bw() ? 0 : 1;
    }
  }
  o.require(s.violations == 0, std::to_string(s.tuples.size()) + " tuples, " +
                                   std::to_string(s.violations) + " violations in " +
                                   std::to_string(bad_tuples) + " tuples (bw<=fixed " +
                                   std::to_string(bw_fixed) + ", el<=bw " + std::to_string(el_bw) +
                                   ")");
  fs::remove_all(dir);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria = {
      {1, "negativity thresholds", negativity_thresholds},
      {2, "variance formulas", variance_formulas},
      {3, "fidelity cross-validation", fidelity_cross_validation},
      {4, "channel calibration", channel_calibration},
      {5, "pdf agreement", pdf_agreement},
      {6, "fading ordering", ordering},
      {7, "reduction identities", reductions},
      {8, "determinism", determinism},
      {9, "parameter-robustness sweep", parameter_sweep},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d (%s): %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
