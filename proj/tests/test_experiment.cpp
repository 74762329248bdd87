#include <cmath>
#include <numbers>
#include <stdexcept>

#include <gtest/gtest.h>

#include "catlink/experiment.hpp"
#include "catlink/run_config.hpp"

namespace {

using namespace catlink;
constexpr double kPi = std::numbers::pi;

ExperimentConfig fixed_config() {
  ExperimentConfig c;
  c.channel = FixedChannel{1.0};
  c.gain_mode = GainMode::Unity;
  return c;
}

ExperimentConfig fading_config(const ChannelModel& ch, std::size_t n = 20000) {
  ExperimentConfig c;
  c.channel = ch;
  c.n_samples = n;
  c.method = FidelityMethod::Exact;
  return c;
}

TEST(MeanLoss, FixedChannel) {
  const auto est = estimate_mean_loss(FixedChannel{0.5}, 10000, 1);
  EXPECT_NEAR(est.loss_db, 10.0 * std::log10(2.0), 1e-12);
  EXPECT_EQ(est.stderr_db, 0.0);
  EXPECT_THROW(estimate_mean_loss(FixedChannel{0.5}, 100, 1), std::invalid_argument);
}

TEST(MeanLoss, BeamWanderingCalibrationPoint) {
  const auto est = estimate_mean_loss(BeamWanderingChannel{BeamGeometry{}, 0.7}, 100000, 20190101);
  EXPECT_NEAR(est.loss_db, 3.0, 0.15);
  EXPECT_GT(est.stderr_db, 0.0);
  EXPECT_LT(est.stderr_db, 0.05);
}

TEST(MeanLoss, EllipticDefaultCalibration) {
  const RunConfig cfg;
  const auto est = estimate_mean_loss(cfg.channel("elliptic", 0.4), 100000, 20190101);
  EXPECT_NEAR(est.loss_db, 3.0, 0.2);
}

TEST(MeanLoss, NoWanderIsTheCutoff) {
  const BeamGeometry g;
  const ChannelModel bw = BeamWanderingChannel{g, 0.0};
  EXPECT_NEAR(estimate_mean_loss(bw, 10000, 1).loss_db, -10.0 * std::log10(1.0 - std::exp(-2.0)),
              1e-12);
  EXPECT_NEAR(cutoff_loss_db(with_sigma(bw, 0.5), ArmMode::Both, 10000, 1),
              -20.0 * std::log10(1.0 - std::exp(-2.0)), 1e-12);
  EXPECT_NEAR(cutoff_loss_db(bw, ArmMode::AliceOnly, 10000, 1),
              -10.0 * std::log10(1.0 - std::exp(-2.0)), 1e-12);
}

TEST(MeanLoss, InversionHitsTarget) {
  const ChannelModel bw = BeamWanderingChannel{BeamGeometry{}, 0.0};
  for (double target : {2.0, 10.0, 30.0}) {
    const double sigma = sigma_for_mean_loss(bw, ArmMode::Both, target, 20000, 4);
    EXPECT_NEAR(sampled_mean_loss(with_sigma(bw, sigma), ArmMode::Both, 20000, 4), target, 1e-8);
  }
  EXPECT_THROW(sigma_for_mean_loss(bw, ArmMode::Both, 1.0, 20000, 4), std::domain_error);
  EXPECT_THROW(sigma_for_mean_loss(FixedChannel{0.5}, ArmMode::Both, 5.0, 20000, 4),
               std::invalid_argument);
}

TEST(FixedCurve, LosslessPerfectDetectorMatchesClosedForm) {
  auto c = fixed_config();
  c.eta_sq = 1.0;
  c.sweep = {{SweepPoint::Kind::Transmissivity, 1.0}};
  const auto res = run_fixed_curve(c);
  ASSERT_EQ(res.points.size(), 1u);
  EXPECT_NEAR(res.points[0].mean_fidelity, closed_form_fidelity(std::exp(-2.3), c.cat), 1e-15);
  EXPECT_LT(*res.points[0].origin_value, 0.0);
}

TEST(FixedCurve, ZeroLossWithDetectorLoss) {
  auto c = fixed_config();
  c.sweep = {{SweepPoint::Kind::TargetLossDb, 0.0}};
  const auto p = run_fixed_curve(c).points.at(0);
  EXPECT_NEAR(p.mean_fidelity, closed_form_fidelity(std::exp(-2.3) + 0.01 / 0.99, c.cat), 1e-15);
  EXPECT_EQ(p.mean_loss_db, 0.0);
}

TEST(FixedCurve, NegativityThresholds) {
  auto c = fixed_config();
  c.sweep = {{SweepPoint::Kind::TargetLossDb, 0.0}, {SweepPoint::Kind::TargetLossDb, 5.0}};
  c.eta_sq = 1.0;
  auto ideal = run_fixed_curve(c);
  c.eta_sq = 0.99;
  auto real = run_fixed_curve(c);
  EXPECT_LT(*ideal.points[0].origin_value, 0.0);
  EXPECT_LT(*ideal.points[1].origin_value, 0.0);
  EXPECT_LT(*real.points[0].origin_value, 0.0);
  EXPECT_GE(*real.points[1].origin_value, 0.0);
  EXPECT_NEAR(real.points[1].mean_loss_db, 5.0, 1e-12);
}

TEST(FixedCurve, RejectsMisconfiguration) {
  auto c = fixed_config();
  EXPECT_THROW(run_fixed_curve(c), std::invalid_argument);  // empty sweep
  c.sweep = {{SweepPoint::Kind::TargetLossDb, 3.0}};
  c.gain_mode = GainMode::Balanced;
  EXPECT_THROW(run_fixed_curve(c), std::invalid_argument);
  c.gain_mode = GainMode::Unity;
  c.channel = BeamWanderingChannel{};
  EXPECT_THROW(run_fixed_curve(c), std::invalid_argument);
}

TEST(FadingCurve, NoWanderMatchesFixedAtCutoff) {
  const BeamGeometry g;
  const double t0 = 1.0 - std::exp(-2.0);
  auto fixed = fixed_config();
  fixed.sweep = {{SweepPoint::Kind::Transmissivity, t0}};
  const double f_fixed = run_fixed_curve(fixed).points.at(0).mean_fidelity;

  for (auto method : {FidelityMethod::Exact, FidelityMethod::Binned, FidelityMethod::ClosedForm}) {
    auto c = fading_config(BeamWanderingChannel{g, 0.0}, 1);
    c.method = method;
    c.sweep = {{SweepPoint::Kind::SigmaOverAperture, 0.0}};
    const auto p = run_fading_curve(c).points.at(0);
    EXPECT_NEAR(p.mean_fidelity, f_fixed, 1e-4) << to_string(method);
    EXPECT_NEAR(p.mean_t(), t0, 1e-15);
  }
}

TEST(FadingCurve, BinnedAgreesWithExact) {
  auto c = fading_config(BeamWanderingChannel{BeamGeometry{}, 0.0}, 20000);
  c.sweep = {{SweepPoint::Kind::TargetLossDb, 10.0}};
  const auto exact = run_fading_curve(c).points.at(0);
  c.method = FidelityMethod::Binned;
  const auto binned = run_fading_curve(c).points.at(0);
  EXPECT_NEAR(binned.mean_fidelity, exact.mean_fidelity, 2e-3);
  EXPECT_GT(binned.occupied_bins, 10u);
  EXPECT_NEAR(binned.mean_loss_db, 10.0, 1e-8);
}

TEST(FadingCurve, ResultsIndependentOfWorkerCount) {
  auto c = fading_config(EllipticChannel{BeamGeometry{}, 0.0, WidthStats::centred_on({}, 0.1, 0.5)},
                         20000);
  c.sweep = {{SweepPoint::Kind::SigmaOverAperture, 0.5}, {SweepPoint::Kind::TargetLossDb, 12.0}};
  c.method = FidelityMethod::Binned;
  c.workers = 1;
  const auto one = run_fading_curve(c);
  c.workers = 3;
  const auto three = run_fading_curve(c);
  for (std::size_t k = 0; k < one.points.size(); ++k) {
    EXPECT_EQ(one.points[k].mean_fidelity, three.points[k].mean_fidelity);
    EXPECT_EQ(one.points[k].fidelity_stderr, three.points[k].fidelity_stderr);
    EXPECT_EQ(one.points[k].mean_loss_db, three.points[k].mean_loss_db);
  }
}

TEST(FadingCurve, SingleArmModes) {
  auto c = fading_config(BeamWanderingChannel{BeamGeometry{}, 0.0}, 10000);
  c.arms = ArmMode::AliceOnly;
  c.sweep = {{SweepPoint::Kind::SigmaOverAperture, 0.7}};
  const auto p = run_fading_curve(c).points.at(0);
  EXPECT_EQ(p.mean_t_b, 1.0);
  EXPECT_LT(p.mean_t_a, 0.9);
  c.arms = ArmMode::BobOnly;
  const auto q = run_fading_curve(c).points.at(0);
  EXPECT_EQ(q.mean_t_a, 1.0);
  EXPECT_NEAR(q.mean_t_b, p.mean_t_a, 0.02);
}

TEST(FadingCurve, StatisticsAreWellFormed) {
  auto c = fading_config(BeamWanderingChannel{BeamGeometry{}, 0.0}, 10000);
  c.sweep = {{SweepPoint::Kind::SigmaOverAperture, 0.2}, {SweepPoint::Kind::SigmaOverAperture, 2.0}};
  for (const auto& p : run_fading_curve(c).points) {
    EXPECT_GE(p.fidelity_stderr, 0.0);
    EXPECT_GE(p.mean_fidelity, 0.0);
    EXPECT_LE(p.mean_fidelity, 1.0);
    EXPECT_EQ(p.accepted + p.rejected, 10000u);
    EXPECT_FALSE(p.origin_value.has_value());
  }
}

TEST(FadingCurve, RejectsFixedChannel) {
  auto c = fading_config(FixedChannel{0.5}, 10);
  c.sweep = {{SweepPoint::Kind::SigmaOverAperture, 0.2}};
  EXPECT_THROW(run_fading_curve(c), std::invalid_argument);
}

TEST(Calibration, WidthBroadeningReproducesDefault) {
  const RunConfig cfg;
  const double kappa = calibrate_width_broadening(cfg.geometry, cfg.elliptic.var_log_sq_width,
                                                  cfg.elliptic.corr, 0.4, 3.0, 100000, 20190101);
  EXPECT_NEAR(kappa, cfg.elliptic.width_broadening, 1e-5);
}

TEST(Modes, StringRoundTrip) {
  for (auto m : {ArmMode::Both, ArmMode::AliceOnly, ArmMode::BobOnly}) {
    EXPECT_EQ(arm_mode_from_string(to_string(m)), m);
  }
  for (auto m : {FidelityMethod::Exact, FidelityMethod::Binned, FidelityMethod::ClosedForm}) {
    EXPECT_EQ(fidelity_method_from_string(to_string(m)), m);
  }
  EXPECT_THROW(arm_mode_from_string("neither"), std::invalid_argument);
}

}  // namespace
