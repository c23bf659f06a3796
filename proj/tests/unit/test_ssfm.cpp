#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace nlilab;
using namespace nlilab::testing;

namespace {

SpanConfig lossless(double gamma = 0.0, double d = 16.7, double len = 80.0) {
  return SpanConfig{len, 0.0, d, gamma, LogDistributedSteps{200}};
}

double rms_width_ps(const SampledField& f) {
  double m0 = 0, m1 = 0, m2 = 0;
  const double dt = 1e3 / f.sample_rate_ghz;
  const auto n = f.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double t = (double(i) - double(n / 2)) * dt;
    const double p = std::norm(f.x[i]) + std::norm(f.y[i]);
    m0 += p;
    m1 += p * t;
    m2 += p * t * t;
  }
  const double mean = m1 / m0;
  return std::sqrt(m2 / m0 - mean * mean);
}

}  // namespace

TEST(Units, Beta2FromDispersion) {
  // independent: -D λ² / (2π c) with D in ps/(nm km), λ in nm, c in nm/ps
  const double expected = -16.7 * 1550.0 * 1550.0 / (2.0 * std::numbers::pi * 299792.458);
  EXPECT_NEAR(units::dispersion_to_beta2(16.7), expected, 1e-12);
  EXPECT_NEAR(units::dispersion_to_beta2(16.7), -21.30, 0.01 * 21.30);
  EXPECT_NEAR(units::beta2_to_dispersion(units::dispersion_to_beta2(16.7)), 16.7, 1e-12);
}

TEST(Units, EffectiveLength) {
  EXPECT_DOUBLE_EQ(effective_length(0.0, 80.0), 80.0);
  EXPECT_NEAR(effective_length(0.2, 80.0), 21.169, 1e-3);
  EXPECT_NEAR(effective_length(0.2, 1e6), 10.0 / (0.2 * std::log(10.0)), 1e-9);
}

TEST(StepPolicy, LogDistributedHaveEqualEffectiveLength) {
  SpanConfig s{80.0, 0.2, 16.7, 1.27, LogDistributedSteps{50}};
  const auto z = step_boundaries(s);
  ASSERT_EQ(z.size(), 51u);
  EXPECT_EQ(z.front(), 0.0);
  EXPECT_DOUBLE_EQ(z.back(), 80.0);
  const double a = s.alpha_linear();
  const double want = effective_length(0.2, 80.0) / 50.0;
  for (std::size_t i = 0; i + 1 < z.size(); ++i) {
    const double leff = (std::exp(-a * z[i]) - std::exp(-a * z[i + 1])) / a;
    EXPECT_NEAR(leff, want, 1e-10);
  }
}

TEST(StepPolicy, FixedStepsCoverSpan) {
  SpanConfig s{10.0, 0.2, 16.7, 1.27, FixedStep{0.3}};
  const auto z = step_boundaries(s);
  EXPECT_EQ(z.size(), 35u);
  EXPECT_DOUBLE_EQ(z.back(), 10.0);
  for (std::size_t i = 0; i + 2 < z.size(); ++i) EXPECT_NEAR(z[i + 1] - z[i], 0.3, 1e-12);
}

TEST(LinearStep, ContinuousWaveUnchangedWithoutLoss) {
  auto f = constant_field(1024, 256.0, {0.03, 0.01}, {0.0, -0.02});
  const auto ref = f;
  linear_step(f, -21.3, 0.0, 80.0);
  EXPECT_LT(relative_l2(f, ref), 1e-12);
  EXPECT_NEAR(f.accumulated_dispersion_ps_nm, units::beta2_to_dispersion(-21.3) * 80.0, 1e-9);
}

TEST(LinearStep, LossOf16dB) {
  auto f = constant_field(256, 256.0, {0.03, 0.0}, {0.0, 0.0});
  const double p0 = f.power_w();
  linear_step(f, -21.3, 0.2, 80.0);
  EXPECT_NEAR(db_ratio(p0, f.power_w()), 16.0, 1e-9);
}

TEST(LinearStep, GaussianPulseBroadeningLaw) {
  const double t0 = 20.0;  // ps, 1/e half-width of the intensity ~ t0
  const std::size_t n = 1 << 14;
  const double fs = 512.0;
  SampledField f;
  f.sample_rate_ghz = fs;
  f.x.resize(n);
  f.y.assign(n, cplx{});
  const double dt = 1e3 / fs;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = (double(i) - double(n / 2)) * dt;
    f.x[i] = std::exp(-t * t / (2.0 * t0 * t0));
  }
  const double w0 = rms_width_ps(f);
  const double beta2 = units::dispersion_to_beta2(16.7);
  const double z = 40.0;
  linear_step(f, beta2, 0.0, z);
  const double expected = std::sqrt(1.0 + std::pow(beta2 * z / (t0 * t0), 2));
  EXPECT_NEAR(rms_width_ps(f) / w0 / expected, 1.0, 1e-6);
}

TEST(NonlinearStep, IdentityWithoutNonlinearity) {
  auto f = single_channel(1024, 8, ChannelSpec{});
  const auto ref = f;
  nonlinear_step(f, 0.0, 10.0);
  EXPECT_EQ(f.x, ref.x);
}

TEST(NonlinearStep, ContinuousWavePhaseAndModulus) {
  const cplx ax{0.02, 0.01}, ay{-0.01, 0.015};
  auto f = constant_field(64, 256.0, ax, ay);
  const double p = std::norm(ax) + std::norm(ay);
  nonlinear_step(f, 1.27, 0.5);
  const double phi = (8.0 / 9.0) * 1.27 * p * 0.5;
  EXPECT_NEAR(std::arg(f.x[3] / ax), phi, 1e-15);
  EXPECT_NEAR(std::arg(f.y[3] / ay), phi, 1e-15);
  EXPECT_NEAR(std::abs(f.x[3]), std::abs(ax), 1e-17);

  auto g = single_channel(1024, 8, ChannelSpec{.power_dbm = 10.0});
  const auto ref = g;
  nonlinear_step(g, 1.27, 2.0);
  for (std::size_t i = 0; i < g.size(); ++i)
    EXPECT_NEAR(std::abs(g.x[i]), std::abs(ref.x[i]), 1e-15);
}

TEST(Span, LinearSpanEqualsSingleLinearStep) {
  auto f = single_channel(1024, 8, ChannelSpec{});
  SpanConfig s{80.0, 0.2, 16.7, 0.0, LogDistributedSteps{200}};
  auto ref = f;
  linear_step(ref, s.beta2_ps2_km(), s.attenuation_db_km, s.length_km);
  const auto out = propagate_span(f, s);
  EXPECT_LT(relative_l2(out, ref), 1e-12);
  EXPECT_NEAR(out.accumulated_dispersion_ps_nm, 16.7 * 80.0, 1e-9);
}

TEST(Span, ContinuousWaveNonlinearPhaseUsesEffectiveLength) {
  const cplx a{0.04, 0.0};
  auto f = constant_field(64, 256.0, a, {0.0, 0.0});
  SpanConfig s{80.0, 0.2, 0.0, 1.27, LogDistributedSteps{7}};
  const auto out = propagate_span(f, s);
  const double phi = (8.0 / 9.0) * 1.27 * std::norm(a) * effective_length(0.2, 80.0);
  EXPECT_NEAR(std::arg(out.x[5] / a) / phi, 1.0, 1e-6);
  EXPECT_NEAR(db_ratio(f.power_w(), out.power_w()), 16.0, 1e-9);
}

TEST(Span, LosslessEnergyConservation) {
  std::vector<SampledField> fields;
  for (int k : {0, -1, 1}) {
    ChannelSpec c;
    c.index = k;
    c.center_offset_ghz = 50.0 * k;
    c.power_dbm = 6.0;
    c.seed = 7 + k;
    c.modulation = k ? Modulation::Gaussian : Modulation::PmQpsk;
    fields.push_back(single_channel(1024, 8, c));
  }
  const auto f = multiplex(fields);
  const auto out = propagate_span(f, lossless(1.27));
  EXPECT_NEAR(out.energy() / f.energy(), 1.0, 1e-10);
}

TEST(Span, LinearSplitOrderInvariance) {
  const auto f = single_channel(1024, 8, ChannelSpec{});
  auto half = SpanConfig{40.0, 0.2, 16.7, 0.0, LogDistributedSteps{3}};
  const auto two = propagate_span(propagate_span(f, half), half);
  const auto one = propagate_span(f, SpanConfig{80.0, 0.2, 16.7, 0.0, FixedStep{1.0}});
  EXPECT_LT(relative_l2(two, one), 1e-12);
}

TEST(Span, FourWaveMixingSidebandScalesAsCube) {
  // Two CW tones at ±Δ; the idler at +3Δ grows as P³ at low power.
  const std::size_t n = 4096;
  const double fs = 512.0;
  const double delta = 25.0;
  SpanConfig s{10.0, 0.2, 16.7, 1.27, LogDistributedSteps{100}};
  std::vector<double> x, y;
  for (double p_dbm : {-10.0, -7.0, -4.0, -1.0}) {
    const double amp = std::sqrt(units::dbm_to_watt(p_dbm));
    SampledField f;
    f.sample_rate_ghz = fs;
    f.x.resize(n);
    f.y.assign(n, cplx{});
    for (std::size_t i = 0; i < n; ++i) {
      const double t = double(i) / fs;
      f.x[i] = amp * (std::polar(1.0, 2 * std::numbers::pi * delta * t) +
                      std::polar(1.0, -2 * std::numbers::pi * delta * t));
    }
    const auto out = propagate_span(f, s);
    x.push_back(p_dbm);
    y.push_back(units::linear_to_db(band_power(out, 3 * delta - 0.1, 3 * delta + 0.1)));
  }
  const double slope = (y.back() - y.front()) / (x.back() - x.front());
  EXPECT_NEAR(slope, 3.0, 0.1);
}

TEST(Span, StrictModeDetectsUnderResolvedSteps) {
  ChannelSpec c;
  c.power_dbm = 12.0;
  DualPolSymbols sym;
  const auto f = single_channel(1024, 8, c, &sym);
  StrictCheck check{[&](const SampledField& g) { return measure_channel(g, c, sym).inverse_snr; }, 0.05};
  SpanConfig coarse{80.0, 0.2, 16.7, 1.27, LogDistributedSteps{2}};
  EXPECT_THROW(propagate_span(f, coarse, &check), NumericalError);
  c.power_dbm = 0.0;
  const auto g = single_channel(1024, 8, c, &sym);
  SpanConfig fine{80.0, 0.2, 16.7, 1.27, LogDistributedSteps{200}};
  EXPECT_NO_THROW(propagate_span(g, fine, &check));
}

TEST(Span, RejectsInvalidConfig) {
  const auto f = single_channel(1024, 8, ChannelSpec{});
  EXPECT_THROW(propagate_span(f, SpanConfig{-1.0}), ConfigError);
  EXPECT_THROW(propagate_span(f, SpanConfig{80.0, 0.2, 16.7, 1.27, FixedStep{0.0}}), ConfigError);
  EXPECT_THROW(propagate_span(f, SpanConfig{80.0, 0.2, 16.7, 1.27, LogDistributedSteps{0}}), ConfigError);
  auto bad = f;
  bad.x.resize(1000);
  bad.y.resize(1000);
  EXPECT_THROW(propagate_span(bad, SpanConfig{}), ConfigError);
}

TEST(Span, StepPoliciesConvergeOnMeasuredSnr) {
  for (auto [rs, sps] : {std::pair{32.0, 16}, std::pair{64.0, 8}}) {
    ChannelSpec c;
    c.symbol_rate_gbaud = rs;
    DualPolSymbols sym;
    const auto f = single_channel(2048, sps, c, &sym);
    auto q = [&](StepPolicy p) {
      return measure_channel(propagate_span(f, SpanConfig{80.0, 0.2, 16.7, 1.27, p}), c, sym).inverse_snr;
    };
    EXPECT_NEAR(db_ratio(q(FixedStep{0.1}), q(LogDistributedSteps{1000})), 0.0, 0.05) << rs;
  }
}
