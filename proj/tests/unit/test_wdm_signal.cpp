#include <gtest/gtest.h>

#include <thread>

#include "test_util.hpp"

using namespace nlilab;
using namespace nlilab::testing;

namespace {

ChannelSpec cut_spec(double rolloff = 0.1) {
  ChannelSpec c;
  c.symbol_rate_gbaud = 32.0;
  c.rolloff = rolloff;
  c.seed = 11;
  return c;
}

}  // namespace

TEST(Symbols, QpskHasUnitModulus) {
  const auto s = generate_symbols(Modulation::PmQpsk, 4096, 3);
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_NEAR(std::abs(s.x[i]), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(s.y[i]), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(s.x[i].real()), std::abs(s.x[i].imag()), 1e-15);
  }
}

TEST(Symbols, GaussianUnitMeanPower) {
  const auto s = generate_symbols(Modulation::Gaussian, 1 << 16, 7);
  for (const CVector* p : {&s.x, &s.y}) {
    double acc = 0.0;
    for (auto v : *p) acc += std::norm(v);
    const double m = acc / double(p->size());
    EXPECT_GE(m, 0.98);
    EXPECT_LE(m, 1.02);
  }
}

TEST(Symbols, DeterministicInSeed) {
  for (auto mod : {Modulation::PmQpsk, Modulation::Gaussian}) {
    const auto a = generate_symbols(mod, 2048, 99);
    const auto b = generate_symbols(mod, 2048, 99);
    const auto c = generate_symbols(mod, 2048, 100);
    EXPECT_EQ(a.x, b.x);
    EXPECT_EQ(a.y, b.y);
    EXPECT_NE(a.x, c.x);
  }
}

TEST(Symbols, IndependentOfThreadSchedule) {
  std::vector<DualPolSymbols> par(4);
  {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < par.size(); ++i)
      pool.emplace_back([&, i] { par[i] = generate_symbols(Modulation::Gaussian, 1024, 50 + i); });
  }
  for (std::size_t i = 0; i < par.size(); ++i)
    EXPECT_EQ(par[i].x, generate_symbols(Modulation::Gaussian, 1024, 50 + i).x);
}

TEST(Symbols, ModulationTags) {
  EXPECT_EQ(parse_modulation("PM-QPSK"), Modulation::PmQpsk);
  EXPECT_EQ(parse_modulation("Gaussian"), Modulation::Gaussian);
  EXPECT_THROW(parse_modulation("16QAM"), ConfigError);
  EXPECT_THROW(generate_symbols(Modulation::PmQpsk, 0, 1), ConfigError);
}

TEST(Shaping, PowerNormalizedWithin001dB) {
  for (double p_dbm : {-3.0, 0.0, 4.5}) {
    auto spec = cut_spec();
    spec.power_dbm = p_dbm;
    const auto f = single_channel(2048, 8, spec);
    EXPECT_NEAR(units::watt_to_dbm(f.power_w()), p_dbm, 0.01);
  }
}

TEST(Shaping, ZeroPredistortionIsPlainShaping) {
  const auto f = single_channel(1024, 8, cut_spec());
  EXPECT_EQ(f.accumulated_dispersion_ps_nm, 0.0);
  EXPECT_EQ(f.shaping_rolloff, 0.1);
  const auto g = single_channel(1024, 8, cut_spec());
  EXPECT_EQ(f.x, g.x);
}

TEST(Shaping, PredistortionIsUnitaryAndInvertedByLinearSpan) {
  auto spec = cut_spec();
  const auto plain = single_channel(2048, 8, spec);
  const double dl = 16.7 * 80.0;
  spec.predistortion_ps_nm = -dl;
  auto pre = single_channel(2048, 8, spec);
  EXPECT_EQ(pre.accumulated_dispersion_ps_nm, -dl);

  const auto ps_a = power_spectrum(plain);
  const auto ps_b = power_spectrum(pre);
  for (std::size_t j = 0; j < ps_a.size(); ++j) EXPECT_NEAR(ps_a[j], ps_b[j], 1e-12 * (1 + ps_a[j]) + 1e-18);

  linear_step(pre, units::dispersion_to_beta2(16.7), 0.0, 80.0);
  EXPECT_NEAR(pre.accumulated_dispersion_ps_nm, 0.0, 1e-9);
  EXPECT_LT(relative_l2(pre, plain), 1e-9);
}

TEST(Shaping, RrcMatchedPairHasNoIsi) {
  for (double beta : {0.05, 0.1, 0.2}) {
    DualPolSymbols sym;
    const auto f = single_channel(2048, 8, cut_spec(beta), &sym);
    const auto rx = matched_filter_and_sample(f, cut_spec(beta), true);
    const auto m = estimate_inverse_snr(rx, sym);
    EXPECT_LT(std::sqrt(m.inverse_snr), 1e-9) << "rolloff " << beta;
  }
}

TEST(Shaping, ParsevalHolds) {
  const auto f = single_channel(2048, 8, cut_spec());
  double sum = 0.0;
  for (double v : power_spectrum(f)) sum += v;
  EXPECT_NEAR(sum / f.power_w(), 1.0, 1e-12);
}

TEST(Shaping, RejectsBadGrids) {
  const auto sym = generate_symbols(Modulation::PmQpsk, 1024, 1);
  auto spec = cut_spec();
  // 300 GHz is not an integer multiple of 32 GBaud
  EXPECT_THROW(shape_and_modulate(sym, spec, 300.0, 1024 * 8), ConfigError);
  // sample count inconsistent with symbols x sps
  EXPECT_THROW(shape_and_modulate(sym, spec, 256.0, 1024 * 4), ConfigError);
  // channel outside the simulated band
  spec.center_offset_ghz = 125.0;
  EXPECT_THROW(shape_and_modulate(sym, spec, 256.0, 1024 * 8), ConfigError);
  // sps below 2(1+rolloff)
  EXPECT_THROW(shape_and_modulate(generate_symbols(Modulation::PmQpsk, 4096, 1), cut_spec(), 64.0, 4096 * 2),
               ConfigError);
  spec = cut_spec();
  spec.rolloff = 1.5;
  EXPECT_THROW(validate_channel(spec), ConfigError);
}

TEST(Multiplex, SingleFieldPassesThrough) {
  const auto f = single_channel(1024, 8, cut_spec());
  const auto m = multiplex({f});
  EXPECT_EQ(m.x, f.x);
  EXPECT_EQ(m.y, f.y);
}

TEST(Multiplex, DisjointChannelsAddPower) {
  auto a = cut_spec();
  auto b = cut_spec();
  b.index = 1;
  b.center_offset_ghz = 75.0;
  b.seed = 12;
  const auto fa = single_channel(2048, 16, a);
  const auto fb = single_channel(2048, 16, b);
  const auto m = multiplex({fa, fb});
  EXPECT_NEAR(db_ratio(m.power_w(), fa.power_w()), 3.0103, 0.01);
}

TEST(Multiplex, RejectsMismatchedGrids) {
  const auto a = single_channel(1024, 8, cut_spec());
  const auto b = single_channel(2048, 8, cut_spec());
  EXPECT_THROW(multiplex({a, b}), ConfigError);
  EXPECT_THROW(multiplex({}), ConfigError);
}

TEST(Multiplex, FiveChannelCombPeaksOnGrid) {
  std::vector<SampledField> fields;
  for (int k : {0, -2, -1, 1, 2}) {
    auto s = cut_spec();
    s.index = k;
    s.center_offset_ghz = 37.5 * k;
    s.seed = 100 + k;
    fields.push_back(single_channel(2048, 16, s));
  }
  const auto m = multiplex(fields);
  // The band power within each slot is one fifth of the total, the guard bands between them are empty.
  for (int k = -2; k <= 2; ++k) {
    const double p = band_power(m, 37.5 * k - 18.0, 37.5 * k + 18.0);
    EXPECT_NEAR(p / m.power_w(), 0.2, 1e-3) << k;
    const double centered = band_power(m, 37.5 * k - 15.0, 37.5 * k + 15.0);
    const double guard = band_power(m, 37.5 * k + 18.0, 37.5 * k + 19.5);
    EXPECT_LT(guard, 1e-20 * centered);
  }
}

TEST(Shaping, PowerNormalizationProperty) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> power(-10.0, 10.0), roll(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    auto spec = cut_spec(roll(rng));
    spec.power_dbm = power(rng);
    spec.seed = rng();
    spec.modulation = trial % 2 ? Modulation::Gaussian : Modulation::PmQpsk;
    spec.predistortion_ps_nm = 1000.0 * (power(rng));
    const auto f = single_channel(1024, 8, spec);
    EXPECT_NEAR(units::watt_to_dbm(f.power_w()), spec.power_dbm, 1e-9);
    double outside = band_power(f, spec.half_bandwidth_ghz() + 0.1, 1e9) +
                     band_power(f, -1e9, -spec.half_bandwidth_ghz() - 0.1);
    EXPECT_LT(outside / f.power_w(), 1e-20);
  }
}
