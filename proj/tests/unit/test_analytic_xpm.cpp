#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace nlilab;

namespace {

XpmModelParams base() {
  return XpmModelParams::from_span(SpanConfig{}, 1e-3, 32.0, 37.5, 1e-3);
}

// Cross-channel term of the GN reference formula for a CuT at f = 0 and one
// rectangular pump, integrated numerically with the full single-span kernel.
double gn_xci_quadrature(const XpmModelParams& p, int n = 1600) {
  const double b = p.pump_symbol_rate_ghz * 1e-3, df = p.spacing_ghz * 1e-3;  // THz
  const double a = p.alpha_lin_per_km, len = p.length_km;
  const double beta2 = p.beta2_ps2_km;
  const double h1 = b / n, h2 = b / n;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double f1 = df - b / 2 + (i + 0.5) * h1;
    for (int j = 0; j < n; ++j) {
      const double f2 = -b / 2 + (j + 0.5) * h2;
      const double f3 = f1 + f2;
      if (std::abs(f3 - df) > b / 2) continue;
      const double phi = 4.0 * std::numbers::pi * std::numbers::pi * beta2 * f1 * f2;
      const std::complex<double> num = 1.0 - std::exp(std::complex<double>(-a * len, phi * len));
      const std::complex<double> den(a, -phi);
      acc += std::norm(num / den);
    }
  }
  const double integral = acc * h1 * h2;
  const double g_pump = p.pump_power_w / b;
  // two mirror regions (pump on f1 or on f2), normalized by the CuT PSD
  return (16.0 / 27.0) * p.gamma_per_w_km * p.gamma_per_w_km * 2.0 * g_pump * g_pump * integral;
}

}  // namespace

TEST(AnalyticXpm, QuadraticInPumpPower) {
  auto p = base();
  const double q = xpm_inverse_snr_per_span(p);
  p.pump_power_w /= 2.0;
  EXPECT_NEAR(xpm_inverse_snr_per_span(p) / q, 0.25, 1e-12);
  p.cut_power_w *= 7.0;  // independent of the probe power
  EXPECT_NEAR(xpm_inverse_snr_per_span(p) / q, 0.25, 1e-12);
}

TEST(AnalyticXpm, ZeroNonlinearity) {
  auto p = base();
  p.gamma_per_w_km = 0.0;
  EXPECT_EQ(xpm_inverse_snr_per_span(p), 0.0);
}

TEST(AnalyticXpm, DomainErrors) {
  auto p = base();
  p.spacing_ghz = 16.0;
  EXPECT_THROW(xpm_inverse_snr_per_span(p), DomainError);
  p = base();
  p.alpha_lin_per_km = 0.0;
  EXPECT_THROW(xpm_inverse_snr_per_span(p), DomainError);
  p = base();
  p.pump_power_w = -1.0;
  EXPECT_THROW(xpm_inverse_snr_per_span(p), DomainError);
  EXPECT_THROW(xpm_incoherent_ledger(base(), 0), DomainError);
}

TEST(AnalyticXpm, IncoherentLedger) {
  const auto l = xpm_incoherent_ledger(base(), 10);
  ASSERT_EQ(l.n_spans(), 10u);
  EXPECT_NEAR(l.q(10), 10.0 * l.q(1), 1e-18);
  for (double d : increments(l)) EXPECT_NEAR(d, l.q(1), 1e-18);
}

TEST(AnalyticXpm, Monotonicity) {
  const double q = xpm_inverse_snr_per_span(base());
  auto p = base();
  p.spacing_ghz = 75.0;
  EXPECT_LT(xpm_inverse_snr_per_span(p), q);
  p = base();
  p.gamma_per_w_km = 1.5;
  EXPECT_GT(xpm_inverse_snr_per_span(p), q);
  p = base();
  p.pump_power_w = 2e-3;
  EXPECT_GT(xpm_inverse_snr_per_span(p), q);
  p = base();
  p.beta2_ps2_km = -10.0;
  EXPECT_GT(xpm_inverse_snr_per_span(p), q);
}

TEST(AnalyticXpm, FrozenValue) {
  // 0 dBm pump, 32 GBaud at 37.5 GHz over one standard 80 km span.
  EXPECT_NEAR(units::linear_to_db(xpm_inverse_snr_per_span(base())), -38.82, 0.01);
}

TEST(AnalyticXpm, AgreesWithNumericalGnIntegral) {
  for (auto [rs, df] : {std::pair{32.0, 37.5}, std::pair{64.0, 75.0}, std::pair{32.0, 75.0}}) {
    const auto p = XpmModelParams::from_span(SpanConfig{}, 1e-3, rs, df, 1e-3);
    const double closed = xpm_inverse_snr_per_span(p);
    const double numeric = gn_xci_quadrature(p);
    EXPECT_NEAR(units::linear_to_db(closed / numeric), 0.0, 0.5) << rs << " " << df;
  }
}
