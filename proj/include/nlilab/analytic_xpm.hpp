#pragma once

#include "nlilab/ledger.hpp"
#include "nlilab/ssfm.hpp"

namespace nlilab {

/// Inputs of the closed-form incoherent cross-channel (XPM) reference.
struct XpmModelParams {
  double gamma_per_w_km = 1.27;
  double beta2_ps2_km = -21.3;
  double alpha_lin_per_km = 0.0;  // natural-unit power attenuation
  double length_km = 80.0;
  double pump_power_w = 1e-3;
  double pump_symbol_rate_ghz = 32.0;
  double spacing_ghz = 37.5;
  double cut_power_w = 1e-3;

  static XpmModelParams from_span(const SpanConfig& span, double pump_power_w,
                                  double pump_symbol_rate_ghz, double spacing_ghz,
                                  double cut_power_w) {
    return {span.gamma_per_w_km,  span.beta2_ps2_km(), span.alpha_linear(), span.length_km,
            pump_power_w,         pump_symbol_rate_ghz, std::abs(spacing_ghz), cut_power_w};
  }
};

/// Incoherent GN-model inverse SNR caused by one pump over one span:
///
///   q = (16/27) γ² Leff² P_k² ln((Δf + B/2)/(Δf − B/2)) / (2π |β2| Leff,a B²)
///
/// with Leff,a = 1/α. Independent of the probe power.
inline double xpm_inverse_snr_per_span(const XpmModelParams& p) {
  if (!(p.pump_symbol_rate_ghz > 0.0) || !(p.spacing_ghz > 0.0) || !(p.length_km > 0.0) ||
      !(p.pump_power_w >= 0.0) || !(p.gamma_per_w_km >= 0.0) || p.beta2_ps2_km == 0.0 ||
      !(p.alpha_lin_per_km > 0.0))
    throw DomainError("xpm_inverse_snr_per_span: parameters must be positive");
  const double half_b = p.pump_symbol_rate_ghz / 2.0;
  if (!(p.spacing_ghz > half_b))
    throw DomainError("xpm_inverse_snr_per_span: spacing must exceed half the pump bandwidth");

  const double leff = -std::expm1(-p.alpha_lin_per_km * p.length_km) / p.alpha_lin_per_km;
  const double leff_a = 1.0 / p.alpha_lin_per_km;
  const double b_thz = p.pump_symbol_rate_ghz * 1e-3;
  const double log_term = std::log((p.spacing_ghz + half_b) / (p.spacing_ghz - half_b));
  return (16.0 / 27.0) * p.gamma_per_w_km * p.gamma_per_w_km * leff * leff * p.pump_power_w *
         p.pump_power_w * log_term /
         (2.0 * units::kPi * std::abs(p.beta2_ps2_km) * leff_a * b_thz * b_thz);
}

/// Strictly incoherent accumulation: q_i = i x (single-span value).
inline AccumulationLedger xpm_incoherent_ledger(const XpmModelParams& params, std::size_t n_spans,
                                                std::string contributor = "analytic-XPM") {
  if (n_spans < 1) throw DomainError("xpm_incoherent_ledger: at least one span required");
  const double per_span = xpm_inverse_snr_per_span(params);
  AccumulationLedger out{std::move(contributor), {}};
  for (std::size_t i = 1; i <= n_spans; ++i) out.inverse_snr.push_back(static_cast<double>(i) * per_span);
  return out;
}

}  // namespace nlilab
