#pragma once

#include <functional>
#include <variant>

#include "nlilab/field.hpp"

namespace nlilab {

struct FixedStep {
  double dz_km = 0.1;
};

/// Steps of equal effective length, i.e. equal nonlinear phase for a lossy span.
struct LogDistributedSteps {
  std::size_t n_steps = 200;
};

using StepPolicy = std::variant<FixedStep, LogDistributedSteps>;

struct SpanConfig {
  double length_km = 80.0;
  double attenuation_db_km = 0.2;
  double dispersion_ps_nm_km = 16.7;
  double gamma_per_w_km = 1.27;
  StepPolicy step_policy = LogDistributedSteps{200};

  double beta2_ps2_km() const { return units::dispersion_to_beta2(dispersion_ps_nm_km); }
  double alpha_linear() const { return units::attenuation_to_linear(attenuation_db_km); }
  double loss_db() const { return attenuation_db_km * length_km; }
};

inline void validate_span(const SpanConfig& s) {
  if (!(s.length_km > 0.0)) throw ConfigError("span length must be positive");
  if (!(s.attenuation_db_km >= 0.0)) throw ConfigError("attenuation must be non-negative");
  if (!(s.gamma_per_w_km >= 0.0)) throw ConfigError("nonlinearity must be non-negative");
  if (!std::isfinite(s.dispersion_ps_nm_km)) throw ConfigError("dispersion must be finite");
  if (const auto* f = std::get_if<FixedStep>(&s.step_policy); f && !(f->dz_km > 0.0))
    throw ConfigError("fixed step size must be positive");
  if (const auto* l = std::get_if<LogDistributedSteps>(&s.step_policy); l && l->n_steps < 1)
    throw ConfigError("log-distributed step count must be at least 1");
}

/// (1 - e^(-a L)) / a with a the natural-unit power attenuation; L when lossless.
inline double effective_length(double attenuation_db_km, double length_km) {
  const double a = units::attenuation_to_linear(attenuation_db_km);
  if (a == 0.0) return length_km;
  return -std::expm1(-a * length_km) / a;
}

/// Step boundaries 0 = z_0 < ... < z_n = L for the span's policy.
inline std::vector<double> step_boundaries(const SpanConfig& span) {
  std::vector<double> z{0.0};
  const double len = span.length_km;
  if (const auto* f = std::get_if<FixedStep>(&span.step_policy)) {
    const auto n = static_cast<std::size_t>(std::ceil(len / f->dz_km - 1e-9));
    for (std::size_t i = 1; i < n; ++i) z.push_back(static_cast<double>(i) * f->dz_km);
  } else {
    const std::size_t n = std::get<LogDistributedSteps>(span.step_policy).n_steps;
    const double a = span.alpha_linear();
    const double leff = effective_length(span.attenuation_db_km, len);
    for (std::size_t i = 1; i < n; ++i) {
      const double target = leff * static_cast<double>(i) / static_cast<double>(n);
      z.push_back(a == 0.0 ? target : -std::log1p(-a * target) / a);
    }
  }
  z.push_back(len);
  return z;
}

/// Doubles the resolution of a step policy.
inline StepPolicy refined(const StepPolicy& policy) {
  if (const auto* f = std::get_if<FixedStep>(&policy)) return FixedStep{f->dz_km / 2.0};
  return LogDistributedSteps{2 * std::get<LogDistributedSteps>(policy).n_steps};
}

namespace detail {

inline std::vector<double> angular_frequency_squared(const SampledField& field) {
  const std::size_t n = field.size();
  std::vector<double> w2(n);
  for (std::size_t j = 0; j < n; ++j) {
    // rad/ps at the grid frequency of bin j
    const double w = 2.0 * units::kPi * 1e-3 *
                     (bin_frequency(j, n, field.sample_rate_ghz) + field.center_frequency_offset_ghz);
    w2[j] = w * w;
  }
  return w2;
}

inline void fill_linear_operator(CVector& op, const std::vector<double>& w2, double beta2,
                                 double alpha_lin, double dz) {
  const double amp = std::exp(-0.5 * alpha_lin * dz);
  const double k = 0.5 * beta2 * dz;
  for (std::size_t j = 0; j < w2.size(); ++j) op[j] = std::polar(amp, k * w2[j]);
}

inline void apply_nonlinearity(SampledField& field, double gamma, double dz_eff) {
  const double k = (8.0 / 9.0) * gamma * dz_eff;
  if (k == 0.0) return;
  for (std::size_t j = 0; j < field.size(); ++j) {
    const auto rot = std::polar(1.0, k * (std::norm(field.x[j]) + std::norm(field.y[j])));
    field.x[j] *= rot;
    field.y[j] *= rot;
  }
}

/// ∫ e^{-a s} ds over a step of length h centered on its midpoint.
inline double midpoint_effective_step(double alpha_lin, double h) {
  if (alpha_lin == 0.0) return h;
  return 2.0 * std::sinh(0.5 * alpha_lin * h) / alpha_lin;
}

}  // namespace detail

/// Dispersion and loss over `dz_km`: spectral factor exp(i(β2/2)ω²dz − (α/2)dz).
inline void linear_step(SampledField& field, double beta2_ps2_km, double attenuation_db_km,
                        double dz_km) {
  if (!(dz_km > 0.0)) throw DomainError("linear_step: dz must be positive");
  const std::size_t n = field.size();
  const auto& fft = fft_plan(n);
  CVector op(n);
  detail::fill_linear_operator(op, detail::angular_frequency_squared(field), beta2_ps2_km,
                               units::attenuation_to_linear(attenuation_db_km), dz_km);
  for (CVector* pol : {&field.x, &field.y}) {
    fft.forward(*pol);
    for (std::size_t j = 0; j < n; ++j) (*pol)[j] *= op[j];
    fft.inverse(*pol);
  }
  field.accumulated_dispersion_ps_nm += units::beta2_to_dispersion(beta2_ps2_km) * dz_km;
}

/// Manakov Kerr rotation exp(i(8/9)γ(|x|²+|y|²)dz_eff) on both polarizations.
inline void nonlinear_step(SampledField& field, double gamma_per_w_km, double dz_eff_km) {
  if (dz_eff_km < 0.0) throw DomainError("nonlinear_step: dz_eff must be non-negative");
  detail::apply_nonlinearity(field, gamma_per_w_km, dz_eff_km);
}

/// Deviation metric used by the strict step-convergence check, e.g. a measured
/// inverse SNR. Compared in dB between nominal and refined resolution.
struct StrictCheck {
  std::function<double(const SampledField&)> metric;
  double max_deviation_db = 0.05;
};

namespace detail {

inline void propagate_span_impl(SampledField& field, const SpanConfig& span) {
  const auto z = step_boundaries(span);
  const std::size_t n = field.size();
  const auto& fft = fft_plan(n);
  const auto w2 = angular_frequency_squared(field);
  const double beta2 = span.beta2_ps2_km();
  const double alpha = span.alpha_linear();
  const bool nonlinear = span.gamma_per_w_km > 0.0;
  CVector op(n);

  fft.forward(field.x);
  fft.forward(field.y);
  if (!nonlinear) {
    fill_linear_operator(op, w2, beta2, alpha, span.length_km);
    for (std::size_t j = 0; j < n; ++j) {
      field.x[j] *= op[j];
      field.y[j] *= op[j];
    }
  } else {
    // Symmetrized: half linear, full nonlinear, half linear, with adjacent
    // half steps fused into one spectral multiply.
    double pending = 0.0;
    for (std::size_t s = 0; s + 1 < z.size(); ++s) {
      const double h = z[s + 1] - z[s];
      fill_linear_operator(op, w2, beta2, alpha, pending + 0.5 * h);
      for (std::size_t j = 0; j < n; ++j) {
        field.x[j] *= op[j];
        field.y[j] *= op[j];
      }
      fft.inverse(field.x);
      fft.inverse(field.y);
      apply_nonlinearity(field, span.gamma_per_w_km, midpoint_effective_step(alpha, h));
      fft.forward(field.x);
      fft.forward(field.y);
      pending = 0.5 * h;
    }
    fill_linear_operator(op, w2, beta2, alpha, pending);
    for (std::size_t j = 0; j < n; ++j) {
      field.x[j] *= op[j];
      field.y[j] *= op[j];
    }
  }
  fft.inverse(field.x);
  fft.inverse(field.y);
  field.accumulated_dispersion_ps_nm += span.dispersion_ps_nm_km * span.length_km;
}

}  // namespace detail

/// Symmetrized split-step propagation through one span (Manakov model).
/// With `strict`, the span is re-run at doubled resolution and a NumericalError
/// is raised when the metric differs by more than the allowed dB deviation.
inline SampledField propagate_span(SampledField field, const SpanConfig& span,
                                   const StrictCheck* strict = nullptr) {
  validate_span(span);
  validate_grid(field);
  if (strict == nullptr || span.gamma_per_w_km == 0.0) {
    detail::propagate_span_impl(field, span);
    return field;
  }
  SampledField fine = field;
  SpanConfig fine_span = span;
  fine_span.step_policy = refined(span.step_policy);
  detail::propagate_span_impl(field, span);
  detail::propagate_span_impl(fine, fine_span);
  const double a = strict->metric(field);
  const double b = strict->metric(fine);
  if (a > 1e-30 || b > 1e-30) {
    const double dev = std::abs(units::linear_to_db(a / b));
    if (!(dev <= strict->max_deviation_db))
      throw NumericalError("step convergence check failed: " + std::to_string(dev) +
                           " dB deviation at doubled resolution (limit " +
                           std::to_string(strict->max_deviation_db) + " dB)");
  }
  return field;
}

}  // namespace nlilab
