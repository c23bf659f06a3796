#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "nlilab/common.hpp"
#include "nlilab/fft.hpp"

namespace nlilab {

/// Dual-polarization complex baseband waveform on a periodic window.
///
/// Samples are in W^0.5 so that |x|²+|y|² is instantaneous power in W.
/// `center_frequency_offset_ghz` is the frame center relative to the WDM grid
/// center, and `accumulated_dispersion_ps_nm` is the dispersion seen by the
/// reference channel since it was launched undistorted.
struct SampledField {
  CVector x;
  CVector y;
  double sample_rate_ghz = 0.0;
  double center_frequency_offset_ghz = 0.0;
  double accumulated_dispersion_ps_nm = 0.0;
  // Rolloff of the pulse shaping, when all constituents agree on it.
  std::optional<double> shaping_rolloff;

  std::size_t size() const { return x.size(); }
  double duration_ns() const { return static_cast<double>(size()) / sample_rate_ghz; }

  /// Mean total power over the window in W.
  double power_w() const {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += std::norm(x[i]) + std::norm(y[i]);
    return x.empty() ? 0.0 : acc / static_cast<double>(x.size());
  }

  double energy() const { return power_w() * static_cast<double>(size()); }

  void scale(double amplitude) {
    for (auto& v : x) v *= amplitude;
    for (auto& v : y) v *= amplitude;
  }
};

/// Throws ConfigError unless the field has a valid power-of-two periodic grid.
inline void validate_grid(const SampledField& f) {
  if (f.x.size() != f.y.size()) throw ConfigError("polarization sample counts differ");
  if (!is_power_of_two(f.size())) throw ConfigError("sample count must be a power of two");
  if (!(f.sample_rate_ghz > 0.0)) throw ConfigError("sample rate must be positive");
}

/// Relative L2 distance ||a-b|| / ||b|| over both polarizations.
inline double relative_l2(const SampledField& a, const SampledField& b) {
  if (a.size() != b.size()) throw DomainError("relative_l2: size mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a.x[i] - b.x[i]) + std::norm(a.y[i] - b.y[i]);
    den += std::norm(b.x[i]) + std::norm(b.y[i]);
  }
  return std::sqrt(num / den);
}

/// Spectral phase of an accumulated dispersion `d_ps_nm` at grid frequency `f_ghz`.
inline double dispersion_phase(double f_ghz, double d_ps_nm) {
  const double f_thz = f_ghz * 1e-3;
  return -units::kPi * units::kCarrierWavelength * units::kCarrierWavelength * d_ps_nm *
         f_thz * f_thz / units::kSpeedOfLight;
}

/// Applies the all-pass quadratic phase of `d_ps_nm` of accumulated dispersion
/// (about the grid center) and advances the metadata accordingly.
inline void apply_dispersion(SampledField& field, double d_ps_nm) {
  if (d_ps_nm == 0.0) return;
  const std::size_t n = field.size();
  const auto& fft = fft_plan(n);
  CVector phase(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double f = bin_frequency(j, n, field.sample_rate_ghz) + field.center_frequency_offset_ghz;
    phase[j] = std::polar(1.0, dispersion_phase(f, d_ps_nm));
  }
  for (CVector* pol : {&field.x, &field.y}) {
    fft.forward(*pol);
    for (std::size_t j = 0; j < n; ++j) (*pol)[j] *= phase[j];
    fft.inverse(*pol);
  }
  field.accumulated_dispersion_ps_nm += d_ps_nm;
}

/// Number of DFT bins corresponding to `df_ghz`; must be integral on the periodic window.
inline long long frequency_to_bins(double df_ghz, const SampledField& field) {
  const double bins = df_ghz * field.duration_ns();
  const double rounded = std::round(bins);
  if (std::abs(bins - rounded) > 1e-6)
    throw ConfigError("frequency " + std::to_string(df_ghz) +
                      " GHz is not a multiple of the window resolution " +
                      std::to_string(1.0 / field.duration_ns()) + " GHz");
  return static_cast<long long>(rounded);
}

/// Moves spectral content up by `df_ghz` (content at f ends at f + df).
inline void shift_frequency(SampledField& field, double df_ghz) {
  const long long bins = frequency_to_bins(df_ghz, field);
  if (bins == 0) return;
  const auto n = static_cast<long long>(field.size());
  const long long step = ((bins % n) + n) % n;
  CVector rot(static_cast<std::size_t>(n));
  long long idx = 0;
  for (long long j = 0; j < n; ++j) {
    rot[static_cast<std::size_t>(j)] =
        std::polar(1.0, 2.0 * units::kPi * static_cast<double>(idx) / static_cast<double>(n));
    idx = (idx + step) % n;
  }
  for (std::size_t j = 0; j < field.size(); ++j) {
    field.x[j] *= rot[j];
    field.y[j] *= rot[j];
  }
  field.center_frequency_offset_ghz -= df_ghz;
}

/// Power spectrum |X_j|²+|Y_j|² per bin, normalized so that its sum equals mean power.
inline std::vector<double> power_spectrum(const SampledField& field) {
  const std::size_t n = field.size();
  const auto& fft = fft_plan(n);
  CVector fx = field.x, fy = field.y;
  fft.forward(fx);
  fft.forward(fy);
  std::vector<double> psd(n);
  const double norm = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
  for (std::size_t j = 0; j < n; ++j) psd[j] = (std::norm(fx[j]) + std::norm(fy[j])) * norm;
  return psd;
}

}  // namespace nlilab
