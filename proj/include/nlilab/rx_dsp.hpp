#pragma once

#include "nlilab/wdm_signal.hpp"

namespace nlilab {

/// Inverse nonlinear SNR measured on the channel under test at one tap.
struct SnrMeasurement {
  std::size_t span_index = 0;
  double inverse_snr = 0.0;
  std::size_t n_symbols_used = 0;
  cplx scale_x{};
  cplx scale_y{};
};

/// Re-centers the frame on `channel`. No filtering; the matched filter selects.
inline SampledField demultiplex(SampledField field, const ChannelSpec& channel) {
  shift_frequency(field, -(channel.center_offset_ghz - field.center_frequency_offset_ghz));
  return field;
}

/// Ideal chromatic-dispersion compensation of the accumulated dispersion.
inline SampledField compensate_dispersion(SampledField field) {
  apply_dispersion(field, -field.accumulated_dispersion_ps_nm);
  field.accumulated_dispersion_ps_nm = 0.0;
  return field;
}

/// Circular RRC matched filter and decimation at the symbol instants.
/// In strict mode a rolloff that differs from the transmitter's is rejected.
inline DualPolSymbols matched_filter_and_sample(const SampledField& field, const ChannelSpec& spec,
                                                bool strict = false) {
  if (strict && field.shaping_rolloff && *field.shaping_rolloff != spec.rolloff)
    throw ConfigError("matched filter rolloff " + std::to_string(spec.rolloff) +
                      " differs from transmit rolloff " + std::to_string(*field.shaping_rolloff));
  const std::size_t sps = samples_per_symbol(spec, field.sample_rate_ghz);
  const std::size_t n = field.size();
  if (n % sps != 0) throw ConfigError("window is not an integer number of symbols");
  const auto& fft = fft_plan(n);
  std::vector<double> h(n);
  for (std::size_t j = 0; j < n; ++j)
    h[j] = rrc_response(bin_frequency(j, n, field.sample_rate_ghz), spec.symbol_rate_gbaud,
                        spec.rolloff);

  DualPolSymbols out{CVector(n / sps), CVector(n / sps)};
  CVector buf(n);
  for (auto [src, dst] : {std::pair{&field.x, &out.x}, std::pair{&field.y, &out.y}}) {
    buf = *src;
    fft.forward(buf);
    for (std::size_t j = 0; j < n; ++j) buf[j] *= h[j];
    fft.inverse(buf);
    for (std::size_t m = 0; m < dst->size(); ++m) (*dst)[m] = buf[m * sps];
  }
  return out;
}

inline constexpr std::size_t kMinEstimatorSymbols = 1024;

/// Data-aided inverse SNR. Per polarization, a least-squares complex scale
/// h = <tx,rx>/<tx,tx> is removed and the residual power is normalized by
/// |h|²E|tx|²; the two polarizations are averaged.
inline SnrMeasurement estimate_inverse_snr(const DualPolSymbols& rx, const DualPolSymbols& tx,
                                           std::size_t span_index = 0) {
  if (rx.x.size() != tx.x.size() || rx.y.size() != tx.y.size() || tx.x.size() != tx.y.size())
    throw DomainError("estimate_inverse_snr: rx/tx length mismatch");
  if (tx.size() < kMinEstimatorSymbols)
    throw DomainError("estimate_inverse_snr: at least 1024 symbols required");

  auto one_pol = [](const CVector& r, const CVector& t, cplx& h) {
    cplx cross{};
    double tt = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      cross += std::conj(t[i]) * r[i];
      tt += std::norm(t[i]);
    }
    if (!(tt > 0.0)) throw DomainError("estimate_inverse_snr: transmitted symbols have zero power");
    h = cross / tt;
    double err = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) err += std::norm(r[i] - h * t[i]);
    const double hh = std::norm(h);
    if (!(hh > 0.0)) throw DomainError("estimate_inverse_snr: received signal uncorrelated with tx");
    return err / (hh * tt);
  };

  SnrMeasurement m;
  m.span_index = span_index;
  m.n_symbols_used = tx.size();
  const double qx = one_pol(rx.x, tx.x, m.scale_x);
  const double qy = one_pol(rx.y, tx.y, m.scale_y);
  m.inverse_snr = 0.5 * (qx + qy);
  if (!std::isfinite(m.inverse_snr)) throw NumericalError("inverse SNR is not finite");
  return m;
}

/// Full receiver chain for one channel: demultiplex, CDC, matched filter, estimate.
inline SnrMeasurement measure_channel(const SampledField& field, const ChannelSpec& channel,
                                      const DualPolSymbols& tx, std::size_t span_index = 0,
                                      bool strict = false) {
  auto rx = compensate_dispersion(demultiplex(field, channel));
  return estimate_inverse_snr(matched_filter_and_sample(rx, channel, strict), tx, span_index);
}

}  // namespace nlilab
