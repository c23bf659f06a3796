#pragma once

#include <limits>
#include <numeric>

#include "nlilab/ssfm.hpp"

namespace nlilab {

enum class AmplifierKind { ExactPowerRestore, FixedGain };

struct AmplifierPolicy {
  AmplifierKind kind = AmplifierKind::ExactPowerRestore;
  double gain_db = 0.0;  // FixedGain only
};

/// Multi-span optical line system with lumped noiseless amplifiers after every span.
struct LinkConfig {
  std::vector<SpanConfig> spans;
  AmplifierPolicy amplifier;
  bool tap_every_span = true;

  std::size_t n_spans() const { return spans.size(); }

  /// `n` identical spans.
  static LinkConfig uniform(const SpanConfig& span, std::size_t n, AmplifierPolicy amp = {}) {
    return LinkConfig{std::vector<SpanConfig>(n, span), amp, true};
  }
};

inline constexpr double kMaxGainMismatchDb = 40.0;

inline void validate_link(const LinkConfig& link) {
  if (link.spans.empty()) throw ConfigError("link needs at least one span");
  for (const auto& s : link.spans) {
    validate_span(s);
    if (link.amplifier.kind == AmplifierKind::FixedGain &&
        std::abs(link.amplifier.gain_db - s.loss_db()) > kMaxGainMismatchDb)
      throw ConfigError("fixed amplifier gain differs from span loss by more than 40 dB");
  }
}

/// Restores `field` after a span: either back to `reference_power_w` or by a fixed gain.
inline void amplify(SampledField& field, const AmplifierPolicy& amp, double reference_power_w) {
  if (amp.kind == AmplifierKind::ExactPowerRestore) {
    const double p = field.power_w();
    if (p > 0.0) field.scale(std::sqrt(reference_power_w / p));
  } else {
    field.scale(std::pow(10.0, amp.gain_db / 20.0));
  }
  const double p = field.power_w();
  if (!std::isfinite(p)) throw NumericalError("amplifier output power overflow");
}

struct LinkOutput {
  std::vector<SampledField> taps;  // post-amplifier field after each span
  SampledField final_field;
};

/// Called with (span index starting at 1, post-amplifier field).
using TapHandler = std::function<void(std::size_t, const SampledField&)>;

/// Alternates span propagation and amplification, reporting each tap to `on_tap`.
inline SampledField propagate_link(SampledField field, const LinkConfig& link,
                                   const TapHandler& on_tap,
                                   const StrictCheck* strict = nullptr) {
  validate_link(link);
  const double launch = field.power_w();
  for (std::size_t i = 0; i < link.spans.size(); ++i) {
    field = propagate_span(std::move(field), link.spans[i], strict);
    amplify(field, link.amplifier, launch);
    if (link.tap_every_span && on_tap) on_tap(i + 1, field);
  }
  return field;
}

inline LinkOutput propagate_link(SampledField field, const LinkConfig& link) {
  LinkOutput out;
  out.final_field = propagate_link(std::move(field), link,
                                   [&](std::size_t, const SampledField& f) { out.taps.push_back(f); });
  return out;
}

/// Per-domain inverse GSNR values (linear) with optional labels.
struct GsnrRecord {
  std::vector<double> inverse_values;
  std::vector<std::string> labels;

  static GsnrRecord from_db(std::initializer_list<double> gsnr_db) {
    GsnrRecord r;
    for (double g : gsnr_db) r.inverse_values.push_back(1.0 / units::db_to_linear(g));
    return r;
  }
};

/// Linear GSNR of a cascade: reciprocal of the summed reciprocals.
inline double cascade_gsnr(const GsnrRecord& record) {
  if (record.inverse_values.empty()) throw DomainError("cascade_gsnr: no domains");
  double sum = 0.0;
  for (double v : record.inverse_values) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw DomainError("cascade_gsnr: inverse GSNR must be finite and non-negative");
    sum += v;
  }
  return sum == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / sum;
}

}  // namespace nlilab
