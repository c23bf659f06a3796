#pragma once

#include <random>
#include <string_view>

#include "nlilab/field.hpp"

namespace nlilab {

enum class Modulation { PmQpsk, Gaussian };

inline Modulation parse_modulation(std::string_view tag) {
  if (tag == "PM-QPSK") return Modulation::PmQpsk;
  if (tag == "Gaussian") return Modulation::Gaussian;
  throw ConfigError("unknown modulation '" + std::string(tag) +
                    "' (expected PM-QPSK or Gaussian)");
}

inline std::string_view to_string(Modulation m) {
  return m == Modulation::PmQpsk ? "PM-QPSK" : "Gaussian";
}

/// One channel of the WDM grid. Index 0 is the channel under test.
struct ChannelSpec {
  int index = 0;
  double center_offset_ghz = 0.0;
  double symbol_rate_gbaud = 32.0;
  double power_dbm = 0.0;
  Modulation modulation = Modulation::PmQpsk;
  double rolloff = 0.1;
  double predistortion_ps_nm = 0.0;
  std::uint64_t seed = 1;

  double power_w() const { return units::dbm_to_watt(power_dbm); }
  /// One-sided occupied bandwidth, Rs(1+rolloff)/2, in GHz.
  double half_bandwidth_ghz() const { return symbol_rate_gbaud * (1.0 + rolloff) / 2.0; }
};

struct DualPolSymbols {
  CVector x;
  CVector y;
  std::size_t size() const { return x.size(); }
};

/// Unit-mean-power symbols per polarization, deterministic in `seed`.
inline DualPolSymbols generate_symbols(Modulation modulation, std::size_t n_symbols,
                                       std::uint64_t seed) {
  if (n_symbols < 1) throw ConfigError("n_symbols must be at least 1");
  DualPolSymbols out{CVector(n_symbols), CVector(n_symbols)};
  std::mt19937_64 rng(seed);
  switch (modulation) {
    case Modulation::PmQpsk: {
      const double a = 1.0 / std::sqrt(2.0);
      auto draw = [&] {
        const auto bits = rng();
        return cplx((bits >> 63) ? a : -a, ((bits >> 62) & 1U) ? a : -a);
      };
      for (std::size_t i = 0; i < n_symbols; ++i) {
        out.x[i] = draw();
        out.y[i] = draw();
      }
      break;
    }
    case Modulation::Gaussian: {
      std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
      auto draw = [&] {
        const double re = normal(rng);
        const double im = normal(rng);
        return cplx(re, im);
      };
      for (std::size_t i = 0; i < n_symbols; ++i) {
        out.x[i] = draw();
        out.y[i] = draw();
      }
      break;
    }
    default:
      throw ConfigError("unknown modulation tag");
  }
  return out;
}

/// Root-raised-cosine amplitude response at baseband frequency `f` (same unit as `rs`).
/// Unity in the passband; H² is a Nyquist raised-cosine.
inline double rrc_response(double f, double rs, double rolloff) {
  const double af = std::abs(f);
  const double lo = (1.0 - rolloff) * rs / 2.0;
  const double hi = (1.0 + rolloff) * rs / 2.0;
  if (af <= lo) return 1.0;
  if (af > hi) return 0.0;
  return std::sqrt(0.5 * (1.0 + std::cos(units::kPi / (rolloff * rs) * (af - lo))));
}

/// Integer samples-per-symbol for `spec` at `sample_rate_ghz`, or ConfigError.
inline std::size_t samples_per_symbol(const ChannelSpec& spec, double sample_rate_ghz) {
  const double ratio = sample_rate_ghz / spec.symbol_rate_gbaud;
  const double r = std::round(ratio);
  if (std::abs(ratio - r) > 1e-9 || r < 1.0)
    throw ConfigError("sample rate " + std::to_string(sample_rate_ghz) +
                      " GHz is not an integer multiple of symbol rate " +
                      std::to_string(spec.symbol_rate_gbaud) + " GBaud");
  return static_cast<std::size_t>(r);
}

inline void validate_channel(const ChannelSpec& spec) {
  if (!(spec.symbol_rate_gbaud > 0.0)) throw ConfigError("symbol rate must be positive");
  if (!std::isfinite(spec.power_dbm)) throw ConfigError("channel power must be finite");
  if (!(spec.rolloff >= 0.0 && spec.rolloff <= 1.0))
    throw ConfigError("rolloff must lie in [0, 1]");
  if (!std::isfinite(spec.predistortion_ps_nm)) throw ConfigError("predistortion must be finite");
}

/// Pulse-shapes `symbols` onto a periodic grid, places the channel at its
/// offset and applies any predistortion. The output mean power equals spec.power.
inline SampledField shape_and_modulate(const DualPolSymbols& symbols, const ChannelSpec& spec,
                                       double sample_rate_ghz, std::size_t n_samples) {
  validate_channel(spec);
  const std::size_t sps = samples_per_symbol(spec, sample_rate_ghz);
  if (static_cast<double>(sps) < 2.0 * (1.0 + spec.rolloff))
    throw ConfigError("samples per symbol must be at least 2(1+rolloff)");
  if (symbols.x.size() != symbols.y.size()) throw ConfigError("polarization symbol counts differ");
  if (n_samples != symbols.size() * sps)
    throw ConfigError("n_samples must equal n_symbols x samples-per-symbol");
  if (!is_power_of_two(n_samples)) throw ConfigError("n_samples must be a power of two");
  if (std::abs(spec.center_offset_ghz) + spec.half_bandwidth_ghz() > sample_rate_ghz / 2.0)
    throw ConfigError("channel " + std::to_string(spec.index) +
                      " exceeds the simulation bandwidth (aliasing)");

  SampledField out;
  out.sample_rate_ghz = sample_rate_ghz;
  out.shaping_rolloff = spec.rolloff;
  out.x.assign(n_samples, cplx{});
  out.y.assign(n_samples, cplx{});
  const long long shift = frequency_to_bins(spec.center_offset_ghz, out);
  const auto n = static_cast<long long>(n_samples);
  const auto& fft = fft_plan(n_samples);

  CVector spectrum(n_samples);
  for (auto [src, dst] : {std::pair{&symbols.x, &out.x}, std::pair{&symbols.y, &out.y}}) {
    std::fill(spectrum.begin(), spectrum.end(), cplx{});
    for (std::size_t m = 0; m < src->size(); ++m) spectrum[m * sps] = (*src)[m];
    fft.forward(spectrum);
    for (long long j = 0; j < n; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      const double f = bin_frequency(uj, n_samples, sample_rate_ghz);
      const auto k = static_cast<std::size_t>(((j + shift) % n + n) % n);
      cplx v = spectrum[uj] * rrc_response(f, spec.symbol_rate_gbaud, spec.rolloff);
      if (spec.predistortion_ps_nm != 0.0) {
        const double fk = bin_frequency(k, n_samples, sample_rate_ghz);
        v *= std::polar(1.0, dispersion_phase(fk, spec.predistortion_ps_nm));
      }
      (*dst)[k] = v;
    }
    fft.inverse(*dst);
  }
  out.accumulated_dispersion_ps_nm = spec.predistortion_ps_nm;

  const double p = out.power_w();
  if (!(p > 0.0)) throw ConfigError("shaped waveform has zero power");
  out.scale(std::sqrt(spec.power_w() / p));
  return out;
}

/// Pointwise sum of co-gridded fields. Metadata (frame center, accumulated
/// dispersion) is taken from the first field, which is the reference channel.
inline SampledField multiplex(const std::vector<SampledField>& fields) {
  if (fields.empty()) throw ConfigError("multiplex needs at least one field");
  SampledField out = fields.front();
  validate_grid(out);
  for (std::size_t i = 1; i < fields.size(); ++i) {
    const auto& f = fields[i];
    if (f.size() != out.size() || f.y.size() != out.y.size() ||
        f.sample_rate_ghz != out.sample_rate_ghz ||
        f.center_frequency_offset_ghz != out.center_frequency_offset_ghz)
      throw ConfigError("multiplex: fields do not share a sampling grid");
    for (std::size_t j = 0; j < out.size(); ++j) {
      out.x[j] += f.x[j];
      out.y[j] += f.y[j];
    }
    if (out.shaping_rolloff != f.shaping_rolloff) out.shaping_rolloff.reset();
  }
  return out;
}

}  // namespace nlilab
