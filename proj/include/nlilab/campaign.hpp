#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <thread>

#include "nlilab/analytic_xpm.hpp"
#include "nlilab/ledger.hpp"
#include "nlilab/ols_link.hpp"
#include "nlilab/rx_dsp.hpp"
#include "nlilab/wdm_signal.hpp"

namespace nlilab {

enum class ScenarioKind { FullSpectrum, PumpProbe, ProbeOnly };

struct ScenarioLabel {
  ScenarioKind kind = ScenarioKind::FullSpectrum;
  int pump_index = 0;  // PumpProbe only

  std::string str() const {
    switch (kind) {
      case ScenarioKind::FullSpectrum: return "full-spectrum";
      case ScenarioKind::ProbeOnly: return "probe-only";
      case ScenarioKind::PumpProbe: return "pump-probe(" + signed_index(pump_index) + ")";
    }
    return "?";
  }

  static std::string signed_index(int k) { return (k > 0 ? "+" : "") + std::to_string(k); }
};

/// One propagation job: a set of channels over a link, measured on channel 0.
struct ScenarioConfig {
  std::vector<ChannelSpec> channels;
  LinkConfig link;
  std::size_t n_symbols = 8192;
  double sample_rate_ghz = 512.0;
  ScenarioLabel label;
  bool strict = false;
};

inline const ChannelSpec& channel_under_test(const std::vector<ChannelSpec>& channels) {
  const auto it = std::find_if(channels.begin(), channels.end(),
                               [](const ChannelSpec& c) { return c.index == 0; });
  if (it == channels.end()) throw ConfigError("channel under test (index 0) is missing");
  return *it;
}

/// Largest |β2|·2π·Δf·L walk-off across the link, in ns.
inline double max_walk_off_ns(const std::vector<ChannelSpec>& channels, const LinkConfig& link) {
  double max_offset = 0.0;
  for (const auto& c : channels) max_offset = std::max(max_offset, std::abs(c.center_offset_ghz));
  double beta2_len = 0.0;
  for (const auto& s : link.spans) beta2_len += std::abs(s.beta2_ps2_km()) * s.length_km;
  return beta2_len * 2.0 * units::kPi * max_offset * 1e-3 * 1e-3;  // ps -> ns
}

/// Grid, channel-set and walk-off checks. Throws ConfigError before any compute.
inline void validate_scenario(const ScenarioConfig& cfg) {
  validate_link(cfg.link);
  if (cfg.n_symbols < kMinEstimatorSymbols)
    throw ConfigError("n_symbols must be at least " + std::to_string(kMinEstimatorSymbols));
  const auto cut_count = std::count_if(cfg.channels.begin(), cfg.channels.end(),
                                       [](const ChannelSpec& c) { return c.index == 0; });
  if (cut_count != 1) throw ConfigError("channel under test must be present exactly once");
  std::vector<int> idx;
  for (const auto& c : cfg.channels) idx.push_back(c.index);
  std::sort(idx.begin(), idx.end());
  if (std::adjacent_find(idx.begin(), idx.end()) != idx.end())
    throw ConfigError("duplicate channel index");
  switch (cfg.label.kind) {
    case ScenarioKind::ProbeOnly:
      if (idx != std::vector<int>{0}) throw ConfigError("probe-only must contain only channel 0");
      break;
    case ScenarioKind::PumpProbe: {
      auto want = std::vector<int>{0, cfg.label.pump_index};
      std::sort(want.begin(), want.end());
      if (cfg.label.pump_index == 0 || idx != want)
        throw ConfigError("pump-probe(k) must contain exactly channels {0, k}");
      break;
    }
    case ScenarioKind::FullSpectrum: break;
  }

  const auto& cut = channel_under_test(cfg.channels);
  const std::size_t n_samples = cfg.n_symbols * samples_per_symbol(cut, cfg.sample_rate_ghz);
  if (!is_power_of_two(n_samples)) throw ConfigError("sample count must be a power of two");
  const double window_ns = static_cast<double>(n_samples) / cfg.sample_rate_ghz;
  for (const auto& c : cfg.channels) {
    validate_channel(c);
    const std::size_t sps = samples_per_symbol(c, cfg.sample_rate_ghz);
    if (static_cast<double>(sps) < 2.0 * (1.0 + c.rolloff))
      throw ConfigError("channel " + std::to_string(c.index) +
                        ": samples per symbol must be at least 2(1+rolloff)");
    if (n_samples % sps != 0)
      throw ConfigError("channel " + std::to_string(c.index) +
                        ": window is not an integer number of symbols");
    if (std::abs(c.center_offset_ghz) + c.half_bandwidth_ghz() > cfg.sample_rate_ghz / 2.0)
      throw ConfigError("channel " + std::to_string(c.index) +
                        " exceeds the simulation bandwidth (aliasing)");
    const double bins = c.center_offset_ghz * window_ns;
    if (std::abs(bins - std::round(bins)) > 1e-6)
      throw ConfigError("channel " + std::to_string(c.index) +
                        " offset is not on the periodic window's frequency grid");
  }
  for (std::size_t a = 0; a < cfg.channels.size(); ++a)
    for (std::size_t b = a + 1; b < cfg.channels.size(); ++b) {
      const auto& ca = cfg.channels[a];
      const auto& cb = cfg.channels[b];
      if (std::abs(ca.center_offset_ghz - cb.center_offset_ghz) <
          ca.half_bandwidth_ghz() + cb.half_bandwidth_ghz() - 1e-9)
        throw ConfigError("channels " + std::to_string(ca.index) + " and " +
                          std::to_string(cb.index) + " overlap spectrally");
    }
  const double walk_off = max_walk_off_ns(cfg.channels, cfg.link);
  if (walk_off >= 0.25 * window_ns)
    throw ConfigError("inter-channel walk-off " + std::to_string(walk_off) +
                      " ns exceeds 25% of the " + std::to_string(window_ns) + " ns window");
}

/// Transmit-side synthesis for a scenario: symbols per channel and the launched field.
struct Transmitter {
  std::map<int, DualPolSymbols> symbols;
  SampledField field;
};

inline Transmitter synthesize(const ScenarioConfig& cfg) {
  const auto& cut = channel_under_test(cfg.channels);
  const std::size_t n_samples = cfg.n_symbols * samples_per_symbol(cut, cfg.sample_rate_ghz);
  // CuT first: it is the multiplex reference.
  std::vector<const ChannelSpec*> order{&cut};
  for (const auto& c : cfg.channels)
    if (c.index != 0) order.push_back(&c);
  Transmitter tx;
  std::vector<SampledField> fields;
  for (const auto* c : order) {
    const std::size_t n_sym = n_samples / samples_per_symbol(*c, cfg.sample_rate_ghz);
    auto& sym = tx.symbols[c->index] = generate_symbols(c->modulation, n_sym, c->seed);
    fields.push_back(shape_and_modulate(sym, *c, cfg.sample_rate_ghz, n_samples));
  }
  tx.field = multiplex(fields);
  return tx;
}

/// Synthesizes, propagates and measures the channel under test at every span.
inline AccumulationLedger run_scenario(const ScenarioConfig& cfg) {
  try {
    validate_scenario(cfg);
    const auto& cut = channel_under_test(cfg.channels);
    const auto tx = synthesize(cfg);
    const auto& cut_symbols = tx.symbols.at(0);

    AccumulationLedger ledger;
    switch (cfg.label.kind) {
      case ScenarioKind::FullSpectrum: ledger.contributor = "total"; break;
      case ScenarioKind::ProbeOnly: ledger.contributor = "SPM"; break;
      case ScenarioKind::PumpProbe:
        ledger.contributor = "P&P(" + ScenarioLabel::signed_index(cfg.label.pump_index) + ")";
        break;
    }
    auto measure = [&](const SampledField& f) {
      return measure_channel(f, cut, cut_symbols, 0, cfg.strict).inverse_snr;
    };
    StrictCheck check{measure, 0.05};
    LinkConfig link = cfg.link;
    link.tap_every_span = true;
    propagate_link(
        tx.field, link,
        [&](std::size_t, const SampledField& f) { ledger.inverse_snr.push_back(measure(f)); },
        cfg.strict ? &check : nullptr);
    return ledger;
  } catch (const ConfigError& e) {
    throw ConfigError(cfg.label.str() + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(cfg.label.str() + ": " + e.what());
  } catch (const DomainError& e) {
    throw DomainError(cfg.label.str() + ": " + e.what());
  }
}

/// Runs `n_jobs` independent jobs on up to `workers` threads. Results are
/// placed by job index; the first failure by index is rethrown after all finish.
template <typename Result, typename Job>
std::vector<Result> run_parallel(std::size_t n_jobs, std::size_t workers, Job&& job) {
  std::vector<Result> results(n_jobs);
  std::vector<std::exception_ptr> errors(n_jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n_jobs; i = next++) {
      try {
        results[i] = job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n_jobs, 1));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

// ---------------------------------------------------------------------------
// Campaign: full-spectrum vs superimposed pump-and-probe.

/// Regular WDM grid centered on the channel under test.
struct ChannelPlan {
  std::size_t n_channels = 5;
  double symbol_rate_gbaud = 32.0;
  double spacing_ghz = 37.5;
  double power_dbm = 0.0;
  double rolloff = 0.1;
  Modulation cut_modulation = Modulation::PmQpsk;
  Modulation pump_modulation = Modulation::PmQpsk;
  double cut_predistortion_ps_nm = 0.0;
  double pump_predistortion_ps_nm = 0.0;

  /// Channel indices, CuT at 0: -(K-1)/2 .. K/2.
  std::vector<int> indices() const {
    std::vector<int> out;
    const int lo = -static_cast<int>((n_channels - 1) / 2);
    for (std::size_t i = 0; i < n_channels; ++i) out.push_back(lo + static_cast<int>(i));
    return out;
  }
};

/// Per-channel seed derived from the base seed and channel index (splitmix64).
inline std::uint64_t channel_seed(std::uint64_t base, int index) {
  std::uint64_t z = base * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(index + 1024);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::vector<ChannelSpec> build_channels(const ChannelPlan& plan, std::uint64_t seed) {
  std::vector<ChannelSpec> out;
  for (int k : plan.indices()) {
    ChannelSpec c;
    c.index = k;
    c.center_offset_ghz = k * plan.spacing_ghz;
    c.symbol_rate_gbaud = plan.symbol_rate_gbaud;
    c.power_dbm = plan.power_dbm;
    c.rolloff = plan.rolloff;
    c.modulation = k == 0 ? plan.cut_modulation : plan.pump_modulation;
    c.predistortion_ps_nm = k == 0 ? plan.cut_predistortion_ps_nm : plan.pump_predistortion_ps_nm;
    c.seed = channel_seed(seed, k);
    out.push_back(c);
  }
  return out;
}

struct Numerics {
  std::size_t n_symbols = 8192;
  std::size_t samples_per_symbol = 0;  // 0: automatic
  std::uint64_t seed = 1;
  bool strict = false;
};

inline constexpr double kMinSampleRateGhz = 512.0;

/// Smallest power-of-two samples-per-symbol (at least 4) whose sample rate
/// reaches 512 GHz and covers the occupied band plus a 20% guard.
inline std::size_t auto_samples_per_symbol(const ChannelPlan& plan) {
  const double span = static_cast<double>(plan.n_channels - 1) * plan.spacing_ghz +
                      plan.symbol_rate_gbaud * (1.0 + plan.rolloff);
  const double needed = std::max(kMinSampleRateGhz, 1.2 * span);
  std::size_t sps = 4;
  while (plan.symbol_rate_gbaud * static_cast<double>(sps) < needed - 1e-9) sps *= 2;
  return sps;
}

struct CampaignConfig {
  std::string label = "campaign";
  ChannelPlan plan;
  LinkConfig link = LinkConfig::uniform(SpanConfig{}, 10);
  Numerics numerics;

  std::size_t resolved_sps() const {
    return numerics.samples_per_symbol ? numerics.samples_per_symbol
                                       : auto_samples_per_symbol(plan);
  }
  double sample_rate_ghz() const {
    return plan.symbol_rate_gbaud * static_cast<double>(resolved_sps());
  }
};

/// Every scenario of a campaign: full spectrum, probe only, one pump-probe per pump.
inline std::vector<ScenarioConfig> expand_scenarios(const CampaignConfig& cfg) {
  if (cfg.plan.n_channels < 1) throw ConfigError("channel count must be at least 1");
  if (cfg.plan.spacing_ghz < cfg.plan.symbol_rate_gbaud && cfg.plan.n_channels > 1)
    throw ConfigError("channel spacing must be at least the symbol rate");
  const auto all = build_channels(cfg.plan, cfg.numerics.seed);
  const auto& cut = channel_under_test(all);
  auto base = [&](ScenarioLabel label, std::vector<ChannelSpec> ch) {
    return ScenarioConfig{std::move(ch), cfg.link, cfg.numerics.n_symbols, cfg.sample_rate_ghz(),
                          label, cfg.numerics.strict};
  };
  std::vector<ScenarioConfig> out;
  out.push_back(base({ScenarioKind::FullSpectrum, 0}, all));
  out.push_back(base({ScenarioKind::ProbeOnly, 0}, {cut}));
  for (const auto& c : all)
    if (c.index != 0) out.push_back(base({ScenarioKind::PumpProbe, c.index}, {cut, c}));
  return out;
}

/// Validates every scenario of the campaign without running anything.
inline void validate_campaign(const CampaignConfig& cfg) {
  for (const auto& s : expand_scenarios(cfg)) validate_scenario(s);
}

struct CampaignResult {
  std::string label;
  AccumulationLedger full_spectrum;
  AccumulationLedger spm;
  std::vector<int> pump_indices;
  std::vector<AccumulationLedger> xpm;           // per pump, ordered as pump_indices
  AccumulationLedger xpm_total;
  AccumulationLedger superposition;
  std::vector<AccumulationLedger> analytic_xpm;  // per pump
  AccumulationLedger analytic_total;
  std::optional<std::size_t> dominance_span;             // on accumulated ledgers
  std::optional<std::size_t> dominance_span_increments;  // on per-span increments
  std::optional<double> coherence_spm;
  std::optional<double> coherence_xpm;
  Diagnostics diagnostics;

  /// Every ledger in output order.
  std::vector<const AccumulationLedger*> ledgers() const {
    std::vector<const AccumulationLedger*> out{&full_spectrum, &superposition, &spm};
    for (const auto& l : xpm) out.push_back(&l);
    out.push_back(&xpm_total);
    for (const auto& l : analytic_xpm) out.push_back(&l);
    out.push_back(&analytic_total);
    return out;
  }
};

/// Analytic incoherent reference for every pump, accumulated span by span.
inline std::vector<AccumulationLedger> analytic_reference(const CampaignConfig& cfg,
                                                          const std::vector<ChannelSpec>& pumps) {
  std::vector<AccumulationLedger> out;
  for (const auto& p : pumps) {
    AccumulationLedger l{"analytic-XPM(" + ScenarioLabel::signed_index(p.index) + ")", {}};
    double acc = 0.0;
    for (const auto& s : cfg.link.spans) {
      acc += xpm_inverse_snr_per_span(XpmModelParams::from_span(
          s, p.power_w(), p.symbol_rate_gbaud, p.center_offset_ghz, units::dbm_to_watt(cfg.plan.power_dbm)));
      l.inverse_snr.push_back(acc);
    }
    out.push_back(std::move(l));
  }
  return out;
}

/// Combines the ledgers of all scenarios into the decomposition.
inline CampaignResult assemble_campaign(const CampaignConfig& cfg,
                                        const std::vector<ScenarioConfig>& scenarios,
                                        const std::vector<AccumulationLedger>& ledgers) {
  CampaignResult r;
  r.label = cfg.label;
  std::vector<ChannelSpec> pumps;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const auto& s = scenarios[i];
    if (s.label.kind == ScenarioKind::FullSpectrum) r.full_spectrum = ledgers[i];
    if (s.label.kind == ScenarioKind::ProbeOnly) r.spm = ledgers[i];
  }
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const auto& s = scenarios[i];
    if (s.label.kind != ScenarioKind::PumpProbe) continue;
    const int k = s.label.pump_index;
    r.pump_indices.push_back(k);
    r.xpm.push_back(
        extract_xpm(ledgers[i], r.spm, "XPM(" + ScenarioLabel::signed_index(k) + ")", &r.diagnostics));
    for (const auto& c : s.channels)
      if (c.index == k) pumps.push_back(c);
  }
  const std::size_t n = cfg.link.n_spans();
  r.xpm_total = sum_ledgers(r.xpm, "XPM-sum", n);
  r.superposition = superpose(r.spm, r.xpm);
  r.analytic_xpm = analytic_reference(cfg, pumps);
  r.analytic_total = sum_ledgers(r.analytic_xpm, "analytic-XPM-sum", n);
  r.dominance_span = dominance_crossing(r.spm, r.xpm_total);
  r.dominance_span_increments =
      dominance_crossing({"SPM increments", increments(r.spm)},
                         {"XPM-sum increments", increments(r.xpm_total)});
  auto fit = [&](const AccumulationLedger& l) -> std::optional<double> {
    if (l.n_spans() < 8) return std::nullopt;
    try {
      return fit_coherence_exponent(l);
    } catch (const DomainError& e) {
      r.diagnostics.push_back(l.contributor + ": coherence fit skipped (" + e.what() + ")");
      return std::nullopt;
    }
  };
  r.coherence_spm = fit(r.spm);
  if (!r.xpm.empty()) r.coherence_xpm = fit(r.xpm_total);
  return r;
}

/// Runs every scenario of the campaign on `workers` threads and assembles the result.
/// The result does not depend on the worker count.
inline CampaignResult run_campaign(const CampaignConfig& cfg, std::size_t workers = 1) {
  const auto scenarios = expand_scenarios(cfg);
  for (const auto& s : scenarios) validate_scenario(s);
  const auto ledgers = run_parallel<AccumulationLedger>(
      scenarios.size(), workers, [&](std::size_t i) { return run_scenario(scenarios[i]); });
  return assemble_campaign(cfg, scenarios, ledgers);
}

}  // namespace nlilab
