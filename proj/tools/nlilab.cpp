// Batch driver: runs full-spectrum vs pump-and-probe campaigns and writes
// CSV ledgers, a JSON result with its run manifest, and two SVG plots.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical-accuracy error,
// 4 internal error.

#include <CLI11.hpp>

#include <iostream>

#include "nlilab/report.hpp"

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kNumerical = 3, kInternal = 4 };

void write_failure(const std::filesystem::path& out, const std::string& kind, const std::string& what,
                   int code) {
  try {
    std::filesystem::create_directories(out);
    nlilab::json report = {{"status", "FAILED"}, {"error", kind}, {"message", what}, {"exit_code", code}};
    nlilab::write_text(out / "FAILED", report.dump(2) + "\n");
  } catch (...) {
  }
  std::cerr << "error (" << kind << "): " << what << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nlilab: coherent vs incoherent NLI accumulation in multi-span optical line systems"};
  std::string config_path, preset_name, out_dir = "nlilab-out", pump_mod;
  std::size_t spans = 0, channels = 0, symbols = 0, jobs = 1;
  std::uint64_t seed = 0;
  bool strict = false, emit_config = false, list_presets = false;

  auto* cfg_opt = app.add_option("--config", config_path, "JSON configuration (or a previous result JSON)");
  auto* preset_opt = app.add_option("--preset", preset_name, "Built-in scenario: widespread-32g | highrate-64g");
  cfg_opt->excludes(preset_opt);
  auto* spans_opt = app.add_option("--spans", spans, "Override span count");
  auto* ch_opt = app.add_option("--channels", channels, "Override WDM channel count");
  auto* sym_opt = app.add_option("--symbols", symbols, "Override symbols per channel (power of two)");
  auto* seed_opt = app.add_option("--seed", seed, "Override base seed");
  auto* pm_opt = app.add_option("--pump-modulation", pump_mod, "Override pump statistics: PM-QPSK | Gaussian");
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_flag("--strict", strict, "Re-run each span at doubled resolution and fail on > 0.05 dB deviation");
  app.add_option("--jobs", jobs, "Worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_flag("--emit-config", emit_config, "Print the resolved configuration and exit");
  app.add_flag("--list-presets", list_presets, "List built-in presets and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfig;
  }

  if (list_presets) {
    for (const auto& p : nlilab::preset_names()) std::cout << p << "\n";
    return kOk;
  }

  const std::filesystem::path out(out_dir);
  std::vector<nlilab::CampaignConfig> configs;
  nlilab::Overrides overrides;
  try {
    if (!config_path.empty())
      configs = nlilab::load_config(config_path);
    else
      configs.push_back(nlilab::preset(preset_name.empty() ? "widespread-32g" : preset_name));
    if (*spans_opt) overrides.spans = spans;
    if (*ch_opt) overrides.channels = channels;
    if (*sym_opt) overrides.symbols = symbols;
    if (*seed_opt) overrides.seed = seed;
    if (*pm_opt) overrides.pump_modulation = nlilab::parse_modulation(pump_mod);
    overrides.strict = strict;
    for (auto& c : configs) nlilab::apply_overrides(c, overrides);
  } catch (const nlilab::ConfigError& e) {
    write_failure(out, "configuration", e.what(), kConfig);
    return kConfig;
  }

  if (emit_config) {
    for (const auto& c : configs) std::cout << nlilab::config_to_json(c).dump(2) << "\n";
    return kOk;
  }

  for (const auto& cfg : configs) {
    try {
      nlilab::RunManifest manifest;
      manifest.config = cfg;
      manifest.overrides = overrides.to_json();
      manifest.workers = jobs;
      manifest.started_utc = nlilab::utc_now();
      const auto t0 = std::chrono::steady_clock::now();
      const auto result = nlilab::run_campaign(cfg, jobs);
      manifest.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      const auto files = nlilab::write_campaign_outputs(out, result, manifest);
      std::cout << cfg.label << ": wrote";
      for (const auto& f : files) std::cout << " " << (out / f).string();
      std::cout << "\n";
      for (const auto& d : result.diagnostics) std::cerr << "warning: " << d << "\n";
    } catch (const nlilab::ConfigError& e) {
      write_failure(out, "configuration", cfg.label + ": " + e.what(), kConfig);
      return kConfig;
    } catch (const nlilab::NumericalError& e) {
      write_failure(out, "numerical-accuracy", cfg.label + ": " + e.what(), kNumerical);
      return kNumerical;
    } catch (const std::exception& e) {
      write_failure(out, "internal", cfg.label + ": " + e.what(), kInternal);
      return kInternal;
    }
  }
  return kOk;
}
