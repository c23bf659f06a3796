#pragma once

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "nlilab/campaign.hpp"

namespace nlilab {

using json = nlohmann::json;

namespace detail {

/// Walks a JSON object, rejecting unknown keys and type/range violations with the field path.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError("config: '" + path_ + "' must be an object");
  }

  void allow(std::initializer_list<const char*> keys) {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, _] : j_.items())
      if (!ok.count(k)) throw ConfigError("config: unknown field '" + qualify(k) + "'");
  }

  bool has(const char* key) const { return j_.contains(key); }
  const json& at(const char* key) const { return j_.at(key); }
  std::string qualify(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  template <typename Pred>
  void number(const char* key, double& out, Pred ok, const char* constraint) const {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_number()) throw ConfigError("config: '" + qualify(key) + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d) || !ok(d))
      throw ConfigError("config: '" + qualify(key) + "' must be " + constraint);
    out = d;
  }

  template <typename T, typename Pred>
  void integer(const char* key, T& out, Pred ok, const char* constraint) const {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_number_integer())
      throw ConfigError("config: '" + qualify(key) + "' must be an integer");
    const auto d = v.get<long long>();
    if (!ok(d)) throw ConfigError("config: '" + qualify(key) + "' must be " + constraint);
    out = static_cast<T>(d);
  }

  void boolean(const char* key, bool& out) const {
    if (!has(key)) return;
    if (!j_.at(key).is_boolean())
      throw ConfigError("config: '" + qualify(key) + "' must be a boolean");
    out = j_.at(key).get<bool>();
  }

  void string(const char* key, std::string& out) const {
    if (!has(key)) return;
    if (!j_.at(key).is_string()) throw ConfigError("config: '" + qualify(key) + "' must be a string");
    out = j_.at(key).get<std::string>();
  }

  void modulation(const char* key, Modulation& out) const {
    std::string s(to_string(out));
    string(key, s);
    try {
      out = parse_modulation(s);
    } catch (const ConfigError& e) {
      throw ConfigError("config: '" + qualify(key) + "': " + e.what());
    }
  }

 private:
  const json& j_;
  std::string path_;
};

inline auto positive = [](double v) { return v > 0.0; };
inline auto non_negative = [](double v) { return v >= 0.0; };
inline auto any_value = [](double) { return true; };

inline json step_policy_json(const StepPolicy& p) {
  if (const auto* f = std::get_if<FixedStep>(&p)) return {{"kind", "fixed"}, {"dz_km", f->dz_km}};
  return {{"kind", "log-distributed"}, {"steps", std::get<LogDistributedSteps>(p).n_steps}};
}

inline StepPolicy read_step_policy(const json& j, const std::string& path, StepPolicy current) {
  ObjectReader r(j, path);
  r.allow({"kind", "steps", "dz_km"});
  std::string kind = std::holds_alternative<FixedStep>(current) ? "fixed" : "log-distributed";
  r.string("kind", kind);
  if (kind == "fixed") {
    if (r.has("steps")) throw ConfigError("config: '" + r.qualify("steps") + "' requires kind log-distributed");
    FixedStep f = std::holds_alternative<FixedStep>(current) ? std::get<FixedStep>(current) : FixedStep{};
    r.number("dz_km", f.dz_km, positive, "> 0");
    return f;
  }
  if (kind == "log-distributed") {
    if (r.has("dz_km")) throw ConfigError("config: '" + r.qualify("dz_km") + "' requires kind fixed");
    LogDistributedSteps l = std::holds_alternative<LogDistributedSteps>(current)
                                ? std::get<LogDistributedSteps>(current)
                                : LogDistributedSteps{};
    r.integer("steps", l.n_steps, [](long long v) { return v >= 1; }, ">= 1");
    return l;
  }
  throw ConfigError("config: '" + r.qualify("kind") + "' must be 'fixed' or 'log-distributed'");
}

inline void read_span_fields(const ObjectReader& r, SpanConfig& s) {
  r.number("span_length_km", s.length_km, positive, "> 0");
  r.number("attenuation_db_km", s.attenuation_db_km, non_negative, ">= 0");
  r.number("dispersion_ps_nm_km", s.dispersion_ps_nm_km, any_value, "finite");
  r.number("gamma_per_w_km", s.gamma_per_w_km, non_negative, ">= 0");
  if (r.has("step_policy"))
    s.step_policy = read_step_policy(r.at("step_policy"), r.qualify("step_policy"), s.step_policy);
}

inline json span_fields_json(const SpanConfig& s) {
  return {{"span_length_km", s.length_km},
          {"attenuation_db_km", s.attenuation_db_km},
          {"dispersion_ps_nm_km", s.dispersion_ps_nm_km},
          {"gamma_per_w_km", s.gamma_per_w_km},
          {"step_policy", step_policy_json(s.step_policy)}};
}

inline bool same_span(const SpanConfig& a, const SpanConfig& b) {
  return span_fields_json(a) == span_fields_json(b);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Presets

inline std::vector<std::string> preset_names() { return {"widespread-32g", "highrate-64g"}; }

/// Built-in scenarios: 32 GBaud on a 37.5 GHz grid and 64 GBaud on a 75 GHz grid,
/// both over D = 16.7 ps/(nm km) fiber with a PM-QPSK channel under test.
inline CampaignConfig preset(std::string_view name) {
  CampaignConfig c;
  c.plan.n_channels = 5;
  c.plan.power_dbm = 0.0;
  c.plan.rolloff = 0.1;
  c.plan.cut_modulation = Modulation::PmQpsk;
  c.plan.pump_modulation = Modulation::Gaussian;
  c.link = LinkConfig::uniform(SpanConfig{80.0, 0.2, 16.7, 1.27, LogDistributedSteps{200}}, 10);
  c.numerics = Numerics{8192, 0, 1, false};
  if (name == "widespread-32g") {
    c.plan.symbol_rate_gbaud = 32.0;
    c.plan.spacing_ghz = 37.5;
  } else if (name == "highrate-64g") {
    c.plan.symbol_rate_gbaud = 64.0;
    c.plan.spacing_ghz = 75.0;
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "'");
  }
  c.label = std::string(name);
  return c;
}

// ---------------------------------------------------------------------------
// JSON <-> CampaignConfig

/// Fully resolved configuration; loading the output reproduces the same config.
inline json config_to_json(const CampaignConfig& c) {
  json channels = {{"count", c.plan.n_channels},
                   {"symbol_rate_gbaud", c.plan.symbol_rate_gbaud},
                   {"spacing_ghz", c.plan.spacing_ghz},
                   {"power_dbm", c.plan.power_dbm},
                   {"rolloff", c.plan.rolloff},
                   {"cut_modulation", to_string(c.plan.cut_modulation)},
                   {"pump_modulation", to_string(c.plan.pump_modulation)},
                   {"cut_predistortion_ps_nm", c.plan.cut_predistortion_ps_nm},
                   {"pump_predistortion_ps_nm", c.plan.pump_predistortion_ps_nm}};
  json link;
  const bool uniform = std::all_of(c.link.spans.begin(), c.link.spans.end(),
                                   [&](const SpanConfig& s) { return detail::same_span(s, c.link.spans.front()); });
  if (uniform && !c.link.spans.empty()) {
    link = detail::span_fields_json(c.link.spans.front());
    link["spans"] = c.link.spans.size();
  } else {
    link["spans"] = json::array();
    for (const auto& s : c.link.spans) link["spans"].push_back(detail::span_fields_json(s));
  }
  if (c.link.amplifier.kind == AmplifierKind::ExactPowerRestore)
    link["amplifier"] = {{"policy", "exact-power-restore"}};
  else
    link["amplifier"] = {{"policy", "fixed-gain"}, {"gain_db", c.link.amplifier.gain_db}};
  json numerics = {{"symbols", c.numerics.n_symbols},
                   {"samples_per_symbol", c.resolved_sps()},
                   {"seed", c.numerics.seed},
                   {"strict", c.numerics.strict}};
  return {{"label", c.label}, {"channels", channels}, {"link", link}, {"numerics", numerics}};
}

/// Parses one campaign object. Unset fields keep the base (preset or defaults).
inline CampaignConfig config_from_json(const json& j) {
  detail::ObjectReader top(j, "");
  top.allow({"label", "preset", "channels", "link", "numerics"});
  std::string preset_name = "widespread-32g";
  top.string("preset", preset_name);
  CampaignConfig c = preset(preset_name);
  top.string("label", c.label);

  if (top.has("channels")) {
    detail::ObjectReader r(top.at("channels"), "channels");
    r.allow({"count", "symbol_rate_gbaud", "spacing_ghz", "power_dbm", "rolloff", "cut_modulation",
             "pump_modulation", "cut_predistortion_ps_nm", "pump_predistortion_ps_nm"});
    r.integer("count", c.plan.n_channels, [](long long v) { return v >= 1; }, ">= 1");
    r.number("symbol_rate_gbaud", c.plan.symbol_rate_gbaud, detail::positive, "> 0");
    r.number("spacing_ghz", c.plan.spacing_ghz, detail::positive, "> 0");
    r.number("power_dbm", c.plan.power_dbm, detail::any_value, "finite");
    r.number("rolloff", c.plan.rolloff, [](double v) { return v >= 0.0 && v <= 1.0; }, "in [0, 1]");
    r.modulation("cut_modulation", c.plan.cut_modulation);
    r.modulation("pump_modulation", c.plan.pump_modulation);
    r.number("cut_predistortion_ps_nm", c.plan.cut_predistortion_ps_nm, detail::any_value, "finite");
    r.number("pump_predistortion_ps_nm", c.plan.pump_predistortion_ps_nm, detail::any_value, "finite");
    if (c.plan.n_channels > 1 && c.plan.spacing_ghz < c.plan.symbol_rate_gbaud)
      throw ConfigError("config: 'channels.spacing_ghz' must be >= symbol_rate_gbaud (non-overlapping grid)");
  }

  if (top.has("link")) {
    detail::ObjectReader r(top.at("link"), "link");
    r.allow({"spans", "span_length_km", "attenuation_db_km", "dispersion_ps_nm_km", "gamma_per_w_km",
             "step_policy", "amplifier"});
    SpanConfig base = c.link.spans.front();
    detail::read_span_fields(r, base);
    std::size_t n = c.link.n_spans();
    if (r.has("spans") && r.at("spans").is_array()) {
      std::vector<SpanConfig> spans;
      const auto& arr = r.at("spans");
      if (arr.empty()) throw ConfigError("config: 'link.spans' must not be empty");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        detail::ObjectReader sr(arr[i], "link.spans[" + std::to_string(i) + "]");
        sr.allow({"span_length_km", "attenuation_db_km", "dispersion_ps_nm_km", "gamma_per_w_km",
                  "step_policy"});
        SpanConfig s = base;
        detail::read_span_fields(sr, s);
        spans.push_back(s);
      }
      c.link.spans = std::move(spans);
    } else {
      r.integer("spans", n, [](long long v) { return v >= 1; }, ">= 1 (or an array of spans)");
      c.link.spans.assign(n, base);
    }
    if (r.has("amplifier")) {
      detail::ObjectReader ar(r.at("amplifier"), "link.amplifier");
      ar.allow({"policy", "gain_db"});
      std::string policy = "exact-power-restore";
      ar.string("policy", policy);
      if (policy == "exact-power-restore") {
        if (ar.has("gain_db"))
          throw ConfigError("config: 'link.amplifier.gain_db' requires policy fixed-gain");
        c.link.amplifier = {AmplifierKind::ExactPowerRestore, 0.0};
      } else if (policy == "fixed-gain") {
        if (!ar.has("gain_db")) throw ConfigError("config: 'link.amplifier.gain_db' is required for fixed-gain");
        double g = 0.0;
        ar.number("gain_db", g, detail::any_value, "finite");
        c.link.amplifier = {AmplifierKind::FixedGain, g};
      } else {
        throw ConfigError("config: 'link.amplifier.policy' must be 'exact-power-restore' or 'fixed-gain'");
      }
    }
  }

  if (top.has("numerics")) {
    detail::ObjectReader r(top.at("numerics"), "numerics");
    r.allow({"symbols", "samples_per_symbol", "seed", "strict"});
    r.integer("symbols", c.numerics.n_symbols,
              [](long long v) { return v >= 1024 && is_power_of_two(static_cast<std::size_t>(v)); },
              "a power of two >= 1024");
    r.integer("samples_per_symbol", c.numerics.samples_per_symbol,
              [](long long v) { return v == 0 || (v >= 2 && is_power_of_two(static_cast<std::size_t>(v))); },
              "0 (automatic) or a power of two >= 2");
    r.integer("seed", c.numerics.seed, [](long long v) { return v >= 0; }, ">= 0");
    r.boolean("strict", c.numerics.strict);
  }
  return c;
}

/// Campaigns described by a document: a single campaign object, {"campaigns": [...]},
/// or a result file carrying {"manifest": {"config": ...}}.
inline std::vector<CampaignConfig> configs_from_json(const json& doc) {
  std::vector<CampaignConfig> out;
  if (doc.is_object() && doc.contains("manifest")) {
    const auto& m = doc.at("manifest");
    if (!m.is_object() || !m.contains("config")) throw ConfigError("config: manifest has no 'config'");
    out.push_back(config_from_json(m.at("config")));
  } else if (doc.is_object() && doc.contains("campaigns")) {
    if (doc.size() != 1) throw ConfigError("config: 'campaigns' must be the only top-level field");
    const auto& arr = doc.at("campaigns");
    if (!arr.is_array() || arr.empty()) throw ConfigError("config: 'campaigns' must be a non-empty array");
    for (const auto& c : arr) out.push_back(config_from_json(c));
  } else {
    out.push_back(config_from_json(doc));
  }
  for (const auto& c : out) validate_campaign(c);
  return out;
}

/// Reads and validates a configuration file. Grid and aliasing violations are
/// reported here, before any propagation.
inline std::vector<CampaignConfig> load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: '" + path + "' is not valid JSON: " + e.what());
  }
  return configs_from_json(doc);
}

// ---------------------------------------------------------------------------
// Overrides from the command line

struct Overrides {
  std::optional<std::size_t> spans;
  std::optional<std::size_t> channels;
  std::optional<std::size_t> symbols;
  std::optional<std::uint64_t> seed;
  std::optional<Modulation> pump_modulation;
  bool strict = false;

  json to_json() const {
    json j = json::object();
    if (spans) j["spans"] = *spans;
    if (channels) j["channels"] = *channels;
    if (symbols) j["symbols"] = *symbols;
    if (seed) j["seed"] = *seed;
    if (pump_modulation) j["pump_modulation"] = to_string(*pump_modulation);
    if (strict) j["strict"] = true;
    return j;
  }
};

inline void apply_overrides(CampaignConfig& c, const Overrides& o) {
  if (o.spans) {
    if (*o.spans < 1) throw ConfigError("--spans must be at least 1");
    const SpanConfig s = c.link.spans.front();
    c.link.spans.resize(*o.spans, s);
  }
  if (o.channels) {
    if (*o.channels < 1) throw ConfigError("--channels must be at least 1");
    c.plan.n_channels = *o.channels;
  }
  if (o.symbols) {
    if (*o.symbols < 1024 || !is_power_of_two(*o.symbols))
      throw ConfigError("--symbols must be a power of two >= 1024");
    c.numerics.n_symbols = *o.symbols;
  }
  if (o.seed) c.numerics.seed = *o.seed;
  if (o.pump_modulation) c.plan.pump_modulation = *o.pump_modulation;
  if (o.strict) c.numerics.strict = true;
  validate_campaign(c);
}

}  // namespace nlilab
