#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <limits>

#include "nlilab/config.hpp"

#ifndef NLILAB_VERSION
#define NLILAB_VERSION "0.0.0"
#endif

namespace nlilab {

inline constexpr const char* kVersion = NLILAB_VERSION;

namespace detail {

inline std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double to_db_or_nan(double v) {
  if (v > 0.0) return units::linear_to_db(v);
  if (v == 0.0) return -std::numeric_limits<double>::infinity();
  return std::numeric_limits<double>::quiet_NaN();
}

inline json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace detail

/// One row per (contributor, span); dB columns are 10·log10 of the linear values.
inline std::string ledgers_csv(const CampaignResult& r) {
  std::string out = "contributor,span_index,inverse_snr_linear,inverse_snr_dB,increment_dB\n";
  for (const auto* l : r.ledgers()) {
    const auto inc = increments(*l);
    for (std::size_t i = 1; i <= l->n_spans(); ++i) {
      out += l->contributor + "," + std::to_string(i) + "," + detail::fmt_double(l->q(i)) + "," +
             detail::fmt_double(detail::to_db_or_nan(l->q(i))) + "," +
             detail::fmt_double(detail::to_db_or_nan(inc[i - 1])) + "\n";
    }
  }
  return out;
}

inline json ledger_json(const AccumulationLedger& l) {
  json inc = json::array();
  for (double d : increments(l)) inc.push_back(d);
  return {{"contributor", l.contributor}, {"inverse_snr", l.inverse_snr}, {"increments", inc}};
}

inline json result_to_json(const CampaignResult& r) {
  json ledgers = json::array();
  for (const auto* l : r.ledgers()) ledgers.push_back(ledger_json(*l));
  auto opt = [](const auto& o) { return o ? json(*o) : json(nullptr); };
  return {{"label", r.label},
          {"pump_indices", r.pump_indices},
          {"ledgers", ledgers},
          {"dominance_span_accumulated", opt(r.dominance_span)},
          {"dominance_span_increments", opt(r.dominance_span_increments)},
          {"coherence_exponent_spm", opt(r.coherence_spm)},
          {"coherence_exponent_xpm", opt(r.coherence_xpm)},
          {"diagnostics", r.diagnostics}};
}

/// Everything needed to reproduce a run, minus the wall-clock fields.
struct RunManifest {
  CampaignConfig config;
  json overrides = json::object();
  std::string started_utc;
  double elapsed_s = 0.0;
  std::size_t workers = 1;
  std::vector<std::string> outputs;

  json to_json() const {
    json seeds = json::object();
    for (const auto& ch : build_channels(config.plan, config.numerics.seed))
      seeds[ScenarioLabel::signed_index(ch.index)] = ch.seed;
    const auto& span = config.link.spans.front();
    return {{"software", {{"name", "nlilab"}, {"version", kVersion}}},
            {"config", config_to_json(config)},
            {"overrides", overrides},
            {"seeds", {{"base", config.numerics.seed}, {"per_channel", seeds}}},
            {"numerics",
             {{"symbols", config.numerics.n_symbols},
              {"samples_per_symbol", config.resolved_sps()},
              {"sample_rate_ghz", config.sample_rate_ghz()},
              {"step_policy", detail::step_policy_json(span.step_policy)},
              {"split_step", "symmetrized, Manakov 8/9, loss folded into effective sub-step"},
              {"pulse_shaping", {{"filter", "root-raised-cosine"}, {"rolloff", config.plan.rolloff}}},
              {"estimator", "data-aided, constant complex scale removal, polarization-averaged"},
              {"strict", config.numerics.strict}}},
            {"wall_clock", {{"started_utc", started_utc}, {"elapsed_s", elapsed_s}}},
            {"workers", workers},
            {"outputs", outputs}};
  }
};

inline std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---------------------------------------------------------------------------
// SVG

struct Series {
  std::string name;
  std::string color;
  std::vector<double> y;  // NaN entries are skipped
  bool dashed = false;
};

/// Minimal line chart over span index 1..N.
inline std::string svg_line_chart(const std::string& title, const std::string& y_label,
                                  const std::vector<Series>& series, const std::string& provenance) {
  const double w = 720, h = 440, left = 70, right = 190, top = 40, bottom = 50;
  const double pw = w - left - right, ph = h - top - bottom;
  std::size_t n = 1;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : series) {
    n = std::max(n, s.y.size());
    for (double v : s.y)
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
  }
  if (!std::isfinite(lo)) lo = 0, hi = 1;
  lo = std::floor(lo - 0.5);
  hi = std::ceil(hi + 0.5);
  auto px = [&](double i) { return left + (n > 1 ? (i - 1) / double(n - 1) : 0.5) * pw; };
  auto py = [&](double v) { return top + (hi - v) / (hi - lo) * ph; };

  std::string s;
  char buf[256];
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<!-- " + provenance + " -->\n";
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" "
                "font-family=\"sans-serif\" font-size=\"12\">\n", w, h);
  s += buf;
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"22\" font-size=\"14\">", left);
  s += buf + title + "</text>\n";
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"black\"/>\n",
                left, top, pw, ph);
  s += buf;
  const double step = (hi - lo) > 12 ? 2.0 : 1.0;
  for (double v = lo; v <= hi + 1e-9; v += step) {
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%g\" y1=\"%.2f\" x2=\"%g\" y2=\"%.2f\" stroke=\"#ddd\"/>"
                  "<text x=\"%g\" y=\"%.2f\" text-anchor=\"end\">%g</text>\n",
                  left, py(v), left + pw, py(v), left - 6, py(v) + 4, v);
    s += buf;
  }
  for (std::size_t i = 1; i <= n; ++i) {
    std::snprintf(buf, sizeof buf, "<text x=\"%.2f\" y=\"%g\" text-anchor=\"middle\">%zu</text>\n",
                  px(double(i)), top + ph + 18, i);
    s += buf;
  }
  std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\">span index</text>\n",
                left + pw / 2, h - 10);
  s += buf;
  std::snprintf(buf, sizeof buf,
                "<text transform=\"translate(18,%g) rotate(-90)\" text-anchor=\"middle\">", top + ph / 2);
  s += buf + y_label + "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& se = series[k];
    std::string pts;
    for (std::size_t i = 0; i < se.y.size(); ++i) {
      if (!std::isfinite(se.y[i])) continue;
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(double(i + 1)), py(se.y[i]));
      pts += buf;
    }
    s += "<polyline fill=\"none\" stroke=\"" + se.color + "\" stroke-width=\"2\"" +
         (se.dashed ? " stroke-dasharray=\"6,4\"" : "") + " points=\"" + pts + "\"/>\n";
    const double ly = top + 10 + 18.0 * double(k);
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"%s\" stroke-width=\"2\"%s/>"
                  "<text x=\"%g\" y=\"%g\">",
                  left + pw + 12, ly, left + pw + 36, ly, se.color.c_str(),
                  se.dashed ? " stroke-dasharray=\"6,4\"" : "", left + pw + 42, ly + 4);
    s += buf + se.name + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

namespace detail {

inline std::vector<double> snr_db(const std::vector<double>& inverse) {
  std::vector<double> out;
  for (double q : inverse) out.push_back(q > 0.0 ? -units::linear_to_db(q) : std::nan(""));
  return out;
}

inline std::string provenance(const CampaignResult& r, const CampaignConfig& c) {
  return "nlilab " + std::string(kVersion) + " | campaign " + r.label + " | config " +
         config_to_json(c).dump();
}

}  // namespace detail

/// SNR_NL accumulation: full spectrum against the superposition, with the analytic XPM reference.
inline std::string accumulation_svg(const CampaignResult& r, const CampaignConfig& c) {
  return svg_line_chart(
      "SNR_NL accumulation: " + r.label, "SNR_NL [dB]",
      {{"full spectrum", "#1f77b4", detail::snr_db(r.full_spectrum.inverse_snr)},
       {"superposition", "#d62728", detail::snr_db(r.superposition.inverse_snr), true},
       {"SPM (probe only)", "#2ca02c", detail::snr_db(r.spm.inverse_snr)},
       {"XPM (sum of pumps)", "#9467bd", detail::snr_db(r.xpm_total.inverse_snr)},
       {"analytic XPM", "#7f7f7f", detail::snr_db(r.analytic_total.inverse_snr), true}},
      detail::provenance(r, c));
}

/// Span-by-span increments of SNR_NL for the superposition, SPM, XPM and analytic reference.
inline std::string increments_svg(const CampaignResult& r, const CampaignConfig& c) {
  return svg_line_chart(
      "SNR_NL span increments: " + r.label, "ΔSNR_NL [dB]",
      {{"superposition", "#d62728", detail::snr_db(increments(r.superposition))},
       {"SPM", "#2ca02c", detail::snr_db(increments(r.spm))},
       {"XPM (sum of pumps)", "#9467bd", detail::snr_db(increments(r.xpm_total))},
       {"analytic XPM", "#7f7f7f", detail::snr_db(increments(r.analytic_total)), true}},
      detail::provenance(r, c));
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
  if (!out) throw Error("write failed: " + p.string());
}

/// Writes <label>.csv, <label>.json (result + manifest) and the two SVG plots.
/// Returns the written file names.
inline std::vector<std::string> write_campaign_outputs(const std::filesystem::path& dir,
                                                       const CampaignResult& r,
                                                       RunManifest manifest) {
  std::filesystem::create_directories(dir);
  const std::string base = r.label;
  manifest.outputs = {base + ".csv", base + ".json", base + "_accumulation.svg",
                      base + "_increments.svg"};
  write_text(dir / manifest.outputs[0], ledgers_csv(r));
  write_text(dir / manifest.outputs[2], accumulation_svg(r, manifest.config));
  write_text(dir / manifest.outputs[3], increments_svg(r, manifest.config));
  json doc = {{"manifest", manifest.to_json()}, {"result", result_to_json(r)}};
  write_text(dir / manifest.outputs[1], doc.dump(2) + "\n");
  return manifest.outputs;
}

}  // namespace nlilab
