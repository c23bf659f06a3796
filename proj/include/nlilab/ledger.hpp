#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlilab/common.hpp"

namespace nlilab {

/// Per-span inverse nonlinear SNR of one contributor. Entry i-1 holds
/// q_i = 1/SNR_NL after span i; q_0 = 0 is implicit.
struct AccumulationLedger {
  std::string contributor;
  std::vector<double> inverse_snr;

  std::size_t n_spans() const { return inverse_snr.size(); }
  /// q_i for i in 0..N.
  double q(std::size_t i) const { return i == 0 ? 0.0 : inverse_snr.at(i - 1); }
};

/// Warnings raised while deriving ledgers (e.g. clamped negative XPM).
using Diagnostics = std::vector<std::string>;

/// Equivalent dB tolerance expressed on linear inverse-SNR values.
inline double db_slack_factor(double db) { return units::db_to_linear(db); }

/// XPM of one pump: pump-probe ledger minus the probe-only (SPM) ledger.
/// Negative differences are clamped to zero and reported.
inline AccumulationLedger extract_xpm(const AccumulationLedger& pump_probe,
                                      const AccumulationLedger& probe_only,
                                      std::string contributor, Diagnostics* diagnostics = nullptr) {
  if (pump_probe.n_spans() != probe_only.n_spans())
    throw DomainError("extract_xpm: span counts differ");
  AccumulationLedger out{std::move(contributor), {}};
  out.inverse_snr.reserve(pump_probe.n_spans());
  for (std::size_t i = 0; i < pump_probe.n_spans(); ++i) {
    const double pp = pump_probe.inverse_snr[i];
    const double spm = probe_only.inverse_snr[i];
    double d = pp - spm;
    if (d < 0.0) {
      if (diagnostics) {
        const bool beyond = pp > 0.0 ? units::linear_to_db(spm / pp) > 0.02 : true;
        diagnostics->push_back(out.contributor + ": span " + std::to_string(i + 1) +
                               " negative XPM " + std::to_string(d) + " clamped to 0" +
                               (beyond ? " (beyond 0.02 dB)" : ""));
      }
      d = 0.0;
    }
    out.inverse_snr.push_back(d);
  }
  return out;
}

/// Pointwise sum of the SPM ledger and every per-pump XPM ledger.
inline AccumulationLedger superpose(const AccumulationLedger& spm,
                                    const std::vector<AccumulationLedger>& xpm,
                                    std::string contributor = "superposition") {
  AccumulationLedger out{std::move(contributor), spm.inverse_snr};
  for (const auto& l : xpm) {
    if (l.n_spans() != spm.n_spans()) throw DomainError("superpose: span counts differ");
    for (std::size_t i = 0; i < out.n_spans(); ++i) out.inverse_snr[i] += l.inverse_snr[i];
  }
  return out;
}

/// Sum of ledgers without a base term.
inline AccumulationLedger sum_ledgers(const std::vector<AccumulationLedger>& ledgers,
                                      std::string contributor, std::size_t n_spans) {
  AccumulationLedger zero{"", std::vector<double>(n_spans, 0.0)};
  return superpose(zero, ledgers, std::move(contributor));
}

/// Δq_i = q_i − q_{i−1}, i = 1..N.
inline std::vector<double> increments(const AccumulationLedger& ledger) {
  std::vector<double> out(ledger.n_spans());
  for (std::size_t i = 1; i <= ledger.n_spans(); ++i) out[i - 1] = ledger.q(i) - ledger.q(i - 1);
  return out;
}

/// ε in q_i ∝ i^(1+ε), least-squares over spans 2..N in log-log.
inline double fit_coherence_exponent(const AccumulationLedger& ledger) {
  const std::size_t n = ledger.n_spans();
  if (n < 8) throw DomainError("fit_coherence_exponent: at least 8 spans required");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto m = static_cast<double>(n - 1);
  for (std::size_t i = 2; i <= n; ++i) {
    const double q = ledger.q(i);
    if (!(q > 0.0)) throw DomainError("fit_coherence_exponent: non-positive ledger entry");
    const double x = std::log(static_cast<double>(i));
    const double y = std::log(q);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return slope - 1.0;
}

/// Smallest span index i with q_i(SPM) > q_i(XPM total), if any.
inline std::optional<std::size_t> dominance_crossing(const AccumulationLedger& spm,
                                                     const AccumulationLedger& xpm_total) {
  if (spm.n_spans() != xpm_total.n_spans())
    throw DomainError("dominance_crossing: span counts differ");
  for (std::size_t i = 1; i <= spm.n_spans(); ++i)
    if (spm.q(i) > xpm_total.q(i)) return i;
  return std::nullopt;
}

}  // namespace nlilab
