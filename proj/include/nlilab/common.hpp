#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlilab {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration, detected before or during setup.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A numerical-accuracy guard tripped (step convergence, overflow).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Mathematical precondition violated (negative inverse SNR, log of zero).
class DomainError : public Error {
 public:
  using Error::Error;
};

namespace units {

inline constexpr double kPi = std::numbers::pi;
/// Speed of light in nm/ps.
inline constexpr double kSpeedOfLight = 299792.458;
/// Reference carrier wavelength in nm.
inline constexpr double kCarrierWavelength = 1550.0;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_watt(double dbm) { return 1e-3 * db_to_linear(dbm); }
inline double watt_to_dbm(double w) { return linear_to_db(w * 1e3); }

/// dB/km power attenuation to natural-unit (1/km) power attenuation.
inline double attenuation_to_linear(double db_per_km) {
  return db_per_km * std::log(10.0) / 10.0;
}

/// β2 [ps²/km] from D [ps/(nm·km)] at the reference carrier.
inline double dispersion_to_beta2(double d_ps_nm_km) {
  return -d_ps_nm_km * kCarrierWavelength * kCarrierWavelength / (2.0 * kPi * kSpeedOfLight);
}

inline double beta2_to_dispersion(double beta2_ps2_km) {
  return -beta2_ps2_km * 2.0 * kPi * kSpeedOfLight /
         (kCarrierWavelength * kCarrierWavelength);
}

}  // namespace units

/// Signed frequency of DFT bin `j` for an `n`-point grid at `sample_rate` (any unit).
inline double bin_frequency(std::size_t j, std::size_t n, double sample_rate) {
  const auto sj = static_cast<double>(j);
  const auto sn = static_cast<double>(n);
  return (j < n / 2 ? sj : sj - sn) * sample_rate / sn;
}

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace nlilab
