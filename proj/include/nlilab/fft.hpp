#pragma once

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <span>

#include "nlilab/common.hpp"

namespace nlilab {

namespace detail {
// FFTW's planner is not re-entrant; execution is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

/// In-place complex FFT of a fixed length. Forward is unnormalized, inverse
/// carries the 1/n factor so that inverse(forward(x)) == x.
class Fft {
 public:
  explicit Fft(std::size_t n) : n_(n) {
    std::lock_guard lock(detail::fftw_planner_mutex());
    auto* scratch = fftw_alloc_complex(n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fwd_ = fftw_plan_dft_1d(static_cast<int>(n), scratch, scratch, FFTW_FORWARD, flags);
    inv_ = fftw_plan_dft_1d(static_cast<int>(n), scratch, scratch, FFTW_BACKWARD, flags);
    fftw_free(scratch);
    if (fwd_ == nullptr || inv_ == nullptr) throw Error("FFTW planning failed");
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;
  ~Fft() {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(inv_);
  }

  std::size_t size() const { return n_; }

  void forward(std::span<cplx> data) const {
    check(data);
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(fwd_, p, p);
  }

  void inverse(std::span<cplx> data) const {
    check(data);
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(inv_, p, p);
    const double scale = 1.0 / static_cast<double>(n_);
    for (auto& v : data) v *= scale;
  }

 private:
  void check(std::span<cplx> data) const {
    if (data.size() != n_) throw Error("FFT length mismatch");
  }

  std::size_t n_;
  fftw_plan fwd_ = nullptr;
  fftw_plan inv_ = nullptr;
};

/// Shared plan for length `n`; plans are created once and live for the process.
inline const Fft& fft_plan(std::size_t n) {
  // The planner mutex must outlive the cache (destroyed in reverse order).
  (void)detail::fftw_planner_mutex();
  static std::mutex m;
  static std::map<std::size_t, std::unique_ptr<Fft>> cache;
  std::lock_guard lock(m);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Fft>(n);
  return *slot;
}

}  // namespace nlilab
