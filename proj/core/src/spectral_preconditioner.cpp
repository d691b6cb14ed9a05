#include "spectral_preconditioner.hpp"

#include <cmath>
#include <mutex>
#include <new>
#include <numbers>

namespace cellres::detail {

namespace {

// The FFTW planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

SpectralPreconditioner::SpectralPreconditioner(int n1, int n2, double h1, double h2,
                                               double scale)
    : n1_(n1), n2_(n2) {
  const int half = n2 / 2 + 1;
  real_size_ = static_cast<std::size_t>(n1) * static_cast<std::size_t>(n2);
  complex_size_ = static_cast<std::size_t>(n1) * static_cast<std::size_t>(half);
  real_ = fftw_alloc_real(real_size_);
  spectrum_ = fftw_alloc_complex(complex_size_);
  if (!real_ || !spectrum_) {
    fftw_free(real_);
    fftw_free(spectrum_);
    throw std::bad_alloc();
  }
  {
    // FFTW_ESTIMATE keeps plan choice independent of timing, so results are reproducible.
    std::lock_guard lock(planner_mutex());
    forward_ = fftw_plan_dft_r2c_2d(n1, n2, real_, spectrum_, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_c2r_2d(n1, n2, spectrum_, real_, FFTW_ESTIMATE);
  }

  inverse_symbol_.resize(complex_size_);
  const double pi = std::numbers::pi;
  const double norm = 1.0 / static_cast<double>(real_size_);
  for (int k1 = 0; k1 < n1; ++k1) {
    const double s1 = std::sin(pi * k1 / n1);
    const double l1 = 4.0 * s1 * s1 / (h1 * h1);
    for (int k2 = 0; k2 < half; ++k2) {
      const double s2 = std::sin(pi * k2 / n2);
      const double l2 = 4.0 * s2 * s2 / (h2 * h2);
      const double lambda = scale * (l1 + l2);
      inverse_symbol_[static_cast<std::size_t>(k1) * half + k2] =
          (k1 == 0 && k2 == 0) ? 0.0 : norm / lambda;
    }
  }
}

SpectralPreconditioner::~SpectralPreconditioner() {
  {
    std::lock_guard lock(planner_mutex());
    if (forward_) fftw_destroy_plan(forward_);
    if (backward_) fftw_destroy_plan(backward_);
  }
  fftw_free(real_);
  fftw_free(spectrum_);
}

void SpectralPreconditioner::apply(const double* in, double* out) {
  for (std::size_t i = 0; i < real_size_; ++i) real_[i] = in[i];
  fftw_execute(forward_);
  for (std::size_t i = 0; i < complex_size_; ++i) {
    spectrum_[i][0] *= inverse_symbol_[i];
    spectrum_[i][1] *= inverse_symbol_[i];
  }
  fftw_execute(backward_);
  for (std::size_t i = 0; i < real_size_; ++i) out[i] = real_[i];
}

}  // namespace cellres::detail
