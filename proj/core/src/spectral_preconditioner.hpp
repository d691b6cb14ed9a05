#pragma once

#include <fftw3.h>

#include <cstddef>
#include <vector>

namespace cellres::detail {

/// Inverse of the constant-coefficient periodic 5-point Laplacian, applied with a
/// real FFT. The constant mode is mapped to zero, so outputs are mean-free.
///
/// One instance per solve: the scratch buffers make apply() non-reentrant.
class SpectralPreconditioner {
 public:
  SpectralPreconditioner(int n1, int n2, double h1, double h2, double scale);
  ~SpectralPreconditioner();
  SpectralPreconditioner(const SpectralPreconditioner&) = delete;
  SpectralPreconditioner& operator=(const SpectralPreconditioner&) = delete;

  void apply(const double* in, double* out);

 private:
  int n1_;
  int n2_;
  std::size_t real_size_;
  std::size_t complex_size_;
  double* real_ = nullptr;
  fftw_complex* spectrum_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
  std::vector<double> inverse_symbol_;
};

}  // namespace cellres::detail
