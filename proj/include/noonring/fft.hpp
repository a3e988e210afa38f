#pragma once

#include <complex>
#include <memory>
#include <span>

namespace noonring {

/// In-place unnormalized 1D complex FFT of a fixed length, backed by FFTW.
/// Plans are created once per length and shared; execution is thread-safe.
class FourierTransform {
 public:
  explicit FourierTransform(int size);

  int size() const { return size_; }

  /// data[j] <- sum_m data[m] e^{-i 2 pi j m / M}
  void forward(std::span<std::complex<double>> data) const;
  /// data[m] <- sum_j data[j] e^{+i 2 pi j m / M}  (no 1/M factor)
  void backward(std::span<std::complex<double>> data) const;

  struct Plans;  // opaque FFTW plan pair

 private:
  int size_;
  std::shared_ptr<const Plans> plans_;
};

}  // namespace noonring
