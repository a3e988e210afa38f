#include "noonring/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace noonring {

struct FourierTransform::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  ~Plans() {
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

namespace {

// FFTW planning is not thread-safe; execution with fftw_execute_dft is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::shared_ptr<const FourierTransform::Plans> plans_for(int size) {
  static std::map<int, std::shared_ptr<const FourierTransform::Plans>> cache;
  std::lock_guard lock(planner_mutex());
  if (auto it = cache.find(size); it != cache.end()) return it->second;

  auto plans = std::make_shared<FourierTransform::Plans>();
  std::vector<std::complex<double>> scratch(static_cast<std::size_t>(size));
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plans->forward = fftw_plan_dft_1d(size, buf, buf, FFTW_FORWARD, flags);
  plans->backward = fftw_plan_dft_1d(size, buf, buf, FFTW_BACKWARD, flags);
  if (!plans->forward || !plans->backward) {
    throw std::runtime_error("FFTW planning failed");
  }
  cache.emplace(size, plans);
  return plans;
}

}  // namespace

FourierTransform::FourierTransform(int size) : size_(size), plans_(plans_for(size)) {}

void FourierTransform::forward(std::span<std::complex<double>> data) const {
  if (static_cast<int>(data.size()) != size_) throw std::invalid_argument("FFT length mismatch");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans_->forward, buf, buf);
}

void FourierTransform::backward(std::span<std::complex<double>> data) const {
  if (static_cast<int>(data.size()) != size_) throw std::invalid_argument("FFT length mismatch");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans_->backward, buf, buf);
}

}  // namespace noonring
