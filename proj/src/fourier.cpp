#include "cqft/fourier.hpp"

#include <fftw3.h>

#include <mutex>
#include <new>
#include <utility>

namespace cqft {

namespace {

// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

FourierBatch::FourierBatch(std::size_t length, std::size_t batch) : length_(length), batch_(batch) {
  const std::size_t total = length * batch;
  buffer_ = static_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * total));
  if (buffer_ == nullptr) throw std::bad_alloc();
  for (std::size_t i = 0; i < total; ++i) buffer_[i] = 0.0;

  auto* raw = reinterpret_cast<fftw_complex*>(buffer_);
  int n[1] = {static_cast<int>(length)};
  const int howmany = static_cast<int>(batch);
  const int dist = static_cast<int>(length);
  std::lock_guard lock(planner_mutex());
  forward_plan_ = fftw_plan_many_dft(1, n, howmany, raw, nullptr, 1, dist, raw, nullptr, 1, dist,
                                     FFTW_FORWARD, FFTW_ESTIMATE);
  backward_plan_ = fftw_plan_many_dft(1, n, howmany, raw, nullptr, 1, dist, raw, nullptr, 1, dist,
                                      FFTW_BACKWARD, FFTW_ESTIMATE);
}

FourierBatch::~FourierBatch() { release(); }

FourierBatch::FourierBatch(FourierBatch&& other) noexcept
    : length_(std::exchange(other.length_, 0)),
      batch_(std::exchange(other.batch_, 0)),
      buffer_(std::exchange(other.buffer_, nullptr)),
      forward_plan_(std::exchange(other.forward_plan_, nullptr)),
      backward_plan_(std::exchange(other.backward_plan_, nullptr)) {}

FourierBatch& FourierBatch::operator=(FourierBatch&& other) noexcept {
  if (this != &other) {
    release();
    length_ = std::exchange(other.length_, 0);
    batch_ = std::exchange(other.batch_, 0);
    buffer_ = std::exchange(other.buffer_, nullptr);
    forward_plan_ = std::exchange(other.forward_plan_, nullptr);
    backward_plan_ = std::exchange(other.backward_plan_, nullptr);
  }
  return *this;
}

void FourierBatch::forward() { fftw_execute(static_cast<fftw_plan>(forward_plan_)); }

void FourierBatch::backward() { fftw_execute(static_cast<fftw_plan>(backward_plan_)); }

void FourierBatch::release() noexcept {
  {
    std::lock_guard lock(planner_mutex());
    if (forward_plan_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    if (backward_plan_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
  }
  forward_plan_ = backward_plan_ = nullptr;
  if (buffer_ != nullptr) fftw_free(buffer_);
  buffer_ = nullptr;
}

}  // namespace cqft
