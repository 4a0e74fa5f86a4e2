#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace cqft {

/// In-place batch of equal-length complex DFTs over one aligned buffer.
/// Transforms are unnormalized: forward uses exp(-2 pi i k j / n), backward
/// exp(+2 pi i k j / n). Plans use FFTW_ESTIMATE so the arithmetic depends
/// only on (length, batch), never on timing.
class FourierBatch {
 public:
  FourierBatch(std::size_t length, std::size_t batch);
  ~FourierBatch();

  FourierBatch(const FourierBatch&) = delete;
  FourierBatch& operator=(const FourierBatch&) = delete;
  FourierBatch(FourierBatch&& other) noexcept;
  FourierBatch& operator=(FourierBatch&& other) noexcept;

  std::size_t length() const { return length_; }
  std::size_t batch() const { return batch_; }

  std::span<std::complex<double>> data() { return {buffer_, length_ * batch_}; }
  std::span<std::complex<double>> row(std::size_t r) { return {buffer_ + r * length_, length_}; }

  void forward();
  void backward();

 private:
  void release() noexcept;

  std::size_t length_ = 0;
  std::size_t batch_ = 0;
  std::complex<double>* buffer_ = nullptr;
  void* forward_plan_ = nullptr;
  void* backward_plan_ = nullptr;
};

}  // namespace cqft
