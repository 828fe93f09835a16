#pragma once

#include <complex>
#include <cstddef>
#include <memory>

namespace smalljump::detail {

/// Real-to-complex forward transform of a fixed size. Plans are created once
/// per size under a lock; execution is thread-safe.
class RealFft
{
public:
  explicit RealFft(std::size_t size);
  std::size_t size() const noexcept { return size_; }
  /// out[k] = Σ_i in[i] e^{-2πi ki/size} for k <= size/2. `in` and `out` must
  /// come from allocate_* below.
  void forward(double* in, std::complex<double>* out) const;

  static double* allocate_real(std::size_t n);
  static std::complex<double>* allocate_complex(std::size_t n);
  static void release(void* p);

private:
  std::size_t size_;
  void* plan_;
};

/// Complex forward transform, same conventions.
class ComplexFft
{
public:
  explicit ComplexFft(std::size_t size);
  void forward(std::complex<double>* in, std::complex<double>* out) const;

private:
  std::size_t size_;
  void* plan_;
};

struct FftwDeleter
{
  void operator()(void* p) const { RealFft::release(p); }
};

/// Smallest 2^a 3^b 5^c >= n.
std::size_t fft_friendly_size(std::size_t n);

} // namespace smalljump::detail
