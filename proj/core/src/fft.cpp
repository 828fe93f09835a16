#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <utility>

namespace smalljump::detail {

namespace {

std::mutex& plan_mutex()
{
  static std::mutex m;
  return m;
}

// Plans live for the whole program; FFTW plans of a given size are reused
// with the new-array execute interface.
std::map<std::pair<int, std::size_t>, void*>& plan_cache()
{
  static std::map<std::pair<int, std::size_t>, void*> cache;
  return cache;
}

} // namespace

RealFft::RealFft(std::size_t size) : size_(size)
{
  std::lock_guard lock(plan_mutex());
  auto& slot = plan_cache()[{ 0, size }];
  if (!slot) {
    double* in = fftw_alloc_real(size);
    fftw_complex* out = fftw_alloc_complex(size / 2 + 1);
    slot = fftw_plan_dft_r2c_1d(static_cast<int>(size), in, out, FFTW_ESTIMATE);
    fftw_free(in);
    fftw_free(out);
  }
  plan_ = slot;
}

void RealFft::forward(double* in, std::complex<double>* out) const
{
  fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_), in, reinterpret_cast<fftw_complex*>(out));
}

double* RealFft::allocate_real(std::size_t n)
{
  return fftw_alloc_real(n);
}

std::complex<double>* RealFft::allocate_complex(std::size_t n)
{
  return reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(n));
}

void RealFft::release(void* p)
{
  fftw_free(p);
}

ComplexFft::ComplexFft(std::size_t size) : size_(size)
{
  std::lock_guard lock(plan_mutex());
  auto& slot = plan_cache()[{ 1, size }];
  if (!slot) {
    fftw_complex* in = fftw_alloc_complex(size);
    fftw_complex* out = fftw_alloc_complex(size);
    slot = fftw_plan_dft_1d(static_cast<int>(size), in, out, FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_free(in);
    fftw_free(out);
  }
  plan_ = slot;
}

void ComplexFft::forward(std::complex<double>* in, std::complex<double>* out) const
{
  fftw_execute_dft(static_cast<fftw_plan>(plan_), reinterpret_cast<fftw_complex*>(in),
                   reinterpret_cast<fftw_complex*>(out));
}

std::size_t fft_friendly_size(std::size_t n)
{
  std::size_t best = 1;
  while (best < n)
    best *= 2;
  for (std::size_t p5 = 1; p5 < best; p5 *= 5)
    for (std::size_t p3 = p5; p3 < best; p3 *= 3) {
      std::size_t v = p3;
      while (v < n)
        v *= 2;
      best = std::min(best, v);
    }
  return best;
}

} // namespace smalljump::detail
