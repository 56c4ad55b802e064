#pragma once

// Thin RAII layer over FFTW's 2D real transforms.
//
// Plans are created once per (nx, ny) with FFTW_ESTIMATE, so the chosen
// algorithm (and hence every rounding) is identical from run to run. Plan
// creation is serialized; execution uses the new-array interface on
// fftw_malloc'd scratch and is safe from any thread.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <utility>

namespace emhd::fft {

template <class T>
struct FftwDeleter {
  void operator()(T* p) const noexcept { fftw_free(p); }
};

template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwDeleter<T>>;

template <class T>
FftwBuffer<T> allocate(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * (n == 0 ? 1 : n)));
  if (p == nullptr) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

struct PlanPair {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

/// Cached r2c/c2r plans for an nx-by-ny row-major real array (y fastest).
inline PlanPair plans_for(int nx, int ny) {
  static std::map<std::pair<int, int>, PlanPair> cache;
  std::lock_guard lock(planner_mutex());
  auto it = cache.find({nx, ny});
  if (it != cache.end()) return it->second;

  const std::size_t nreal = static_cast<std::size_t>(nx) * ny;
  const std::size_t nhalf = static_cast<std::size_t>(nx) * (ny / 2 + 1);
  auto real = allocate<double>(nreal);
  auto cplx = allocate<fftw_complex>(nhalf);
  PlanPair p;
  p.r2c = fftw_plan_dft_r2c_2d(nx, ny, real.get(), cplx.get(), FFTW_ESTIMATE);
  p.c2r = fftw_plan_dft_c2r_2d(nx, ny, cplx.get(), real.get(), FFTW_ESTIMATE);
  cache.emplace(std::make_pair(nx, ny), p);
  return p;
}

/// Unnormalized forward transform; writes the full nx*ny Hermitian spectrum.
inline void forward(int nx, int ny, std::span<const double> in,
                    std::span<std::complex<double>> out) {
  const int nh = ny / 2 + 1;
  const PlanPair p = plans_for(nx, ny);
  auto real = allocate<double>(in.size());
  auto half = allocate<fftw_complex>(static_cast<std::size_t>(nx) * nh);
  std::copy(in.begin(), in.end(), real.get());
  fftw_execute_dft_r2c(p.r2c, real.get(), half.get());
  for (int i = 0; i < nx; ++i) {
    const int mi = (nx - i) % nx;
    for (int j = 0; j < ny; ++j) {
      std::complex<double> c;
      if (j < nh) {
        const auto& h = half[static_cast<std::size_t>(i) * nh + j];
        c = {h[0], h[1]};
      } else {
        const auto& h = half[static_cast<std::size_t>(mi) * nh + (ny - j)];
        c = {h[0], -h[1]};
      }
      out[static_cast<std::size_t>(i) * ny + j] = c;
    }
  }
}

/// Unnormalized c2r transform of a half spectrum (nx x (ny/2+1)), which is
/// consumed (FFTW may overwrite it).
inline void inverse_half(int nx, int ny, fftw_complex* half, std::span<double> out) {
  const PlanPair p = plans_for(nx, ny);
  auto real = allocate<double>(out.size());
  fftw_execute_dft_c2r(p.c2r, half, real.get());
  std::copy(real.get(), real.get() + out.size(), out.begin());
}

/// Unnormalized inverse transform of a Hermitian spectrum (only the
/// non-redundant half is read).
inline void inverse(int nx, int ny, std::span<const std::complex<double>> in,
                    std::span<double> out) {
  const int nh = ny / 2 + 1;
  auto half = allocate<fftw_complex>(static_cast<std::size_t>(nx) * nh);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < nh; ++j) {
      const auto c = in[static_cast<std::size_t>(i) * ny + j];
      half[static_cast<std::size_t>(i) * nh + j][0] = c.real();
      half[static_cast<std::size_t>(i) * nh + j][1] = c.imag();
    }
  }
  inverse_half(nx, ny, half.get(), out);
}

}  // namespace emhd::fft
