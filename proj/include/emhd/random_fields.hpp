#pragma once

// Reproducible random band-limited fields. The bit stream of mt19937_64 is
// fixed by the standard; doubles are formed from its top 53 bits so the
// fields are identical across standard libraries.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "emhd/field.hpp"
#include "emhd/model.hpp"

namespace emhd {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  /// Uniform on [a, b).
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

 private:
  std::mt19937_64 eng_;
};

/// Real field with random coefficients on |mx|, |my| <= band, scaled so
/// that its maximum coefficient modulus is about `amplitude`. The mean and
/// Nyquist modes are zero.
inline SpectralField random_field(const GridPtr& g, std::uint64_t seed, int band, double amplitude = 1.0) {
  if (band < 1) throw InvalidArgument("random_field: band must be >= 1");
  Rng rng(seed);
  SpectralField f(g);
  for (int i = 0; i < g->nx; ++i) {
    for (int j = 0; j < g->ny; ++j) {
      const double re = rng.uniform(-1.0, 1.0), im = rng.uniform(-1.0, 1.0);
      const int mx = g->mode_x(i), my = g->mode_y(j);
      if (std::abs(mx) > band || std::abs(my) > band || g->is_nyquist(i, j) || (mx == 0 && my == 0)) continue;
      f(i, j) = amplitude * cplx(re, im);
    }
  }
  // Hermitian projection
  SpectralField h(g);
  for (int i = 0; i < g->nx; ++i)
    for (int j = 0; j < g->ny; ++j) h(i, j) = 0.5 * (f(i, j) + std::conj(f(g->mirror_x(i), g->mirror_y(j))));
  return h;
}

inline PerturbationState random_state(const GridPtr& g, std::uint64_t seed, int band, double amplitude, ModelParams p = {}) {
  return {random_field(g, seed, band, amplitude), random_field(g, seed ^ 0x9e3779b97f4a7c15ULL, band, amplitude), p, 0.0};
}

}  // namespace emhd
