#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "emhd/field.hpp"
#include "emhd/random_fields.hpp"

using namespace emhd;
using std::numbers::pi;

namespace {

// O(N^2) DFT with the library's normalization (divide by nx*ny).
SpectralField naive_dft(const PhysicalField& u) {
  const Grid& g = u.grid();
  SpectralField f(u.grid_ptr());
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      std::complex<long double> s = 0;
      for (int a = 0; a < g.nx; ++a)
        for (int b = 0; b < g.ny; ++b) {
          const long double ph = -2.0L * std::numbers::pi_v<long double> *
                                 (static_cast<long double>(i) * a / g.nx + static_cast<long double>(j) * b / g.ny);
          s += static_cast<long double>(u(a, b)) * std::complex<long double>(std::cos(ph), std::sin(ph));
        }
      f(i, j) = cplx(static_cast<double>(s.real()), static_cast<double>(s.imag())) / static_cast<double>(g.size());
    }
  return f;
}

PhysicalField random_physical(const GridPtr& g, std::uint64_t seed) {
  Rng rng(seed);
  PhysicalField u(g);
  for (auto& v : u.values()) v = rng.uniform(-1.0, 1.0);
  return u;
}

double max_gap(const PhysicalField& a, const PhysicalField& b) {
  double m = 0.0;
  for (std::size_t n = 0; n < a.values().size(); ++n) m = std::max(m, std::abs(a.values()[n] - b.values()[n]));
  return m;
}

}  // namespace

TEST(Grid, RejectsInvalidShapes) {
  EXPECT_THROW(make_grid(63, 64), InvalidArgument);
  EXPECT_THROW(make_grid(6, 6), InvalidArgument);
  EXPECT_THROW(make_grid(16, 16, 0.0, 1.0), InvalidArgument);
  EXPECT_THROW(make_grid(16, 16, 1.0, -2.0), InvalidArgument);
  EXPECT_NO_THROW(make_grid(8, 8));
}

TEST(Grid, FftOrderingAndNyquist) {
  const auto g = make_grid(8, 12, 2.0 * pi, 4.0 * pi);
  EXPECT_EQ(g->mode_x(0), 0);
  EXPECT_EQ(g->mode_x(3), 3);
  EXPECT_EQ(g->mode_x(4), -4);
  EXPECT_EQ(g->mode_x(7), -1);
  EXPECT_TRUE(g->is_nyquist(4, 0));
  EXPECT_TRUE(g->is_nyquist(1, 6));
  EXPECT_DOUBLE_EQ(g->kx[5], -3.0);
  EXPECT_DOUBLE_EQ(g->ky[2], 1.0);  // 2 pi m / ly with ly = 4 pi
  EXPECT_EQ(g->mirror_x(0), 0);
  EXPECT_EQ(g->mirror_x(3), 5);
}

TEST(Transform, MatchesDirectDft) {
  const auto g = make_grid(8, 10, 3.0, 2.0);
  const PhysicalField u = random_physical(g, 1);
  const SpectralField fast = transform_forward(u);
  const SpectralField slow = naive_dft(u);
  EXPECT_LE((fast - slow).max_abs(), 1e-14);
}

TEST(Transform, RoundTripAndMean) {
  const auto g = make_grid(64, 48, 5.0, 7.0);
  const PhysicalField u = random_physical(g, 2);
  const SpectralField f = transform_forward(u);
  EXPECT_LE(max_gap(transform_inverse(f), u), 1e-12 * u.max_abs());
  double mean = 0.0;
  for (double v : u.values()) mean += v;
  mean /= static_cast<double>(g->size());
  EXPECT_NEAR(f(0, 0).real(), mean, 1e-15);
  EXPECT_NEAR(f(0, 0).imag(), 0.0, 1e-15);
}

TEST(Transform, ParsevalAndHermitian) {
  const auto g = make_grid(32, 32, 2.0, 3.0);
  const PhysicalField u = random_physical(g, 3);
  const SpectralField f = transform_forward(u);
  EXPECT_NEAR(norm_sq(f), norm_sq(u), 1e-12 * norm_sq(u));
  EXPECT_LE(hermitian_defect(f), 1e-15);
  // Nyquist-row coefficients of real data at the self-conjugate points are real
  EXPECT_NEAR(f(16, 0).imag(), 0.0, 1e-15);
  EXPECT_NEAR(f(16, 16).imag(), 0.0, 1e-15);
}

TEST(Transform, SingleModeCoefficients) {
  const auto g = make_grid(16, 16);
  const auto u = PhysicalField::sample(g, [](double x, double y) { return std::cos(3.0 * x) * std::sin(2.0 * y); });
  const SpectralField f = transform_forward(u);
  // cos(3x) sin(2y) = sum over signs of e^{i(+-3x +-2y)} / (4i) * sign
  EXPECT_NEAR(std::abs(f(3, 2) - cplx(0.0, -0.25)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(f(13, 14) - cplx(0.0, 0.25)), 0.0, 1e-15);
  EXPECT_NEAR(norm_sq(f), pi * pi, 1e-12);
}

TEST(Derivative, AnalyticTrigonometric) {
  const auto g = make_grid(32, 32);
  const auto f = transform_forward(PhysicalField::sample(g, [](double x, double y) { return std::sin(3.0 * x) * std::cos(2.0 * y); }));
  const auto fx = transform_inverse(dx(f));
  const auto fyy = transform_inverse(derivative(f, 0, 2));
  const auto lap = transform_inverse(laplacian(f));
  const auto ex = PhysicalField::sample(g, [](double x, double y) { return 3.0 * std::cos(3.0 * x) * std::cos(2.0 * y); });
  const auto eyy = PhysicalField::sample(g, [](double x, double y) { return -4.0 * std::sin(3.0 * x) * std::cos(2.0 * y); });
  const auto el = PhysicalField::sample(g, [](double x, double y) { return -13.0 * std::sin(3.0 * x) * std::cos(2.0 * y); });
  EXPECT_LE(max_gap(fx, ex), 1e-13);
  EXPECT_LE(max_gap(fyy, eyy), 1e-13);
  EXPECT_LE(max_gap(lap, el), 1e-12);
}

TEST(Derivative, NyquistModesAreZeroed) {
  const auto g = make_grid(16, 16);
  const auto f = transform_forward(PhysicalField::sample(g, [](double x, double) { return std::cos(8.0 * x); }));
  EXPECT_GT(f.max_abs(), 0.5);
  EXPECT_EQ(dx(f).max_abs(), 0.0);
  EXPECT_EQ(derivative(f, 2, 0).max_abs(), 0.0);
  EXPECT_EQ(laplacian(f).max_abs(), 0.0);
  EXPECT_THROW(derivative(f, -1, 0), InvalidArgument);
}

TEST(Derivative, MixedPartialsCommute) {
  const auto g = make_grid(32, 24, 3.0, 4.0);
  const SpectralField f = random_field(g, 5, 10);
  EXPECT_LE((dx(dy(f)) - dy(dx(f))).max_abs(), 1e-15 * dx(dy(f)).max_abs());
  EXPECT_LE((derivative(f, 1, 1) - dx(dy(f))).max_abs(), 1e-12);
}

TEST(FractionalMultiplier, ZeroLineProjection) {
  const auto g = make_grid(16, 16);
  const auto f = transform_forward(PhysicalField::sample(g, [](double, double y) { return std::sin(2.0 * y) + 0.5; }));
  const auto r = fractional_multiplier(f, -0.45, 0.0);
  EXPECT_EQ(r.field.max_abs(), 0.0);
  EXPECT_NEAR(r.discarded_mass, norm_sq(f), 1e-12);
}

TEST(FractionalMultiplier, PowersOfFrequency) {
  const auto g = make_grid(16, 16);
  const auto f = transform_forward(PhysicalField::sample(g, [](double x, double y) { return std::sin(2.0 * x + y); }));
  // |xi1|^1 |xi|^1 = 2 * sqrt(5)
  const auto r = fractional_multiplier(f, 1.0, 1.0);
  EXPECT_LE((r.field - 2.0 * std::sqrt(5.0) * f).max_abs(), 1e-14);
  EXPECT_EQ(r.discarded_mass, 0.0);
  // |xi1|^-s
  const auto n = fractional_multiplier(f, -0.45, 0.0);
  EXPECT_LE((n.field - std::pow(2.0, -0.45) * f).max_abs(), 1e-14);
}

TEST(Dealias, CutoffAndAliasFreeProducts) {
  EXPECT_EQ(dealias_cutoff(64), 21);
  EXPECT_EQ(dealias_cutoff(128), 42);
  const auto g = make_grid(32, 32);
  const SpectralField a = dealias(random_field(g, 6, 15)), b = dealias(random_field(g, 7, 15));
  // pointwise product on the grid, truncated, equals the truncated exact product
  PhysicalField pa = transform_inverse(a);
  const PhysicalField pb = transform_inverse(b);
  for (std::size_t n = 0; n < pa.values().size(); ++n) pa.values()[n] *= pb.values()[n];
  const SpectralField grid_product = dealias(transform_forward(pa));
  const SpectralField exact = dealias(product_padded(a, b));
  EXPECT_LE((grid_product - exact).max_abs(), 1e-14 * exact.max_abs());
}

TEST(Dealias, PhysicalDerivativeMatchesComposition) {
  const auto g = make_grid(32, 16, 2.0, 5.0);
  const SpectralField f = random_field(g, 8, 7);
  for (int ox = 0; ox <= 2; ++ox)
    for (int oy = 0; oy <= 2; ++oy) {
      const PhysicalField ref = transform_inverse(derivative(f, ox, oy));
      const double scale = ref.max_abs();
      EXPECT_LE(max_gap(physical_derivative(f, ox, oy, true), transform_inverse(dealias(derivative(f, ox, oy)))), 1e-14 * scale);
      EXPECT_LE(max_gap(physical_derivative(f, ox, oy, false), ref), 1e-14 * scale);
    }
}

TEST(Products, PaddedProductOfCosines) {
  const auto g = make_grid(32, 32);
  const auto a = transform_forward(PhysicalField::sample(g, [](double x, double) { return std::cos(3.0 * x); }));
  const auto b = transform_forward(PhysicalField::sample(g, [](double x, double) { return std::cos(5.0 * x); }));
  const auto expect = transform_forward(
      PhysicalField::sample(g, [](double x, double) { return 0.5 * (std::cos(2.0 * x) + std::cos(8.0 * x)); }));
  EXPECT_LE((product_padded(a, b) - expect).max_abs(), 1e-15);
}

TEST(Products, ResampleRoundTrip) {
  const auto g = make_grid(16, 16);
  const auto big = make_grid(32, 32);
  SpectralField f = random_field(g, 9, 7);
  EXPECT_LE((resample(resample(f, big), g) - f).max_abs(), 0.0);
  EXPECT_THROW(resample(f, make_grid(32, 32, 1.0, 1.0)), GridMismatch);
}

TEST(Fields, GridMismatchIsReported) {
  const SpectralField a(make_grid(16, 16)), b(make_grid(16, 16, 1.0, 1.0));
  EXPECT_THROW(a + b, GridMismatch);
  EXPECT_THROW(inner(a, b), GridMismatch);
}

TEST(RandomFields, ReproducibleAndReal) {
  const auto g = make_grid(32, 32);
  const SpectralField a = random_field(g, 42, 6), b = random_field(g, 42, 6);
  EXPECT_EQ((a - b).max_abs(), 0.0);
  EXPECT_LE(hermitian_defect(a), 0.0);
  EXPECT_EQ(a(0, 0), cplx(0.0));
  EXPECT_EQ(a(7, 0), cplx(0.0));  // outside the band
}
