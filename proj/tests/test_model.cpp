#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "emhd/model.hpp"
#include "emhd/random_fields.hpp"
#include "emhd/steady_state.hpp"

using namespace emhd;
using std::numbers::pi;

namespace {

SpectralField sampled(const GridPtr& g, double (*f)(double, double)) {
  return transform_forward(PhysicalField::sample(g, f));
}

double phys_max(const SpectralField& f) { return transform_inverse(f).max_abs(); }

}  // namespace

TEST(Model, ParamsValidation) {
  EXPECT_THROW((ModelParams{-1.0, 1.0}.validate()), InvalidArgument);
  EXPECT_THROW((ModelParams{0.0, NAN}.validate()), InvalidArgument);
  EXPECT_NO_THROW((ModelParams{0.0, 1.0}.validate()));
}

TEST(Model, ConsistencyIdentityRandomStates) {
  const auto g = make_grid(32, 32);
  for (int n = 0; n < 25; ++n) {
    const ModelParams p{0.3 * (n % 2), 1.0};
    const PerturbationState s = random_state(g, 100 + static_cast<std::uint64_t>(n), 3 + n % 8, 0.1, p);
    const Tendency lhs = rhs_perturbed(s);
    Tendency rhs = rhs_full(FullState{s.psi, s.b, p, 0.0});
    rhs.first -= dx(s.b);
    rhs.second += dx(laplacian(s.psi));
    EXPECT_LE(phys_max(lhs.first - rhs.first), 1e-11);
    EXPECT_LE(phys_max(lhs.second - rhs.second), 1e-11);
  }
}

TEST(Model, LinearizedRhsOfSingleMode) {
  // psi = 0, b = sin x:  psi_t = -cos x,  b_t = -mu2 sin x
  const auto g = make_grid(16, 16);
  PerturbationState s = PerturbationState::zero(g, {0.0, 0.7});
  s.b = sampled(g, [](double x, double) { return std::sin(x); });
  const Tendency t = linearized_rhs(s);
  EXPECT_LE((t.first - sampled(g, [](double x, double) { return -std::cos(x); })).max_abs(), 1e-15);
  EXPECT_LE((t.second - sampled(g, [](double x, double) { return -0.7 * std::sin(x); })).max_abs(), 4e-15);
  // psi = sin(x) sin(y), b = 0:  b_t = d_x Lap psi = -2 cos x sin y
  s.b = SpectralField(g);
  s.psi = sampled(g, [](double x, double y) { return std::sin(x) * std::sin(y); });
  const Tendency u = linearized_rhs(s);
  EXPECT_LE((u.second - sampled(g, [](double x, double y) { return -2.0 * std::cos(x) * std::sin(y); })).max_abs(), 1e-14);
}

TEST(Model, HallBracketsOfSimpleProfiles) {
  // a = sin x, b = cos y:  first = -(a_y b_x - a_x b_y) = -cos x sin y,  second = 0
  const auto g = make_grid(32, 32);
  const auto a = sampled(g, [](double x, double) { return std::sin(x); });
  const auto b = sampled(g, [](double, double y) { return std::cos(y); });
  const Tendency t = hall_brackets(a, b);
  EXPECT_LE((t.first - sampled(g, [](double x, double y) { return -std::cos(x) * std::sin(y); })).max_abs(), 1e-15);
  EXPECT_LE(t.second.max_abs(), 1e-15);
}

TEST(Model, NonlinearTermsAreEnergyNeutral) {
  const auto g = make_grid(48, 48);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const SpectralField a = dealias(random_field(g, seed, 12)), b = dealias(random_field(g, seed + 50, 12));
    const Tendency t = rhs_full(FullState{a, b, {0.0, 0.0}, 0.0});
    const double p1 = -inner(laplacian(a), t.first), p2 = inner(b, t.second);
    EXPECT_LE(std::abs(p1 + p2), 1e-10 * (std::abs(p1) + std::abs(p2)));
  }
}

TEST(Model, ShearProfilesReduceToDiffusion) {
  const auto g = make_grid(32, 32);
  const ModelParams p{0.4, 0.9};
  const auto a = sampled(g, [](double, double y) { return std::cos(y) + 0.5 * std::sin(2.0 * y); });
  const auto b = sampled(g, [](double, double y) { return std::sin(y + 0.3); });
  const Tendency t = rhs_full(FullState{a, b, p, 0.0});
  EXPECT_LE((t.first - 0.4 * laplacian(a)).max_abs(), 1e-14);
  EXPECT_LE((t.second - 0.9 * laplacian(b)).max_abs(), 1e-14);
}

TEST(SteadyState, ResidualsOfEquilibria) {
  const auto g = make_grid(64, 64);
  EXPECT_LE(steady_residual({SteadyKind::shear_y, 1.0, 1.0, 1, 0.5}, g), 1e-11);
  EXPECT_LE(steady_residual({SteadyKind::shear_x, 1.0, 2.0, 2, 0.5}, g), 1e-11);
  EXPECT_LE(steady_residual({SteadyKind::current_sheet}, g), 1e-15);
  const auto fine = make_grid(128, 128);
  EXPECT_LE(steady_residual({SteadyKind::radial, 1.0, 1.0, 1, 0.5}, fine), 1e-8);
}

TEST(SteadyState, NonEquilibriumResidual) {
  // a = sin x, b = cos y: |a_y b_x - a_x b_y| = |cos x sin y|, max 1
  const auto g = make_grid(32, 32);
  const double r = hall_residual(sampled(g, [](double x, double) { return std::sin(x); }),
                                 sampled(g, [](double, double y) { return std::cos(y); }));
  EXPECT_NEAR(r, 1.0, 1e-13);
}

TEST(SteadyState, KindNames) {
  for (auto k : {SteadyKind::shear_x, SteadyKind::shear_y, SteadyKind::radial, SteadyKind::current_sheet})
    EXPECT_EQ(parse_steady_kind(to_string(k)), k);
  EXPECT_FALSE(parse_steady_kind("vortex").has_value());
  EXPECT_DOUBLE_EQ(smooth_step_down(-1.0), 1.0);
  EXPECT_DOUBLE_EQ(smooth_step_down(2.0), 0.0);
  EXPECT_NEAR(smooth_step_down(0.5), 0.5, 1e-15);
}

TEST(FieldReconstruction, CurrentSheetBackground) {
  const auto g = make_grid(16, 16);
  const MagneticField B = reconstruct_B(PotentialGradient::current_sheet(SpectralField(g)), SpectralField(g));
  for (double v : B.b1.values()) EXPECT_DOUBLE_EQ(v, 1.0);
  EXPECT_EQ(B.b2.max_abs(), 0.0);
  EXPECT_EQ(B.b3.max_abs(), 0.0);
}

TEST(FieldReconstruction, DivergenceFree) {
  const auto g = make_grid(32, 32);
  const auto a = sampled(g, [](double x, double y) { return std::sin(x) * std::sin(y); });
  const MagneticField B = reconstruct_B(PotentialGradient::of(a), SpectralField(g));
  const auto e1 = PhysicalField::sample(g, [](double x, double y) { return std::sin(x) * std::cos(y); });
  const auto e2 = PhysicalField::sample(g, [](double x, double y) { return -std::cos(x) * std::sin(y); });
  for (std::size_t n = 0; n < e1.values().size(); ++n) {
    EXPECT_NEAR(B.b1.values()[n], e1.values()[n], 1e-14);
    EXPECT_NEAR(B.b2.values()[n], e2.values()[n], 1e-14);
  }
  EXPECT_LE(divergence_max(B), 1e-12);
  const MagneticField R = reconstruct_B(PotentialGradient::current_sheet(random_field(g, 3, 10)), random_field(g, 4, 10));
  EXPECT_LE(divergence_max(R), 1e-12);
}

TEST(Model, GridMismatchThrows) {
  PerturbationState s{SpectralField(make_grid(16, 16)), SpectralField(make_grid(32, 32)), {}, 0.0};
  EXPECT_THROW(rhs_perturbed(s), GridMismatch);
  EXPECT_THROW(linearized_rhs(s), GridMismatch);
}
