#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "emhd/diagnostics.hpp"
#include "emhd/linear_propagator.hpp"
#include "emhd/random_fields.hpp"

using namespace emhd;
using std::numbers::pi;

namespace {

PerturbationState from_functions(const GridPtr& g, double (*psi)(double, double), double (*b)(double, double)) {
  PerturbationState s = PerturbationState::zero(g);
  s.psi = transform_forward(PhysicalField::sample(g, psi));
  s.b = transform_forward(PhysicalField::sample(g, b));
  return s;
}

double zero_fn(double, double) { return 0.0; }

}  // namespace

TEST(EnergyFunctionals, SinglePlanarMode) {
  const auto g = make_grid(32, 32);
  const auto s = from_functions(g, zero_fn, [](double x, double) { return std::sin(x); });
  for (double e1 : {0.0, 0.1, 0.2}) {
    DiagnosticsConfig c;
    c.eps1 = e1 > 0.0 ? e1 : 1e-3;
    const EnergyPair ed = eval_E_D(s, c);
    EXPECT_NEAR(ed.E, 4.0 * pi * pi, 1e-10);
    // |grad b|^2 + |grad^2 b|^2 - eps1 |b_x|^2
    EXPECT_NEAR(ed.D, 4.0 * pi * pi - 2.0 * pi * pi * c.eps1, 1e-10);
  }
}

TEST(EnergyFunctionals, CrossTermSign) {
  // b = cos x, psi = sin x: b psi_x = cos^2 x, so E picks up +2 eps1 * 2 pi^2
  const auto g = make_grid(32, 32);
  const auto s = from_functions(g, [](double x, double) { return std::sin(x); }, [](double x, double) { return std::cos(x); });
  DiagnosticsConfig c;
  const double base = 2 * pi * pi * (1 + 1) + 2 * pi * pi * (1 + 1);
  EXPECT_NEAR(eval_E_D(s, c).E, base + 2.0 * c.eps1 * 2.0 * pi * pi, 1e-10);
}

TEST(EnergyFunctionals, CoercivityOnRandomStates) {
  const auto g = make_grid(32, 32);
  DiagnosticsConfig cfg;
  const Certification cert = certify(*g, cfg.eps1);
  ASSERT_TRUE(cert.certified);
  for (std::uint64_t seed = 70; seed < 90; ++seed) {
    const auto s = random_state(g, seed, 15, 1.0);
    const EnergyPair ed = eval_E_D(s, cfg);
    const double en = norm_sq(s.b) + grad_norm_sq(s.psi) + grad_norm_sq(s.b) + hessian_norm_sq(s.psi);
    const double dn = grad_norm_sq(s.b) + hessian_norm_sq(s.b) + grad_norm_sq(dx(s.psi));
    EXPECT_GE(ed.E, cert.e_min * en * (1 - 1e-12));
    EXPECT_GE(ed.D, cert.d_min * dn * (1 - 1e-12));
  }
}

TEST(Certification, ValuesAndLadder) {
  const auto g = make_grid(64, 64);
  const Certification c = certify(*g, 0.1);
  EXPECT_TRUE(c.certified);
  EXPECT_NEAR(c.e_min, 0.95, 1e-3);
  EXPECT_GT(c.d_min, 0.0);
  EXPECT_EQ(c.c, std::min(c.e_min, c.d_min));
  EXPECT_FALSE(certify(*g, 1.9).certified);
  const Certification best = largest_certified_eps1(*g);
  EXPECT_TRUE(best.certified);
  EXPECT_EQ(best.eps1, 0.5);
}

TEST(BlockWeighted, HorizontalWeightOfSinTwoX) {
  const auto g = make_grid(32, 32);
  const auto s = from_functions(g, zero_fn, [](double x, double) { return std::sin(2.0 * x); });
  DiagnosticsConfig c;
  // (1 + |xi|^2) |b|^2 = 5 * 2 pi^2, horizontal block k = 1 weight 2^2
  EXPECT_NEAR(eval_El_Dl(s, c, 1).E, 40.0 * pi * pi, 1e-9);
  EXPECT_NEAR(eval_El_Dl(s, c, 2).E, 160.0 * pi * pi, 1e-9);
  EXPECT_NEAR(eval_El_Dl(s, c, 0).E, eval_E_D(s, c).E, 1e-9);
  EXPECT_THROW(eval_El_Dl(s, c, 3), InvalidArgument);
}

TEST(BlockWeighted, LevelZeroEquivalentToFullFunctionals) {
  const auto g = make_grid(32, 32);
  DiagnosticsConfig c;
  const auto s = random_state(g, 71, 12, 1.0);
  const EnergyPair a = eval_El_Dl(s, c, 0), b = eval_E_D(s, c);
  // squared block weights sum to a value in [1/2, 1] along each axis
  EXPECT_LE(a.E, b.E * (1 + 1e-12));
  EXPECT_GE(a.E, 0.25 * b.E);
  EXPECT_LE(a.D, b.D * (1 + 1e-12));
  EXPECT_GE(a.D, 0.25 * b.D);
}

TEST(NegativeNorms, AnalyticValues) {
  const auto g = make_grid(32, 32);
  const auto s = from_functions(g, zero_fn, [](double x, double y) { return std::sin(2.0 * x + y); });
  DiagnosticsConfig c;
  c.s = 0.45;
  const double m = 2.0 * pi * pi, w = std::pow(2.0, -2.0 * c.s);
  EXPECT_NEAR(eval_E_s(s, c).value, m * w * (1.0 + std::pow(5.0, 1.0 + c.s)), 1e-9);
  const double s1 = 0.7;
  EXPECT_NEAR(eval_E_high(s, c, s1).value, m * w * (std::pow(5.0, s1) + std::pow(5.0, s1 + 1.0)), 1e-9);

  // mass on xi1 = 0 is dropped and reported
  const auto t = from_functions(g, zero_fn, [](double, double y) { return std::cos(y); });
  const NegativeNorm n = eval_E_s(t, c);
  EXPECT_EQ(n.value, 0.0);
  EXPECT_NEAR(n.discarded_mass, m, 1e-10);
}

TEST(BesovCombinations, ZeroHomogeneityAndSubterm) {
  const auto g = make_grid(32, 32);
  const GTriple z = eval_g(PerturbationState::zero(g));
  EXPECT_EQ(z.g1, 0.0);
  EXPECT_EQ(z.g2, 0.0);
  EXPECT_EQ(z.g3, 0.0);
  PerturbationState s = random_state(g, 72, 10, 1.0), s2 = s;
  s2.psi *= 2.0;
  s2.b *= 2.0;
  const GTriple a = eval_g(s), b = eval_g(s2);
  EXPECT_NEAR(b.g1, 2.0 * a.g1, 1e-12 * b.g1);
  EXPECT_NEAR(b.g2, 2.0 * a.g2, 1e-12 * b.g2);
  EXPECT_GE(a.g3, a.g2);
  EXPECT_GT(b.g3, 2.0 * a.g3);  // contains quadratic pieces
}

TEST(EnergyLaw, ResidualSmallForRandomStates) {
  const auto g = make_grid(32, 32);
  for (std::uint64_t seed = 73; seed < 78; ++seed) {
    auto s = random_state(g, seed, 10, 0.5, ModelParams{0.3, 1.0});
    EXPECT_LE(energy_law_residual(s), 1e-12);
  }
}

TEST(DecayFitting, ExactPowerLaw) {
  const auto t = log_times(1.0, 1e4, 40);
  std::vector<double> v;
  for (double x : t) v.push_back(3.0 * std::pow(1.0 + x, -0.7));
  const DecayFit f = fit_decay(t, v, {1.0, 1e4});
  EXPECT_NEAR(f.exponent, -0.7, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  EXPECT_EQ(f.samples, 40u);
  EXPECT_EQ(fit_decay(t, v, {10.0, 1000.0}).samples, 20u);
}

TEST(DecayFitting, RejectsBadInput) {
  const auto t = log_times(1.0, 100.0, 20);
  std::vector<double> v(t.size(), 1.0);
  EXPECT_THROW(fit_decay(t, std::vector<double>(3, 1.0)), InvalidArgument);
  EXPECT_THROW(fit_decay(t, v, {50.0, 100.0}), InvalidArgument);
  v[10] = -1.0;
  EXPECT_THROW(fit_decay(t, v, {1.0, 100.0}), InvalidArgument);
  EXPECT_THROW(log_times(0.0, 1.0, 5), InvalidArgument);
  const auto lt = log_times(1e2, 1e4, 17);
  EXPECT_EQ(lt.front(), 1e2);
  EXPECT_EQ(lt.back(), 1e4);
  EXPECT_NEAR(lt[8], 1e3, 1e-10);
}

TEST(Monotonicity, DetectsViolations) {
  std::vector<double> t, E, D;
  for (int n = 0; n <= 50; ++n) {
    t.push_back(0.1 * n);
    E.push_back(std::exp(-t.back()));
    D.push_back(std::exp(-t.back()));
  }
  EXPECT_TRUE(monotonicity_probe(t, E, D, 0.5).passed());
  const auto r = monotonicity_probe(t, E, D, 2.0);
  EXPECT_FALSE(r.passed());
  EXPECT_EQ(r.flagged.size(), 49u);
  E[20] = 2.0;
  EXPECT_FALSE(monotonicity_probe(t, E, D, 0.5).increases.empty());
  EXPECT_THROW(monotonicity_probe(t, E, std::vector<double>(2), 0.5), InvalidArgument);
}

TEST(Monotonicity, SlowDecayingTrajectory) {
  const auto g = make_grid(32, 32);
  auto s0 = random_state(g, 74, 4, 1e-3);
  DiagnosticsConfig c;
  const double cc = certify(*g, c.eps1).c;
  std::vector<double> t, E, D;
  for (int n = 0; n <= 30; ++n) {
    const auto s = propagate_linear_grid(s0, 0.1 * n);
    const EnergyPair ed = eval_E_D(s, c);
    t.push_back(s.time);
    E.push_back(ed.E);
    D.push_back(ed.D);
  }
  EXPECT_TRUE(monotonicity_probe(t, E, D, cc, 1e-2).passed());
}

TEST(DiagnosticsConfig, WarningsAndErrors) {
  DiagnosticsConfig c;
  EXPECT_TRUE(c.validate().empty());
  c.s = 0.3;
  EXPECT_EQ(c.validate().size(), 1u);
  c.s = 0.6;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c.s = 0.45;
  c.eps1 = 0.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c.eps1 = 0.1;
  c.s1_list = {-0.6};
  EXPECT_THROW(c.validate(), InvalidArgument);
  c.s1_list = {1.0};
  c.fit_window = {5.0, 5.0};
  EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(Records, EvaluateFillsEveryColumn) {
  const auto g = make_grid(32, 32);
  DiagnosticsConfig c;
  c.s1_list = {0.5, 1.0, 1.5};
  const auto s = random_state(g, 75, 8, 1.0);
  const DiagnosticsRecord r = evaluate(s, c);
  EXPECT_EQ(r.E_high.size(), 3u);
  EXPECT_GT(r.E, 0.0);
  EXPECT_GT(r.E_s, 0.0);
  EXPECT_GT(r.E_2, r.E_1);
  EXPECT_GT(r.g3, 0.0);
  EXPECT_LT(r.E_high[0], r.E_high[2]);
}

TEST(Interpolation, SpectralHolderStep) {
  // |grad psi|^2 <= | |d_x|^{-s} grad psi |^{2/(1+s)} |d_x grad psi|^{2s/(1+s)}  without xi1 = 0 content
  const auto g = make_grid(32, 32);
  for (double s : {0.35, 0.45}) {
    for (std::uint64_t seed = 80; seed < 85; ++seed) {
      SpectralField psi = random_field(g, seed, 12);
      for (int j = 0; j < g->ny; ++j) psi(0, j) = 0.0;
      const SpectralField px = dx(psi), py = dy(psi);
      const double lhs = norm_sq(px) + norm_sq(py);
      const double neg = norm_sq(fractional_multiplier(px, -s, 0.0).field) + norm_sq(fractional_multiplier(py, -s, 0.0).field);
      const double pos = norm_sq(dx(px)) + norm_sq(dx(py));
      EXPECT_LE(lhs, std::pow(neg, 1.0 / (1.0 + s)) * std::pow(pos, s / (1.0 + s)) * (1 + 1e-12));
    }
  }
}
