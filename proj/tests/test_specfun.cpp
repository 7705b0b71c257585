#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "circlab/errors.hpp"
#include "circlab/quadrature.hpp"
#include "circlab/specfun.hpp"

using namespace circlab;
using std::numbers::pi;

// Reference values below were computed once with 40-digit arithmetic and frozen.

TEST(Quadrature, PolynomialAndOscillatory) {
  EXPECT_NEAR(integrate([](double x) { return x * x; }, 0.0, 3.0).value, 9.0, 1e-12);
  EXPECT_NEAR(integrate([](double x) { return std::sin(x); }, 0.0, pi).value, 2.0, 1e-12);
  EXPECT_EQ(integrate([](double x) { return x; }, 1.0, 1.0).value, 0.0);
}

TEST(Quadrature, NonFiniteIntegrandThrows) {
  EXPECT_THROW(integrate([](double x) { return 1.0 / x; }, -1.0, 1.0), NumericError);
}

TEST(Quadrature, BudgetExhaustionThrows) {
  QuadratureOptions o;
  o.abs_tol = 1e-300;
  o.max_subdivisions = 3;
  EXPECT_THROW(integrate([](double x) { return std::sqrt(x); }, 0.0, 1.0, o), NumericError);
}

TEST(Bessel, I0Values) {
  EXPECT_EQ(bessel_i0(0.0), 1.0);
  EXPECT_NEAR(bessel_i0(2.0), 2.2795853023360672674, 1e-15 * 2.28);
  EXPECT_NEAR(bessel_i0(0.5), 1.0634833707413235193, 1e-15);
  EXPECT_NEAR(bessel_i0_scaled(10.0), 0.12783333716342860732, 1e-15);
  EXPECT_NEAR(bessel_i0_scaled(50.0), 0.05656162664745419253, 1e-14);
  EXPECT_NEAR(log_bessel_i0(100.0), 96.779732689942583717, 1e-12);
  EXPECT_NEAR(log_bessel_i0(1000.0), 995.62730888986946467, 1e-11);
}

TEST(Bessel, ScaledAgreesWithSeriesAtTen) {
  EXPECT_NEAR(bessel_i0_scaled(10.0), std::exp(-10.0) * bessel_i0(10.0), 1e-16);
}

TEST(Bessel, LargeArgumentAsymptotics) {
  EXPECT_NEAR(bessel_i0_scaled(50.0) / (1.0 / std::sqrt(100.0 * pi)), 1.0, 0.01);
  EXPECT_GE(bessel_i0_scaled(100.0) * std::sqrt(100.0), 0.3);
  EXPECT_TRUE(std::isfinite(log_bessel_i0(1e6)));
}

TEST(Bessel, CrossoverBand) {
  for (double x = 25.0; x <= 35.0; x += 0.05) {
    const double s = bessel_i0_scaled_series(x);
    EXPECT_NEAR(bessel_i0_scaled_asymptotic(x) / s, 1.0, 1e-6) << x;
  }
}

TEST(Bessel, I1Values) {
  EXPECT_EQ(bessel_i1(0.0), 0.0);
  EXPECT_NEAR(bessel_i1(1.0), 0.56515910399248502721, 1e-15);
  const double quad = integrate([](double y) { return std::cos(y) * std::exp(std::cos(y)); },
                                0.0, 2.0 * pi, {1e-13, 1000000})
                          .value /
                      (2.0 * pi);
  EXPECT_NEAR(bessel_i1(1.0), quad, 1e-12);
  EXPECT_NEAR(bessel_i1_scaled(40.0), 0.062482229074442060748, 1e-14);
}

TEST(Bessel, NegativeArgumentRejected) {
  EXPECT_THROW(bessel_i0(-1.0), DomainError);
  EXPECT_THROW(log_bessel_i0(-0.1), DomainError);
  EXPECT_THROW(bessel_i1(std::nan("")), DomainError);
}

TEST(MeanResultant, Values) {
  EXPECT_EQ(mean_resultant(Concentration(0.0)), 0.0);
  EXPECT_NEAR(mean_resultant(Concentration(0.01)), 0.005, 1e-5);
  EXPECT_NEAR(mean_resultant(Concentration(1.0)), 0.44638996589653450705, 1e-15);
  EXPECT_NEAR(mean_resultant(Concentration(5.0)), 0.89338313704408522159, 1e-15);
  EXPECT_NEAR(mean_resultant(Concentration(20.0)), 0.9746705078898071259, 1e-14);
  EXPECT_NEAR(mean_resultant(Concentration(50.0)), 0.98994896737849775259, 1e-14);
  EXPECT_LT(mean_resultant(Concentration(1e5)), 1.0);
}

TEST(RatioR, Values) {
  EXPECT_EQ(ratio_R(Concentration(0.0)), 1.0);
  EXPECT_NEAR(ratio_R(Concentration(0.01)) - 1.0, 0.5e-4, 1e-6);
  EXPECT_NEAR(ratio_R(Concentration(1.0)), 1.4221429083510263365, 1e-14);
  EXPECT_NEAR(ratio_R(Concentration(3.0)), 2.8223500287744830203, 1e-14);
  EXPECT_NEAR(ratio_R(Concentration(100.0)), 17.691140443246909704, 1e-11);
  EXPECT_NEAR(ratio_R(Concentration(100.0)) / std::sqrt(100.0 * pi), 1.0, 0.02);
}

TEST(Rho, Values) {
  const Concentration k(2.0);
  EXPECT_NEAR(rho(k, 0.7), 0.98564085806859720893, 1e-14);
  EXPECT_NEAR(rho(k, pi / 2), 1.0 / std::pow(bessel_i0(2.0), 2), 1e-15);
  EXPECT_NEAR(rho(k, 0.0), ratio_R(k), 1e-14);
}

TEST(Rho, MeanIsOne) {
  for (double kappa : {0.1, 1.0, 5.0, 20.0}) {
    const Concentration k(kappa);
    const double m =
        integrate([&](double t) { return rho(k, t); }, 0.0, 2.0 * pi, {1e-12, 1000000}).value /
        (2.0 * pi);
    EXPECT_NEAR(m, 1.0, 1e-8) << kappa;
  }
}

TEST(ArcProb, Values) {
  EXPECT_NEAR(arc_prob(Concentration(0.0), ArcFraction(0.3)), 0.3, 1e-15);
  EXPECT_EQ(arc_prob(Concentration(7.0), ArcFraction(1.0)), 1.0);
  EXPECT_NEAR(arc_prob(Concentration(4.0), ArcFraction(0.5)), 0.99244058888340454942, 1e-10);
  EXPECT_NEAR(arc_prob(Concentration(2.0), ArcFraction(0.25)), 0.67384498085880358162, 1e-10);
  EXPECT_NEAR(arc_prob(Concentration(20.0), ArcFraction(0.1)), 0.83551078564709377012, 1e-10);
}

TEST(KlDivergence, Values) {
  EXPECT_EQ(kl_divergence(HardCluster{ArcFraction(1.0)}), 0.0);
  EXPECT_NEAR(kl_divergence(HardCluster{ArcFraction(0.25)}), std::log(4.0), 1e-15);
  EXPECT_EQ(kl_divergence(VonMises{Concentration(0.0)}), 0.0);
  EXPECT_NEAR(kl_divergence(VonMises{Concentration(2.0)}), 0.57155577444505968108, 1e-14);
  EXPECT_NEAR(kl_divergence(VonMises{Concentration(0.1)}), 0.0025, 0.00025);
}

TEST(GaussianTail, Values) {
  EXPECT_EQ(gaussian_upper_tail(0.0), 0.5);
  EXPECT_NEAR(gaussian_upper_tail(1.0), 0.15865525393145705141, 1e-16);
  EXPECT_NEAR(gaussian_upper_tail(3.0), 0.0013498980316300945267, 4e-18);
  EXPECT_NEAR(gaussian_upper_tail(-2.0), 0.9772498680518207928, 1e-15);
  for (double x = -6.0; x <= 6.0; x += 0.25) {
    EXPECT_NEAR(gaussian_upper_tail(x) + gaussian_upper_tail(-x), 1.0, 1e-15);
  }
}

TEST(C0, ObjectiveAndMinimizer) {
  EXPECT_NEAR(c0_objective(1.0), 1.3659464895911385528, 1e-14);
  const C0Constant c = compute_c0();
  EXPECT_NEAR(c.c2_star, 1.3999852768782042267, 1e-9);
  EXPECT_NEAR(c.c0, 1.2676980469105774444, 1e-12);
  EXPECT_LE(std::abs(c.derivative_at_min), 1e-6);
  // The objective blows up at the origin.
  EXPECT_GT(c0_objective(1e-6), 1e5);
}

TEST(C0, SingleSignChangeOnGrid) {
  int changes = 0;
  double prev = c0_objective_derivative(1e-4);
  for (int i = 1; i <= 10000; ++i) {
    const double d = c0_objective_derivative(1e-4 + (10.0 - 1e-4) * i / 10000.0);
    if ((prev < 0) != (d < 0)) ++changes;
    prev = d;
  }
  EXPECT_EQ(changes, 1);
}

TEST(ArcMeanResultant, Values) {
  EXPECT_NEAR(arc_mean_resultant(ArcFraction(0.5)), 2.0 / std::numbers::pi, 1e-15);
  EXPECT_EQ(arc_mean_resultant(ArcFraction(1.0)), 0.0);
  EXPECT_NEAR(arc_mean_resultant(ArcFraction(1e-6)), 1.0, 1e-11);
}
