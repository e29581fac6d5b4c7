#include <gtest/gtest.h>

#include <complex>

#include "fdasim/quadrature.hpp"

using fdasim::integrate;
using fdasim::QuadratureError;
using fdasim::QuadratureOptions;

TEST(Quadrature, PolynomialsAreExact) {
  // A 21-point Kronrod rule integrates degree-31 polynomials exactly.
  auto r = integrate([](double x) { return 5 * std::pow(x, 4) - 3 * x * x + 1.0; }, -1.0, 2.0);
  EXPECT_NEAR(r.value, 33.0 - 9.0 + 3.0, 1e-12);
  EXPECT_EQ(r.subdivisions, 0);
}

TEST(Quadrature, KnownIntegrals) {
  EXPECT_NEAR(integrate([](double x) { return std::sin(x); }, 0.0, M_PI).value, 2.0, 1e-13);
  EXPECT_NEAR(integrate([](double x) { return std::exp(-x * x); }, -8.0, 8.0).value,
              std::sqrt(M_PI), 1e-12);
  QuadratureOptions opt;
  opt.rel_tol = 1e-10;
  EXPECT_NEAR(integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, opt).value, 2.0,
              1e-8);
}

TEST(Quadrature, OscillatoryComplexIntegrand) {
  const double f = 100.5;
  auto r = integrate([&](double t) { return std::polar(1.0, 2 * M_PI * f * t); }, 0.0, 1.0);
  const std::complex<double> exact = (std::polar(1.0, 2 * M_PI * f) - 1.0) /
                                     std::complex<double>(0.0, 2 * M_PI * f);
  EXPECT_LT(std::abs(r.value - exact), 1e-12);
  EXPECT_GE(r.error, 0.0);
}

TEST(Quadrature, ThrowsWhenBudgetIsExhausted) {
  QuadratureOptions opt;
  opt.rel_tol = 1e-15;
  opt.max_subdivisions = 3;
  EXPECT_THROW(integrate([](double x) { return std::sin(1.0 / (x + 1e-3)); }, 0.0, 1.0, opt),
               QuadratureError);
}

TEST(Quadrature, EmptyIntervalIsZero) {
  EXPECT_EQ(integrate([](double x) { return x; }, 1.0, 1.0).value, 0.0);
}
