#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>

#include "brq/error.hpp"
#include "brq/special.hpp"

using namespace brq;
using namespace brq::special;
using std::numbers::pi;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

template <class F>
double half_line(F g) {
  boost::math::quadrature::tanh_sinh<double> inner;
  boost::math::quadrature::exp_sinh<double> outer;
  auto safe = [&](double r) {
    if (r == 0.0) return 0.0;
    return g(r);
  };
  return inner.integrate(safe, 0.0, 1.0, 1e-14) + outer.integrate(safe, 1.0, INFINITY, 1e-14);
}

double radial_integral(int j, int d, double s) {
  return sphere_area(d) * half_line([&](double r) {
           const double g = bessel_kernel_g({j, d}, r);
           return g == 0.0 ? 0.0 : std::pow(r, s + d - 1) * g;
         });
}

}  // namespace

TEST_CASE("gamma and log_gamma against the standard library") {
  double worst = 0.0;
  for (double x = 0.05; x <= 50.0; x += 0.173) worst = std::max(worst, rel(special::gamma(x), std::tgamma(x)));
  CHECK(worst < 1e-13);
  worst = 0.0;
  for (double x = 0.05; x <= 1e6; x *= 1.37) worst = std::max(worst, std::abs(log_gamma(x) - std::lgamma(x)) / std::max(1.0, std::abs(std::lgamma(x))));
  CHECK(worst < 1e-13);
  CHECK_THROWS_AS(log_gamma(0.0), Error);
}

TEST_CASE("log_gamma_ratio stays accurate for close large arguments") {
  for (double y : {0.7, 3.0, 9.5, 10.85, 12.0, 1e3, 1e6, 1e11}) {
    for (double delta : {-0.25, 0.5, 1.15}) {
      const double x = y + delta;
      // The oracle uses the exact (rounded) difference the function sees.
      const long double exact_delta = static_cast<long double>(x) - static_cast<long double>(y);
      const long double expected =
          -std::log(boost::math::tgamma_delta_ratio(static_cast<long double>(y), exact_delta));
      CHECK(std::abs(log_gamma_ratio(x, y) - static_cast<double>(expected)) <=
            1e-14 * std::max(1.0, std::abs(static_cast<double>(expected))));
    }
  }
  CHECK_THROWS_AS(log_gamma_ratio(0.0, 1.0), Error);
}

TEST_CASE("binomial coefficient examples") {
  CHECK(binom_coeff(1.0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(binom_coeff(1.0, 2) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(binom_coeff(1.0, 3) == doctest::Approx(1.0 / 16.0).epsilon(1e-15));
  CHECK_THROWS_AS(binom_coeff(0.0, 1), Error);
  CHECK_THROWS_AS(binom_coeff(1.5, 1), Error);
  CHECK_THROWS_AS(binom_coeff(1.0, 0), Error);
}

TEST_CASE("binomial coefficients are positive and decreasing") {
  for (double alpha : {0.3, 0.5, 1.0}) {
    const auto a = binom_coeffs(alpha, 5000);
    for (std::size_t j = 1; j < a.size(); ++j) {
      REQUIRE(a[j] > 0.0);
      REQUIRE(a[j] < a[j - 1]);
    }
  }
}

TEST_CASE("recurrence agrees with the gamma-ratio formula") {
  for (double alpha : {0.3, 0.5, 1.0}) {
    const auto a = binom_coeffs(alpha, 10000);
    double worst = 0.0;
    for (std::int64_t j = 1; j <= 10000; ++j)
      worst = std::max(worst, rel(a[static_cast<std::size_t>(j - 1)], binom_coeff_gamma(alpha, j)));
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("partial sums increase toward one") {
  double sum = 0.0, prev = 0.0;
  const auto a = binom_coeffs(1.0, 1000000);
  for (double v : a) {
    sum += v;
    REQUIRE(sum > prev);
    prev = sum;
  }
  CHECK(1.0 - sum < 1e-2);
  CHECK(1.0 - sum > 0.0);
  CHECK(rel(1.0 - sum, binom_tail(1.0, 1000000)) < 1e-8);
  CHECK(binom_tail(0.5, 0) == doctest::Approx(1.0));
  CHECK(binom_tail(1.0, 1) == doctest::Approx(0.5));
}

TEST_CASE("coefficient asymptotic law") {
  for (double alpha : {0.5, 1.0}) {
    const double c1 = binom_coeff_gamma(alpha, 100000) * std::pow(1e5, 1.0 + 0.5 * alpha);
    const double c2 = binom_coeff_gamma(alpha, 200000) * std::pow(2e5, 1.0 + 0.5 * alpha);
    CHECK(rel(c2, c1) < 1e-3);
    // Limit (alpha/2) / Gamma(1 - alpha/2).
    CHECK(rel(c2, 0.5 * alpha / std::tgamma(1.0 - 0.5 * alpha)) < 1e-4);
  }
}

TEST_CASE("bessel_k examples") {
  CHECK(rel(bessel_k(0.5, 1.0), std::sqrt(pi / 2.0) * std::exp(-1.0)) < 1e-14);
  // The leading asymptotic term is off by 1/(8t) at order zero; the ratio
  // tends to one and matches the two-term expansion.
  for (double t : {50.0, 500.0}) {
    const double ratio = bessel_k(0.0, t) / (std::sqrt(pi / (2.0 * t)) * std::exp(-t));
    CHECK(std::abs(ratio - (1.0 - 1.0 / (8.0 * t) + 9.0 / (128.0 * t * t))) < 1e-5);
    CHECK(std::abs(ratio - 1.0) < 1.5 / (8.0 * t));
  }
  CHECK(std::abs(bessel_k(0.0, 1e-3) + std::log(5e-4) + kEulerGamma) < 1e-4);
  CHECK_THROWS_AS(bessel_k(1.0, 0.0), Error);
  CHECK_THROWS_AS(bessel_k(1.0, -1.0), Error);
}

TEST_CASE("bessel_k against an independent implementation") {
  const double orders[] = {0.0, 0.25, 0.5, 1.0, 1.3, 1.5, 2.0, 2.5, 3.0, 4.5, 7.0, 9.5, 10.0};
  double worst = 0.0;
  for (double nu : orders)
    for (double t = 1e-3; t < 200.0; t *= 1.21) {
      const double want = boost::math::cyl_bessel_k(nu, t);
      worst = std::max(worst, rel(bessel_k(nu, t), want));
      CHECK(bessel_k(-nu, t) == bessel_k(nu, t));
    }
  CHECK(worst < 1e-10);
  // Crossover between the series and the continued fraction.
  for (double nu : {0.0, 1.0, 2.0, 3.0})
    CHECK(rel(bessel_k(nu, 2.0 + 1e-12), bessel_k(nu, 2.0)) < 1e-10);
}

TEST_CASE("bessel_k is positive and decreasing") {
  for (double nu : {0.0, 0.5, 1.5, 2.7})
    for (double t = 0.01; t < 50.0; t *= 1.5) {
      CHECK(bessel_k(nu, t) > 0.0);
      CHECK(bessel_k(nu, t * 1.5) < bessel_k(nu, t));
    }
}

TEST_CASE("bessel kernel G_2 in one dimension") {
  for (double r : {0.5, 1.0, 2.0}) CHECK(rel(bessel_kernel_g({1, 1}, r), 0.5 * std::exp(-r)) < 1e-10);
  CHECK_THROWS_AS(bessel_kernel_g({1, 1}, 0.0), Error);
  CHECK_THROWS_AS(bessel_kernel_g({0, 1}, 1.0), Error);
  CHECK_THROWS_AS(bessel_kernel_g({1, 4}, 1.0), Error);
}

TEST_CASE("bessel kernels have unit mass and decrease radially") {
  for (int d : {1, 2, 3})
    for (int j = 1; j <= 5; ++j) {
      if (d != 2) CHECK(std::abs(radial_integral(j, d, 0.0) - 1.0) < 1e-8);
      const double a = bessel_kernel_g({j, d}, 0.5), b = bessel_kernel_g({j, d}, 1.0),
                   c = bessel_kernel_g({j, d}, 2.0);
      CHECK(a > b);
      CHECK(b > c);
      CHECK(c > 0.0);
    }
}

TEST_CASE("kernel ladder matches direct evaluation") {
  for (int d : {1, 2, 3})
    for (double r : {0.01, 0.3, 2.0, 15.0}) {
      BesselKernelLadder ladder(d, r);
      for (int j = 1; j <= 20; ++j) {
        CHECK(ladder.j() == j);
        CHECK(rel(ladder.current(), bessel_kernel_g({j, d}, r)) < 1e-11);
        ladder.advance();
      }
    }
}

TEST_CASE("kernel ladder survives radii where G_2 underflows") {
  // In d = 1, G_{2j} is the density of a sum of j unit Laplace variables,
  // which for large j is normal with variance 2j up to O(1/j) corrections.
  const std::int64_t j = 100000;
  const double var = 2.0 * static_cast<double>(j);
  for (double r : {500.0, 1000.0, 1500.0}) {
    BesselKernelLadder ladder(1, r);
    while (ladder.j() < j) ladder.advance();
    const double normal = std::exp(-r * r / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
    CHECK(rel(ladder.current(), normal) < 1e-4);
  }
  CHECK(bessel_kernel_g({1, 1}, 1000.0) == 0.0);
}

TEST_CASE("kernel value at the origin") {
  for (int d : {1, 2, 3})
    for (int j = 2; j <= 6; ++j) {
      if (2 * j <= d) continue;
      CHECK(rel(bessel_kernel_g({j, d}, 1e-7), bessel_kernel_at_origin(j, d)) < 1e-5);
      CHECK(bessel_kernel_g({j, d}, 1e-300) == bessel_kernel_at_origin(j, d));
    }
  CHECK_THROWS_AS(bessel_kernel_at_origin(1, 2), Error);
}

TEST_CASE("g_moment examples") {
  for (int d : {1, 2, 3})
    for (int j : {1, 4, 100}) CHECK(g_moment(j, 0.0, d) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g_moment(1, 1.0, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rel(radial_integral(3, 2, 0.5), g_moment(3, 0.5, 2)) < 1e-8);
  CHECK_THROWS_AS(g_moment(1, -0.5, 1), Error);
}

TEST_CASE("g_moment matches quadrature and is log-convex in s") {
  for (int d : {1, 3})
    for (int j = 1; j <= 5; ++j) {
      for (double s : {0.0, 0.5, 1.0}) CHECK(rel(radial_integral(j, d, s), g_moment(j, s, d)) < 1e-8);
      const double m0 = g_moment(j, 0.0, d), mh = g_moment(j, 0.5, d), m1 = g_moment(j, 1.0, d);
      CHECK(mh * mh <= m0 * m1);
      CHECK(m1 > m0);
    }
  // For j = 1, d = 1 the moments are Gamma(1 + s): not monotone on [0, 1].
  CHECK(g_moment(1, 0.5, 1) == doctest::Approx(std::tgamma(1.5)).epsilon(1e-14));
}

TEST_CASE("sphere areas") {
  CHECK(sphere_area(1) == doctest::Approx(2.0));
  CHECK(sphere_area(2) == doctest::Approx(2.0 * pi));
  CHECK(sphere_area(3) == doctest::Approx(4.0 * pi));
}
