#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "brq/error.hpp"
#include "brq/grid.hpp"

using namespace brq;
using std::numbers::pi;

namespace {

SampledField gaussian(const GridSpec& g, double shift = 0.0) {
  return SampledField::from_function(g, [&](const auto& x) {
    double r2 = 0.0;
    for (int a = 0; a < g.dim(); ++a) r2 += (x[a] - shift) * (x[a] - shift);
    return Complex(std::exp(-0.5 * r2), 0.0);
  });
}

SampledField unit_indicator(const GridSpec& g) {
  return SampledField::from_function(
      g, [](const auto& x) { return Complex(x[0] >= 0.0 && x[0] < 1.0 ? 1.0 : 0.0, 0.0); });
}

double max_abs_diff(const SampledField& a, const SampledField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

SampledField pure_mode(const GridSpec& g, std::int64_t k) {
  const double xi = 2.0 * pi * static_cast<double>(k) / g.length();
  return SampledField::from_function(g, [&](const auto& x) { return std::polar(1.0, xi * x[0]); });
}

}  // namespace

TEST_CASE("make_grid derives spacing and frequency step") {
  const auto g = make_grid(1, 256, 64.0);
  CHECK(g.spacing() == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(g.frequency_step() == doctest::Approx(2.0 * pi / 64.0).epsilon(1e-15));
  CHECK(g.size() == 256);
  CHECK(g.nyquist() == doctest::Approx(pi / 0.25));
  CHECK(g.coordinate(0) == doctest::Approx(-32.0));
  CHECK(g.signed_index(200) == 200 - 256);
}

TEST_CASE("make_grid rejects invalid input") {
  auto code = [](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  CHECK(code([] { make_grid(1, 7, 64.0); }) == ErrorCode::InvalidSize);
  CHECK(code([] { make_grid(1, 4, 64.0); }) == ErrorCode::InvalidSize);
  CHECK(code([] { make_grid(4, 256, 64.0); }) == ErrorCode::InvalidDimension);
  CHECK(code([] { make_grid(0, 256, 64.0); }) == ErrorCode::InvalidDimension);
  CHECK(code([] { make_grid(1, 256, 0.0); }) == ErrorCode::InvalidLength);
  CHECK(code([] { make_grid(1, 256, -1.0); }) == ErrorCode::InvalidLength);
}

TEST_CASE("forward and inverse round trip on a random field") {
  for (int d : {1, 2, 3}) {
    const auto g = make_grid(d, d == 1 ? 1024 : (d == 2 ? 64 : 16), 32.0);
    const auto f = random_band_limited(g, 42, 0.5 * g.nyquist());
    const auto back = inverse(forward(f));
    CHECK(max_abs_diff(f, back) <= 1e-12 * lp_norm(f, 2.0) + 1e-15);
  }
}

TEST_CASE("Gaussian transform approximates the continuum transform") {
  const auto g = make_grid(1, 1024, 64.0);
  const auto s = forward(gaussian(g));
  double worst = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double xi = g.wavevector(k)[0];
    if (std::abs(xi) > g.nyquist() - 2.0) continue;
    worst = std::max(worst, std::abs(s.coefficients[k] - std::sqrt(2.0 * pi) * std::exp(-0.5 * xi * xi)));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("pure mode has a single nonzero coefficient") {
  const auto g = make_grid(1, 128, 16.0);
  const auto s = forward(pure_mode(g, 5));
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.signed_index(k) == 5)
      CHECK(std::abs(s.coefficients[k]) == doctest::Approx(16.0));
    else
      CHECK(std::abs(s.coefficients[k]) <= 1e-12);
  }
}

TEST_CASE("Parseval holds for band-limited fields") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto g = make_grid(2, 64, 32.0);
    const auto f = random_band_limited(g, seed, 3.0);
    const double a = lp_norm(f, 2.0), b = l2_norm(forward(f));
    CHECK(std::abs(a - b) / a < 1e-12);
  }
}

TEST_CASE("lp_norm examples") {
  const auto g = make_grid(1, 1024, 64.0);
  CHECK(lp_norm(unit_indicator(g), 1.0) == doctest::Approx(1.0).epsilon(g.spacing()));
  CHECK(lp_norm(SampledField::zeros(g), 2.0) == 0.0);
  CHECK(std::abs(lp_norm(gaussian(g), 2.0) - std::pow(pi, 0.25)) <= 1e-8);
  CHECK(lp_norm(gaussian(g), 3.0) == doctest::Approx(std::pow(std::sqrt(2.0 * pi / 3.0), 1.0 / 3.0)));
  CHECK_THROWS_AS(lp_norm(gaussian(g), 0.5), Error);
  CHECK_THROWS_AS(lp_norm(gaussian(g), INFINITY), Error);
}

TEST_CASE("shift realizes f(x + offset)") {
  const auto g = make_grid(1, 1024, 64.0);
  const auto f = gaussian(g);
  CHECK(max_abs_diff(shift(f, {0.0, 0.0, 0.0}), f) <= 1e-14);
  // Translation by +1 moves the bump to x = -1.
  CHECK(max_abs_diff(shift(f, {1.0, 0.0, 0.0}), gaussian(g, -1.0)) <= 1e-8);
  CHECK(max_abs_diff(shift(f, {-0.37, 0.0, 0.0}), gaussian(g, 0.37)) <= 1e-8);
  CHECK_THROWS_AS(shift(f, {32.0, 0.0, 0.0}), Error);
}

TEST_CASE("shift multiplies a pure mode by its phase") {
  const auto g = make_grid(1, 128, 16.0);
  const auto mode = pure_mode(g, 3);
  const double xi = 2.0 * pi * 3.0 / 16.0, h = 0.3;
  const auto moved = shift(mode, {h, 0.0, 0.0});
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    worst = std::max(worst, std::abs(moved.values[i] - std::polar(1.0, xi * h) * mode.values[i]));
  CHECK(worst <= 1e-12);
}

TEST_CASE("shift is an isometry") {
  // |f|^p has kinks at the zeros of f when p = 1; the fine grid keeps the
  // Riemann sum error near h^2.
  const auto g = make_grid(1, 16384, 32.0);
  const auto f = random_band_limited(g, 9, 4.0);
  for (double p : {1.0, 1.5, 2.0, 4.0}) {
    const double a = lp_norm(f, p), b = lp_norm(shift(f, {0.731, 0.0, 0.0}), p);
    INFO("p = " << p);
    CHECK(std::abs(a - b) / a <= (p == 2.0 ? 1e-12 : 1e-6));
  }
}

TEST_CASE("lattice_shift is an exact circular translation") {
  const auto g = make_grid(2, 16, 4.0);
  const auto f = random_band_limited(g, 5, 3.0);
  const auto moved = lattice_shift(f, {3, -2, 0});
  const auto idx = g.unflatten(17);
  const std::array<std::size_t, 3> src{(idx[0] + 3) % 16, (idx[1] + 14) % 16, 0};
  CHECK(moved.values[17] == f.values[g.flatten(src)]);
  CHECK(max_abs_diff(lattice_shift(f, {16, 0, 0}), f) == 0.0);
}

TEST_CASE("modulus of continuity examples") {
  const auto g = make_grid(1, 1024, 64.0);
  const auto ind = unit_indicator(g);
  OmegaSampling lattice;
  lattice.mode = OmegaSampling::Mode::Lattice;
  CHECK(modulus_of_continuity(ind, 0.0, 1.0) == 0.0);
  CHECK(modulus_of_continuity(ind, 0.25, 1.0, lattice) == doctest::Approx(0.5).epsilon(2.0 * g.spacing() / 0.5));
  CHECK_THROWS_AS(modulus_of_continuity(ind, -0.1, 1.0), Error);

  // Mean-value bound with the derivative norm by quadrature.
  const auto f = gaussian(g);
  using boost::math::quadrature::gauss_kronrod;
  const double dnorm = std::sqrt(gauss_kronrod<double, 61>::integrate(
      [](double x) { return x * x * std::exp(-x * x); }, -30.0, 30.0, 10, 1e-14));
  const double w = modulus_of_continuity(f, 0.1, 2.0);
  CHECK(w <= 0.1 * dnorm);
  CHECK(w >= 0.09 * dnorm);
  CHECK(w <= 2.0 * lp_norm(f, 2.0));
}

TEST_CASE("modulus is monotone and subadditive on a shared lattice") {
  const auto g = make_grid(1, 2048, 32.0);
  const auto f = random_band_limited(g, 17, 6.0);
  OmegaSampling s;
  s.mode = OmegaSampling::Mode::Lattice;
  s.exhaustive = true;
  const double h = g.spacing();
  double prev = 0.0;
  for (int k = 1; k <= 24; ++k) {
    const double w = modulus_of_continuity(f, k * h, 2.0, s);
    CHECK(w >= prev);
    prev = w;
  }
  for (int a : {2, 5, 8})
    for (int b : {3, 7}) {
      const double lhs = modulus_of_continuity(f, (a + b) * h, 1.5, s);
      const double rhs = modulus_of_continuity(f, a * h, 1.5, s) + modulus_of_continuity(f, b * h, 1.5, s);
      CHECK(lhs <= rhs * (1.0 + 1e-12));
    }
}

TEST_CASE("modulus dilation bound with slack") {
  const auto g = make_grid(1, 2048, 32.0);
  const auto f = random_band_limited(g, 23, 5.0);
  for (double t : {0.05, 0.2})
    for (double gamma : {2.0, 3.5}) {
      const double lhs = modulus_of_continuity(f, gamma * t, 2.0);
      const double rhs = (1.0 + gamma) * modulus_of_continuity(f, t, 2.0);
      CHECK(lhs <= 1.05 * rhs);
    }
}

TEST_CASE("modulus in higher dimension uses diagonals") {
  const auto g = make_grid(2, 64, 16.0);
  const auto f = gaussian(g);
  OmegaSampling axes;
  axes.diagonals = false;
  const double with = modulus_of_continuity(f, 0.5, 2.0);
  const double without = modulus_of_continuity(f, 0.5, 2.0, axes);
  CHECK(with >= without * (1.0 - 1e-12));
  CHECK(with > 0.0);
}

TEST_CASE("random band-limited fields") {
  const auto g = make_grid(1, 512, 32.0);
  const auto a = random_band_limited(g, 99, 3.0);
  const auto b = random_band_limited(g, 99, 3.0);
  CHECK(a.values == b.values);
  CHECK(a.max_imag() == 0.0);
  CHECK(lp_norm(a, 2.0) == doctest::Approx(1.0));
  const auto s = forward(a);
  for (std::size_t k = 0; k < g.size(); ++k)
    if (g.frequency_norm(k) > 3.0) CHECK(std::abs(s.coefficients[k]) <= 1e-13);

  const auto c = random_band_limited(g, 4, 0.0);
  for (const auto& v : c.values) CHECK(v.real() == doctest::Approx(c.values[0].real()));
  CHECK_THROWS_AS(random_band_limited(g, 1, g.nyquist()), Error);
  CHECK_THROWS_AS(random_band_limited(g, 1, -1.0), Error);
}

TEST_CASE("sampled fields reject non-finite values") {
  const auto g = make_grid(1, 8, 1.0);
  auto f = SampledField::zeros(g);
  f.values[3] = Complex(NAN, 0.0);
  CHECK_THROWS_AS(f.validate(), Error);
}
