#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>

#include "brq/approx.hpp"
#include "brq/error.hpp"
#include "brq/symbols.hpp"

using namespace brq;
using std::numbers::pi;

namespace {

GridSpec grid1() { return make_grid(1, 4096, 64.0); }

SampledField scaled(const SampledField& f, double c) {
  SampledField out = f;
  for (auto& v : out.values) v *= c;
  return out;
}

CurveResult power_curve(const std::vector<double>& mu, const std::function<double(double)>& fn) {
  CurveResult c;
  c.mu = mu;
  std::vector<double> v;
  for (double m : mu) v.push_back(fn(m));
  c.add_series("y", v);
  return c;
}

}  // namespace

TEST_CASE("geometric grid") {
  const auto g = geometric_grid(2.0, 128.0, 2);
  REQUIRE(g.size() == 13);
  CHECK(g.front() == 2.0);
  CHECK(g.back() == doctest::Approx(128.0));
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] / g[i - 1] == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("curve result validation") {
  CurveResult c;
  c.mu = {1.0, 2.0};
  c.add_series("a", {0.0, 1.0});
  CHECK_NOTHROW(c.validate());
  CHECK(c.has_series("a"));
  CHECK(!c.has_series("b"));
  CHECK_THROWS_AS(c.series("b"), Error);
  CHECK_THROWS_AS(c.add_series("c", {1.0}), Error);
  c.mu = {2.0, 1.0};
  CHECK_THROWS_AS(c.validate(), Error);
  c.mu = {1.0, 2.0};
  c.columns[0][1] = -1.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c.columns[0][1] = std::nan("");
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("test functions") {
  const auto g = grid1();
  const auto ind = make_test_function(g, TestFunctionSpec::indicator());
  double mass = 0.0;
  for (const auto& v : ind.values) mass += v.real() * g.spacing();
  CHECK(mass == doctest::Approx(1.0));
  const auto ann = make_test_function(g, TestFunctionSpec::annular(2.0, 4.0, true));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = std::abs(g.position(i)[0]);
    if (r <= 2.0 || r >= 4.0) CHECK(ann.values[i] == Complex(0.0, 0.0));
  }
  const auto bl = make_test_function(g, TestFunctionSpec::band_limited(3, 4.0, true));
  CHECK(bl.max_imag() == 0.0);
  const auto spec = forward(bl);
  CHECK(std::abs(spec.coefficients[0]) < 1e-12);
  const auto again = make_test_function(g, TestFunctionSpec::band_limited(3, 4.0, true));
  CHECK(again.values == bl.values);
  CHECK(recommended_sampling(TestFunctionSpec::indicator()).mode == OmegaSampling::Mode::Lattice);
  CHECK(recommended_sampling(TestFunctionSpec::gaussian()).mode == OmegaSampling::Mode::Spectral);
}

TEST_CASE("approx_error basics") {
  const auto g = grid1();
  CHECK(approx_error(SampledField::zeros(g), 1.0, 4.0, 2.0) == 0.0);
  // A pure mode is an eigenfunction of the multiplier.
  const double xi = 2.0 * pi * 5.0 / g.length();
  const auto mode = SampledField::from_function(g, [&](const auto& x) { return std::exp(Complex(0.0, xi * x[0])); });
  for (double p : {1.0, 2.0, 3.0}) {
    const double expect = symbol_value(SymbolSpec::quotient(0.5, 4.0), xi) * lp_norm(mode, p);
    CHECK(approx_error(mode, 0.5, 4.0, p) == doctest::Approx(expect).epsilon(1e-10));
  }
  const auto gauss = make_test_function(g, TestFunctionSpec::gaussian());
  double prev = 1e300;
  for (double mu : geometric_grid(2.0, 128.0)) {
    const double e = approx_error(gauss, 1.0, mu, 2.0);
    CHECK(e <= prev);
    prev = e;
  }
}

TEST_CASE("equivalence curve series and bounds") {
  const auto g = make_grid(1, 16384, 64.0);
  const auto gauss = make_test_function(g, TestFunctionSpec::gaussian());
  const auto mu = geometric_grid(2.0, 128.0);
  const auto c = equivalence_curve(gauss, 1.0, 2.0, mu);
  CHECK(c.has_series("err"));
  CHECK(c.has_series("omega"));
  CHECK(!c.has_series("log_envelope"));
  const auto& r = c.series("ratio");
  CHECK(*std::max_element(r.begin(), r.end()) / *std::min_element(r.begin(), r.end()) < 10.0);

  const auto spec = TestFunctionSpec::indicator();
  const auto ind = make_test_function(g, spec);
  const auto half = equivalence_curve(ind, 0.5, 2.0, mu, recommended_sampling(spec));
  REQUIRE(half.has_series("interp"));
  REQUIRE(half.has_series("two_term"));
  CurveResult dom = half;
  const auto res = fitted_domination(dom, "err", "interp", 0, 1.2);
  CHECK(res.holds);

  const auto zero = equivalence_curve(SampledField::zeros(g), 0.5, 2.0, mu);
  for (const auto& col : zero.columns)
    for (double v : col) CHECK(v == 0.0);

  const auto l1 = equivalence_curve(ind, 1.0, 1.0, mu, recommended_sampling(spec));
  CHECK(l1.has_series("log_envelope"));

  CHECK_THROWS_AS(equivalence_curve(gauss, 1.0, 2.0, {1.0, 2.0}), Error);
  CHECK_THROWS_AS(equivalence_curve(gauss, 1.0, 2.0, {2.0, 1e4}), Error);
}

TEST_CASE("K-functional upper bound") {
  const auto g = grid1();
  CHECK(k_functional_upper(SampledField::zeros(g), 4.0, 2.0) == 0.0);
  const auto gauss = make_test_function(g, TestFunctionSpec::gaussian());
  for (double mu : {4.0, 16.0, 64.0}) {
    const double ratio = k_functional_upper(gauss, mu, 2.0) / approx_error(gauss, 1.0, mu, 2.0);
    CHECK(ratio >= 1.0 - 1e-6);
    CHECK(ratio <= 20.0);
  }
  // With the spectrum far below mu, T f is nearly f and the gradient term dominates.
  const auto bl = make_test_function(g, TestFunctionSpec::band_limited(5, 1.0, true));
  const double mu = 200.0;
  const auto grad = apply_radial(forward(bl), [](double x) { return x; });
  const double expect = l2_norm(grad) / mu;
  CHECK(k_functional_upper(bl, mu, 2.0) == doctest::Approx(expect).epsilon(0.2));
}

TEST_CASE("rate fits") {
  const auto mu = geometric_grid(2.0, 256.0);
  auto exact = power_curve(mu, [](double m) { return 3.0 / m; });
  CHECK(rate_fit(exact, "y", 2.0, 256.0).slope == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(exact.fits.size() == 1);
  CHECK(exact.fits[0].series == "y");
  const auto flat = power_curve(mu, [](double) { return 2.0; });
  CHECK(std::abs(rate_fit(flat, "y", 2.0, 256.0).slope) < 1e-12);
  const auto wobble = power_curve(mu, [](double m) { return (1.0 + 0.01 * std::sin(std::log(m))) / m; });
  CHECK(rate_fit(wobble, "y", 2.0, 256.0).slope == doctest::Approx(-1.0).epsilon(0.02));
  CHECK_THROWS_AS(rate_fit(exact, "y", 2.0, 4.0), Error);
  CHECK_THROWS_AS(rate_fit(exact, "missing", 2.0, 256.0), Error);
}

TEST_CASE("Lipschitz exponents") {
  CHECK(lipschitz_exponent(TestFunctionSpec::Kind::Indicator, 2.0) == 0.5);
  CHECK(lipschitz_exponent(TestFunctionSpec::Kind::Indicator, 1.0) == 1.0);
  CHECK(lipschitz_exponent(TestFunctionSpec::Kind::Tent, 2.0) == 1.0);
}

TEST_CASE("Lipschitz rate of the tent on a small grid") {
  const auto g = make_grid(1, 8192, 64.0);
  const auto c = lipschitz_rate(g, TestFunctionSpec::tent(), 1.0, 2.0, geometric_grid(2.0, 128.0), 8.0);
  REQUIRE(!c.fits.empty());
  CHECK(c.fits.back().fit.slope == doctest::Approx(-1.0).epsilon(0.15));
}

TEST_CASE("saturation") {
  const auto g = make_grid(1, 8192, 64.0);
  const auto mu = geometric_grid(2.0, 128.0);
  const auto zero = saturation_curve(SampledField::zeros(g), 2.0, mu);
  for (double v : zero.series("mu_err")) CHECK(v == 0.0);
  const auto gauss = make_test_function(g, TestFunctionSpec::gaussian());
  const auto c = saturation_curve(gauss, 2.0, mu);
  const auto& m1 = c.series("mu_err");
  const auto& m12 = c.series("mu12_err");
  const double ref = c.series("reference").front();
  const std::size_t n = m1.size();
  for (std::size_t i = n - 3; i < n; ++i) {
    CHECK(m1[i] == doctest::Approx(m1[n - 1]).epsilon(0.05));
    CHECK(m1[i] == doctest::Approx(ref).epsilon(0.2));
  }
  for (std::size_t i = 1; i < n; ++i) CHECK(m12[i] > m12[i - 1]);
}

TEST_CASE("Besov ratio edge cases") {
  const auto g = make_grid(1, 1 << 14, 16.0);
  const auto zero = besov_ratio(SampledField::zeros(g), 0.5, 2.0, 2.0, 256.0);
  CHECK(zero.ratio == 1.0);
  CHECK(zero.lhs == 0.0);
  const auto gauss = make_test_function(g, TestFunctionSpec::gaussian());
  const auto r = besov_ratio(gauss, 0.5, 2.0, 2.0, 256.0);
  CHECK(r.ratio > 0.1);
  CHECK(r.ratio < 10.0);
  CHECK_THROWS_AS(besov_ratio(gauss, 1.5, 2.0, 2.0, 256.0), Error);
  CHECK_THROWS_AS(besov_ratio(gauss, 0.5, 1.0, 2.0, 256.0), Error);
  CHECK_THROWS_AS(besov_ratio(gauss, 0.5, 2.0, 0.5, 256.0), Error);
  CHECK_THROWS_AS(besov_ratio(gauss, 0.5, 2.0, 2.0, 1e5), Error);
}

TEST_CASE("truncated maximal function") {
  const auto g = make_grid(1, 1024, 16.0);
  const double h = g.spacing();
  const auto c = SampledField::from_function(g, [](const auto&) { return Complex(2.5, 0.0); });
  const double delta = 16 * h;
  const auto m = truncated_maximal(c, 1.0, delta);
  for (const auto& v : m.values) CHECK(v.real() == doctest::Approx(2.0 * 2.5 * delta).epsilon(1e-12));
  const auto mh = truncated_maximal(c, 0.5, delta);
  for (const auto& v : mh.values)
    CHECK(v.real() == doctest::Approx(2.0 * 2.5 * std::pow(delta, 0.5)).epsilon(1e-12));

  auto spec = TestFunctionSpec::indicator();
  spec.center = {-2.0, 0.0, 0.0};
  spec.width = 4.0;
  const auto ind = make_test_function(g, spec);
  const auto mi = truncated_maximal(ind, 1.0, delta);
  CHECK(mi.values[g.nearest_index({0.0, 0.0, 0.0})].real() == doctest::Approx(2.0 * delta));

  const auto gauss = make_test_function(g, TestFunctionSpec::gaussian());
  const auto a = truncated_maximal(gauss, 0.7, delta);
  const auto b = truncated_maximal(gauss, 0.7, 2.0 * delta);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(a.values[i].real() <= b.values[i].real() + 1e-15);
  CHECK_THROWS_AS(truncated_maximal(gauss, 1.0, 0.5 * h), Error);

  const auto g2 = make_grid(2, 64, 8.0);
  const auto c2 = SampledField::from_function(g2, [](const auto&) { return Complex(1.0, 0.0); });
  const auto m2 = truncated_maximal(c2, 1.0, 4.0 * g2.spacing());
  for (const auto& v : m2.values) CHECK(v.real() > 0.0);
}

TEST_CASE("fitted domination") {
  CurveResult c;
  c.mu = {1.0, 2.0, 4.0};
  c.add_series("lhs", {1.0, 0.5, 0.0});
  c.add_series("rhs", {2.0, 1.0, 0.0});
  const auto ok = fitted_domination(c, "lhs", "rhs", 0, 1.5);
  CHECK(ok.holds);
  CHECK(ok.constant == doctest::Approx(0.75));
  CurveResult bad = c;
  bad.columns[0] = {1.0, 2.0, 0.0};
  CHECK(!fitted_domination(bad, "lhs", "rhs", 0, 1.5).holds);
}

TEST_CASE("Muckenhoupt-Wheeden check") {
  const auto g = make_grid(1, 4096, 64.0);
  const auto mu = geometric_grid(2.0, 32.0);
  const auto zero = muckenhoupt_wheeden_check(SampledField::zeros(g), 2.0, mu);
  for (const auto& col : zero.columns)
    for (double v : col) CHECK(v == 0.0);
  const auto f = make_test_function(g, TestFunctionSpec::band_limited(11, 4.0, true));
  const auto c1 = muckenhoupt_wheeden_check(f, 2.0, mu);
  const auto c2 = muckenhoupt_wheeden_check(scaled(f, 2.0), 2.0, mu);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    CHECK(c2.series("lhs")[i] == doctest::Approx(2.0 * c1.series("lhs")[i]).epsilon(1e-10));
    CHECK(c2.series("rhs")[i] == doctest::Approx(2.0 * c1.series("rhs")[i]).epsilon(1e-10));
  }
  CHECK(fitted_domination(c1, "lhs", "rhs", 0, 1.5).holds);
  const auto gauss = make_test_function(g, TestFunctionSpec::gaussian());
  CHECK_THROWS_AS(muckenhoupt_wheeden_check(gauss, 2.0, mu), Error);
  CHECK_NOTHROW(muckenhoupt_wheeden_check(gauss, 2.0, mu, DcPolicy::Zero));
  CHECK_THROWS_AS(muckenhoupt_wheeden_check(f, 1.0, mu), Error);
}

TEST_CASE("localization") {
  const auto g = make_grid(1, 8192, 64.0);
  const auto mu = geometric_grid(4.0, 128.0);
  const auto zero = localization_slope(SampledField::zeros(g), 1.0, {0.0, 0.0, 0.0}, 1.0, mu);
  bool undefined = false;
  for (const auto& [k, v] : zero.notes)
    if (k == "slope") undefined = v == "undefined";
  CHECK(undefined);
  const auto ann = make_test_function(g, TestFunctionSpec::annular(2.0, 4.0, true));
  const auto c = localization_slope(ann, 1.0, {0.0, 0.0, 0.0}, 1.0, mu);
  REQUIRE(!c.fits.empty());
  CHECK(c.fits.back().fit.slope <= -0.4);
  CHECK_THROWS_AS(localization_slope(ann, 1.0, {0.0, 0.0, 0.0}, 1.0, {1.0, 2.0, 4.0, 8.0}), Error);
  CHECK_THROWS_AS(localization_slope(ann, 1.0, {0.0, 0.0, 0.0}, 3.0, mu), Error);

  const auto consts = localization_constants(g, 1.0, {1.0, 2.0, 4.0}, 1.0, mu);
  REQUIRE(consts.size() == 3);
  CHECK(consts[1] < consts[0]);
  CHECK(consts[2] < consts[1]);
}

TEST_CASE("uniform maximal check") {
  const auto g = make_grid(1, 8192, 64.0);
  const auto mu = geometric_grid(2.0, 64.0);
  CHECK(uniform_maximal_check(SampledField::zeros(g), 1.0, 0.5, 1.0, mu) == 0.0);
  const auto ann = make_test_function(g, TestFunctionSpec::annular(1.0, 3.0, false));
  const double v1 = uniform_maximal_check(ann, 1.0, 0.5, 1.0, mu);
  auto wider = mu;
  wider.push_back(128.0);
  const double v2 = uniform_maximal_check(ann, 1.0, 0.5, 1.0, wider);
  CHECK(std::isfinite(v1));
  CHECK(v2 >= v1);
  CHECK(v2 < 3.0 * v1);
  // Halving the gap delta - sigma grows the value at most by the log law.
  const double v3 = uniform_maximal_check(ann, 1.0, 0.75, 1.0, mu);
  const double gap = 0.5;
  const double factor = 2.0 * (1.0 + std::abs(std::log(gap / 2.0) / std::log(gap)));
  CHECK(v3 <= factor * v1);
  CHECK_THROWS_AS(uniform_maximal_check(ann, 1.0, 1.0, 1.0, mu), Error);
  CHECK_THROWS_AS(uniform_maximal_check(ann, 1.0, 0.5, 2.0, mu), Error);
}

TEST_CASE("log-weighted rate") {
  CHECK_THROWS_AS(log_weighted_norm_squared(log_weighted_profile(1.0)), Error);
  CHECK(std::isfinite(log_weighted_norm_squared(log_weighted_profile(1.5))));
  const auto mu = geometric_grid(4.0, 4096.0);
  const auto c = ksp_log_rate(log_weighted_profile(1.5), mu);
  const auto& s = c.series("scaled");
  CHECK(*std::max_element(s.begin(), s.end()) < 10.0 * s.front());

  const auto compact = [](double xi) { return std::abs(xi) <= 1.0 ? 1.0 : 0.0; };
  const auto cc = ksp_log_rate(compact, mu);
  const auto& e = cc.series("err");
  const std::size_t n = e.size();
  CHECK(e[n - 1] * mu[n - 1] == doctest::Approx(e[n - 3] * mu[n - 3]).epsilon(0.01));

  const auto zero = ksp_log_rate([](double) { return 0.0; }, mu);
  for (double v : zero.series("err")) CHECK(v == 0.0);
}

TEST_CASE("parallel_for") {
  std::vector<int> out(1000, 0);
  parallel_for(out.size(), [&](std::size_t i) { out[i] = static_cast<int>(i) * 2; });
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(2 * i));
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) { if (i == 7) throw Error(ErrorCode::InvalidArgument, "x"); }),
                  Error);
  std::atomic<int> calls{0};
  parallel_for(0, [&](std::size_t) { ++calls; });
  CHECK(calls == 0);
}

TEST_CASE("experiments are deterministic") {
  const auto g = grid1();
  const auto f = make_test_function(g, TestFunctionSpec::band_limited(9, 3.0));
  const auto mu = geometric_grid(2.0, 32.0);
  const auto a = equivalence_curve(f, 0.5, 2.0, mu);
  const auto b = equivalence_curve(f, 0.5, 2.0, mu);
  CHECK(a.columns == b.columns);
}
