#include "brq/special.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "brq/error.hpp"

namespace brq::special {

namespace {

using std::numbers::pi;

// Lanczos approximation, g = 7, n = 9.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_sum(double z) {
  double a = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (z + static_cast<double>(i));
  return a;
}

// Stirling correction series sum_k B_{2k} / (2k (2k-1) x^{2k-1}); x >= 10.
double stirling_correction(double x) {
  const double x2 = 1.0 / (x * x);
  return (1.0 / 12.0 -
          x2 * (1.0 / 360.0 -
                x2 * (1.0 / 1260.0 -
                      x2 * (1.0 / 1680.0 -
                            x2 * (1.0 / 1188.0 - x2 * (691.0 / 360360.0 - x2 / 156.0)))))) /
         x;
}

}  // namespace

double gamma(double x) {
  if (x < 0.5) return pi / (std::sin(pi * x) * gamma(1.0 - x));
  const double z = x - 1.0;
  const double t = z + kLanczosG + 0.5;
  return std::sqrt(2.0 * pi) * std::pow(t, z + 0.5) * std::exp(-t) * lanczos_sum(z);
}

double log_gamma(double x) {
  if (!(x > 0.0)) throw Error(ErrorCode::OutOfRange, "log_gamma requires x > 0");
  if (x < 0.5) return std::log(pi / std::sin(pi * x)) - log_gamma(1.0 - x);
  const double z = x - 1.0;
  const double t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * pi) + (z + 0.5) * std::log(t) - t + std::log(lanczos_sum(z));
}

double log_gamma_delta(double y, double delta) {
  const double x = y + delta;
  if (!(x > 0.0) || !(y > 0.0))
    throw Error(ErrorCode::OutOfRange, "log_gamma_ratio requires positive arguments");
  if (x < 10.0 || y < 10.0) return log_gamma(x) - log_gamma(y);
  // Stirling in difference form:
  // (x - 1/2) ln x - (y - 1/2) ln y = (y - 1/2) log1p(delta/y) + delta ln x.
  return (y - 0.5) * std::log1p(delta / y) + delta * std::log(x) - delta +
         stirling_correction(x) - stirling_correction(y);
}

double log_gamma_ratio(double x, double y) { return log_gamma_delta(y, x - y); }

double binom_coeff(double alpha, std::int64_t j) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw Error(ErrorCode::OutOfRange, "alpha must lie in (0, 1]");
  if (j < 1) throw Error(ErrorCode::OutOfRange, "series index j must be >= 1");
  double a = 0.5 * alpha;
  for (std::int64_t k = 1; k < j; ++k)
    a *= (static_cast<double>(k) - 0.5 * alpha) / static_cast<double>(k + 1);
  return a;
}

std::vector<double> binom_coeffs(double alpha, std::int64_t count) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw Error(ErrorCode::OutOfRange, "alpha must lie in (0, 1]");
  std::vector<double> a;
  if (count <= 0) return a;
  a.reserve(static_cast<std::size_t>(count));
  double v = 0.5 * alpha;
  for (std::int64_t k = 1; k <= count; ++k) {
    a.push_back(v);
    v *= (static_cast<double>(k) - 0.5 * alpha) / static_cast<double>(k + 1);
  }
  return a;
}

double binom_coeff_gamma(double alpha, std::int64_t j) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw Error(ErrorCode::OutOfRange, "alpha must lie in (0, 1]");
  if (j < 1) throw Error(ErrorCode::OutOfRange, "series index j must be >= 1");
  // a_j = (alpha/2) / Gamma(1 - alpha/2) * Gamma(j - alpha/2) / Gamma(j + 1)
  const double h = 0.5 * alpha;
  const double jd = static_cast<double>(j);
  return h / gamma(1.0 - h) * std::exp(log_gamma_delta(jd + 1.0, -1.0 - h));
}

double binom_tail(double alpha, std::int64_t J) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw Error(ErrorCode::OutOfRange, "alpha must lie in (0, 1]");
  if (J < 0) throw Error(ErrorCode::OutOfRange, "truncation level must be >= 0");
  const double h = 0.5 * alpha;
  const double Jd = static_cast<double>(J);
  return std::exp(log_gamma_delta(Jd + 1.0, -h)) / gamma(1.0 - h);
}

namespace {

// K_{n+1/2}(t) e^t from the terminating series
//   sqrt(pi / 2t) sum_{k=0}^n (n+k)! / (k! (n-k)!) (2t)^{-k}.
double bessel_k_half_scaled(int n, double t) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= n; ++k) {
    term *= static_cast<double>((n + k) * (n - k + 1)) / (static_cast<double>(k) * 2.0 * t);
    sum += term;
  }
  return std::sqrt(pi / (2.0 * t)) * sum;
}

// K_0(t) and K_1(t) for 0 < t <= 2 by the ascending series.
void bessel_k01_series(double t, double& k0, double& k1) {
  const double q = 0.25 * t * t;
  const double lg = std::log(0.5 * t);
  // K_0 = -(ln(t/2) + gamma) I_0 + sum_k q^k/(k!)^2 H_k
  double term = 1.0, i0 = 1.0, s0 = 0.0, harmonic = 0.0;
  // K_1 = 1/t + ln(t/2) I_1 - (t/4) sum_k (psi(k+1) + psi(k+2)) q^k / (k!(k+1)!)
  double term1 = 1.0, i1 = 1.0, s1 = -2.0 * kEulerGamma + 1.0;
  for (int k = 1; k < 60; ++k) {
    const double kd = static_cast<double>(k);
    term *= q / (kd * kd);
    harmonic += 1.0 / kd;
    i0 += term;
    s0 += term * harmonic;
    term1 *= q / (kd * (kd + 1.0));
    i1 += term1;
    // psi(k+1) + psi(k+2) = -2 gamma + 2 H_k + 1/(k+1)
    s1 += term1 * (-2.0 * kEulerGamma + 2.0 * harmonic + 1.0 / (kd + 1.0));
    if (term < 1e-18 * i0 && term1 < 1e-18 * i1) break;
  }
  k0 = -(lg + kEulerGamma) * i0 + s0;
  k1 = 1.0 / t + lg * (0.5 * t * i1) - 0.25 * t * s1;
}

// e^t K_0(t) and e^t K_1(t) for t > 2 by Steed's method on the second
// continued fraction (Temme's normalization), order mu = 0.
void bessel_k01_steed_scaled(double t, double& k0, double& k1) {
  constexpr double eps = 1e-16;
  const double a1 = 0.25;
  double b = 2.0 * (1.0 + t);
  double d = 1.0 / b;
  double h = d, delh = d;
  double q1 = 0.0, q2 = 1.0;
  double q = a1, c = a1, a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 1; i < 100000; ++i) {
    a -= 2 * i;
    c = -a * c / (i + 1.0);
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < eps) break;
  }
  h = a1 * h;
  k0 = std::sqrt(pi / (2.0 * t)) / s;
  k1 = k0 * (t + 0.5 - h) / t;
}

// K_nu for non-(half-)integer nu:
//   K_nu(t) = 1/2 int_R exp(nu u - t cosh u) du,
// trapezoid rule on a step scaled to the saddle-point width.
double bessel_k_integral(double nu, double t) {
  const double anu = std::abs(nu);
  const double ustar = std::asinh(anu / t);
  auto phi = [&](double u) { return anu * u - t * std::cosh(u); };
  const double peak = phi(ustar);
  const double width = 1.0 / std::sqrt(t * std::cosh(ustar));
  const double step = std::min(0.1, 0.25 * width);
  double sum = 1.0;
  for (int side : {1, -1}) {
    for (int k = 1; k < 10000000; ++k) {
      const double v = phi(ustar + side * k * step) - peak;
      if (v < -50.0) break;
      sum += std::exp(v);
    }
  }
  return std::exp(peak + std::log(0.5 * step * sum));
}

bool is_integer(double x) { return x == std::round(x); }

// log K_nu(t) for integer or half-integer nu, without underflow at large t.
double log_bessel_k_simple(double nu, double t) {
  const double anu = std::abs(nu);
  if (is_integer(anu - 0.5)) return std::log(bessel_k_half_scaled(static_cast<int>(anu - 0.5), t)) - t;
  double k0, k1, shift = 0.0;
  if (t <= 2.0) {
    bessel_k01_series(t, k0, k1);
  } else {
    bessel_k01_steed_scaled(t, k0, k1);
    shift = -t;
  }
  const int n = static_cast<int>(anu);
  if (n == 0) return std::log(k0) + shift;
  double km = k0, kc = k1;
  for (int k = 1; k < n; ++k) {
    const double kn = km + (2.0 * k / t) * kc;
    km = kc;
    kc = kn;
  }
  return std::log(kc) + shift;
}

// log G_{2j}(r) for the first two rungs of the ladder.
double log_bessel_kernel_g_start(int j, int d, double r) {
  const double nu = 0.5 * (d - 2 * j);
  return -0.5 * (d + 2 * j - 2) * std::log(2.0) - 0.5 * d * std::log(pi) -
         log_gamma(static_cast<double>(j)) + 0.5 * (2 * j - d) * std::log(r) +
         log_bessel_k_simple(nu, r);
}

}  // namespace

double bessel_k(double nu, double t) {
  if (!(t > 0.0)) throw Error(ErrorCode::OutOfRange, "bessel_k requires t > 0");
  if (!std::isfinite(nu)) throw Error(ErrorCode::InvalidArgument, "bessel_k order must be finite");
  const double anu = std::abs(nu);
  if (is_integer(anu - 0.5)) {
    const int n = static_cast<int>(anu - 0.5);
    return bessel_k_half_scaled(n, t) * std::exp(-t);
  }
  if (is_integer(anu)) {
    double k0, k1, scale;
    if (t <= 2.0) {
      bessel_k01_series(t, k0, k1);
      scale = 1.0;
    } else {
      bessel_k01_steed_scaled(t, k0, k1);
      scale = std::exp(-t);
    }
    const int n = static_cast<int>(anu);
    if (n == 0) return k0 * scale;
    double km = k0, kc = k1;
    for (int k = 1; k < n; ++k) {
      const double kn = km + (2.0 * k / t) * kc;
      km = kc;
      kc = kn;
    }
    return kc * scale;
  }
  return bessel_k_integral(anu, t);
}

double bessel_kernel_g(const BesselKernelParams& params, double r) {
  if (!(r > 0.0)) throw Error(ErrorCode::OutOfRange, "Bessel kernel radius must be > 0");
  if (params.j < 1) throw Error(ErrorCode::OutOfRange, "kernel index j must be >= 1");
  if (params.d < 1 || params.d > 3)
    throw Error(ErrorCode::InvalidDimension, "kernel dimension must be 1, 2 or 3");
  const int j = params.j;
  const int d = params.d;
  const double nu = params.order();
  // Below this radius the smooth kernels equal their origin value to double
  // precision, while K_nu(r) r^|nu| would overflow in the product.
  if (2 * j > d && r < 1e-20) return bessel_kernel_at_origin(j, d);
  if (std::abs(nu) > 10.0) {
    BesselKernelLadder ladder(d, r);
    while (ladder.j() < j) ladder.advance();
    return ladder.current();
  }
  const double log_pref = -0.5 * (d + 2 * j - 2) * std::log(2.0) - 0.5 * d * std::log(pi) -
                          log_gamma(static_cast<double>(j));
  const double k = bessel_k(nu, r);
  if (k == 0.0) return 0.0;  // underflow; the power factor may overflow
  return std::exp(log_pref + 0.5 * (2 * j - d) * std::log(r)) * k;
}

BesselKernelLadder::BesselKernelLadder(int d, double r) : d_(d), r2_(r * r) {
  if (!(r > 0.0)) throw Error(ErrorCode::OutOfRange, "Bessel kernel radius must be > 0");
  const double l1 = log_bessel_kernel_g_start(1, d, r);
  const double l2 = log_bessel_kernel_g_start(2, d, r);
  log_scale_ = std::max(l1, l2);
  scale_ = std::exp(log_scale_);
  cur_ = std::exp(l1 - log_scale_);
  next_ = std::exp(l2 - log_scale_);
}

double BesselKernelLadder::current() const noexcept {
  if (scale_ > 0.0 && std::isfinite(scale_)) return cur_ * scale_;
  if (cur_ == 0.0) return 0.0;
  return std::exp(std::log(cur_) + log_scale_);
}

void BesselKernelLadder::rescale() noexcept {
  constexpr double kHigh = 1e150;
  const double m = std::max(cur_, next_);
  if ((m < kHigh && m > 1.0 / kHigh) || m == 0.0) return;
  const double lm = std::log(m);
  const double f = std::exp(-lm);
  prev_ *= f;
  cur_ *= f;
  next_ *= f;
  log_scale_ += lm;
  scale_ = std::exp(log_scale_);
}

void BesselKernelLadder::advance() noexcept {
  prev_ = cur_;
  cur_ = next_;
  ++j_;
  const double j = static_cast<double>(j_);
  next_ = ((j - 0.5 * d_) / j) * cur_ + r2_ / (4.0 * j * (j - 1.0)) * prev_;
  rescale();
}

double bessel_kernel_at_origin(std::int64_t j, int d) {
  const double jd = static_cast<double>(j);
  if (!(2.0 * jd > d)) throw Error(ErrorCode::Singular, "G_{2j} is singular at the origin for 2j <= d");
  return std::exp(log_gamma_delta(jd, -0.5 * d) - 0.5 * d * std::log(4.0 * pi));
}

double g_moment(std::int64_t j, double s, int d) {
  if (!(s >= 0.0)) throw Error(ErrorCode::OutOfRange, "moment exponent s must be >= 0");
  if (j < 1) throw Error(ErrorCode::OutOfRange, "kernel index j must be >= 1");
  if (d < 1 || d > 3) throw Error(ErrorCode::InvalidDimension, "dimension must be 1, 2 or 3");
  const double jd = static_cast<double>(j);
  return std::pow(2.0, s) * std::exp(log_gamma(0.5 * (d + s)) - log_gamma(0.5 * d) +
                                     log_gamma_delta(jd, 0.5 * s));
}

double sphere_area(int d) {
  switch (d) {
    case 1: return 2.0;
    case 2: return 2.0 * pi;
    case 3: return 4.0 * pi;
    default: throw Error(ErrorCode::InvalidDimension, "dimension must be 1, 2 or 3");
  }
}

}  // namespace brq::special
