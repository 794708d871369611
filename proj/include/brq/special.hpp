#pragma once

#include <cstdint>
#include <vector>

namespace brq::special {

inline constexpr double kEulerGamma = 0.57721566490153286060651209;

/// Lanczos gamma, relative error below 1e-13 on (0, 50]. Reflection for x < 1/2.
double gamma(double x);
/// log Gamma(x) for x > 0.
double log_gamma(double x);
/// log(Gamma(x) / Gamma(y)) for x, y > 0, accurate when x and y are large and close.
double log_gamma_ratio(double x, double y);
/// log(Gamma(y + delta) / Gamma(y)) with the offset passed exactly, so large y
/// does not round it away.
double log_gamma_delta(double y, double delta);

/// a_{alpha,j} = |binom(alpha/2, j)|, the coefficients of
/// (1 - t)^{alpha/2} = 1 - sum_j a_{alpha,j} t^j. Computed by the recurrence
/// a_1 = alpha/2, a_{j+1} = a_j (j - alpha/2) / (j + 1).
/// Requires 0 < alpha <= 1 and j >= 1.
double binom_coeff(double alpha, std::int64_t j);
/// a_{alpha,1..count} by the same recurrence.
std::vector<double> binom_coeffs(double alpha, std::int64_t count);
/// Same values from Gamma ratios in log space; independent of the recurrence.
double binom_coeff_gamma(double alpha, std::int64_t j);
/// Exact tail 1 - sum_{j<=J} a_{alpha,j}
///   = Gamma(J + 1 - alpha/2) / (Gamma(1 - alpha/2) Gamma(J + 1)),
/// which follows from the partial-sum identity for binomial series. J >= 0.
double binom_tail(double alpha, std::int64_t J);

/// Modified Bessel function of the second kind K_nu(t), real nu, t > 0.
/// Half-integer orders use the finite closed form; integer orders use the
/// K_0/K_1 power series (t <= 2) or Steed's continued fraction (t > 2) plus
/// upward recurrence; other orders integrate exp(nu u - t cosh u) with the
/// trapezoid rule centered at the saddle point.
double bessel_k(double nu, double t);

struct BesselKernelParams {
  int j = 1;  ///< series index, kernel order 2j
  int d = 1;  ///< dimension
  double order() const { return 0.5 * (d - 2 * j); }
};

/// G_{2j}(r): the kernel whose Fourier transform is (1 + |xi|^2)^{-j} on R^d,
///   G_{2j}(r) = K_{(d-2j)/2}(r) r^{(2j-d)/2} / (2^{(d+2j-2)/2} pi^{d/2} Gamma(j)).
/// Requires r > 0, j >= 1, d in {1,2,3}.
double bessel_kernel_g(const BesselKernelParams& params, double r);

/// Generates G_2(r), G_4(r), G_6(r), ... at a fixed radius using the
/// three-term recurrence
///   G_{2(j+1)} = ((j - d/2) / j) G_{2j} + r^2 / (4 j (j - 1)) G_{2(j-1)},
/// which only adds positive terms and therefore stays stable for any j.
/// Values are stored relative to exp(log_scale) and rescaled as they grow, so
/// large radii, where G_2 underflows but G_{2j} with j ~ r/2 does not, stay exact.
class BesselKernelLadder {
 public:
  BesselKernelLadder(int d, double r);

  /// Index of the value returned by current().
  std::int64_t j() const noexcept { return j_; }
  double current() const noexcept;
  void advance() noexcept;

 private:
  void rescale() noexcept;

  int d_;
  double r2_;
  std::int64_t j_ = 1;
  double prev_ = 0.0;
  double cur_ = 0.0;
  double next_ = 0.0;
  double log_scale_ = 0.0;
  double scale_ = 1.0;  ///< exp(log_scale_), 0 or inf when out of range
};

/// G_{2j}(0) for 2j > d, i.e. Gamma(j - d/2) / ((4 pi)^{d/2} Gamma(j)).
/// Upper bound for G_{2j}(r) at any r since the kernels are radially decreasing.
double bessel_kernel_at_origin(std::int64_t j, int d);

/// Closed form of the radial moment of G_{2j}:
///   2^s Gamma((d+s)/2) / Gamma(d/2) * Gamma(j + s/2) / Gamma(j).
/// Requires s >= 0, j >= 1.
double g_moment(std::int64_t j, double s, int d);

/// Surface area of the unit sphere in R^d.
double sphere_area(int d);

}  // namespace brq::special
