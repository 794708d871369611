#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "brq/grid.hpp"
#include "brq/symbols.hpp"

namespace brq {

/// Truncation A_{alpha,mu} ~ mu^{-d} sum_{j<=J} a_{alpha,j} G_{2j}(mu z).
/// Coefficients are cached up to kCoefficientCache terms; later ones are
/// regenerated on demand by the same recurrence.
struct SeriesKernelSpec {
  static constexpr std::int64_t kCoefficientCache = std::int64_t{1} << 21;

  double alpha = 1.0;
  std::int64_t truncation = 1;
  std::vector<double> coefficients;
  /// Certified upper bound on sum_{j>J} a_{alpha,j}.
  double tail_mass = 0.5;

  /// Unit-mass deficit of the truncated kernel, 1 - sum_{j<=J} a_j, without slack.
  double exact_tail() const;
};

/// Smallest J (doubling scan, then bisection) whose certified tail is at most
/// tail_tol. Requires 0 < tail_tol < 1.
SeriesKernelSpec series_truncation(double alpha, double tail_tol);

/// Walks a_{alpha,1}, a_{alpha,2}, ... from the cache, then by recurrence.
class CoefficientStream {
 public:
  explicit CoefficientStream(const SeriesKernelSpec& spec);
  std::int64_t j() const noexcept { return j_; }
  double value() const noexcept { return value_; }
  void advance() noexcept;

 private:
  const SeriesKernelSpec* spec_;
  std::int64_t j_ = 1;
  double value_;
};

/// Fourier transform of the truncated kernel at frequency |xi|:
/// sum_{j<=J} a_j (1 + |xi/mu|^2)^{-j}. Terms are summed until the remainder
/// is provably below 1e-17 of the partial sum.
double series_symbol(const SeriesKernelSpec& spec, double mu, double xi_norm);

struct SeriesKernelValue {
  double value = 0.0;
  /// Bound on the omitted tail: tail_mass * mu^d * sup_{j>J} G_{2j}(mu r).
  double tail_bound = 0.0;
};

/// Largest truncation accepted by series_kernel_value (one pass per radius).
inline constexpr std::int64_t kMaxRealSpaceTerms = std::int64_t{1} << 26;

/// Real-space truncated kernel mu^d sum_{j<=J} a_j G_{2j}(mu r). r > 0, d in {1,2,3}.
SeriesKernelValue series_kernel_value(const SeriesKernelSpec& spec, double mu, double r, int d);

/// Truncated moment sum_{j<=J} a_j g_moment(j, s, d) = int A^{(J)}_alpha(y) |y|^s dy.
double series_moment(const SeriesKernelSpec& spec, double s, int d);
/// Untruncated moment int A_alpha(y) |y|^s dy for 0 <= s < alpha:
/// 2^s Gamma((d+s)/2) Gamma(1+s/2) Gamma((alpha-s)/2) / (Gamma(d/2) Gamma(alpha/2) Gamma(1-s/2)).
/// Throws Error{Divergent} for s >= alpha.
double series_moment_limit(double alpha, double s, int d);

/// T f via the truncated series, applied in frequency space.
SampledField convolve_series(const SampledField& field, const SeriesKernelSpec& spec, double mu);

/// Smooth Littlewood-Paley bump: supported in [1/2, 2], built from the
/// exp(-1/t) smooth step so that sum_j phi(2^{-j} xi) = 1 for xi != 0.
double littlewood_paley_bump(double r);

struct RadialSample {
  double r = 0.0;
  double value = 0.0;
  /// max - min of the kernel over grid points sharing this radius.
  double bin_spread = 0.0;
};

struct DyadicPiece {
  int j = 0;
  std::vector<double> values;  ///< real kernel on the full grid
  double sup_norm = 0.0;
};

struct KernelProfile {
  SymbolSpec symbol;
  GridSpec grid;
  /// Real kernel samples over the whole grid (row-major, FFT-centered layout).
  std::vector<double> samples;
  /// One entry per distinct lattice radius 0 < r <= L/2.
  std::vector<RadialSample> radial;
  std::vector<DyadicPiece> dyadic;
  /// Contribution of the xi = 0 mode, b(0) / L^d, not carried by any dyadic piece.
  double dc_part = 0.0;

  /// Radii trusted for analysis: [2h, L/4].
  double resolved_min() const { return 2.0 * grid.spacing(); }
  double resolved_max() const { return 0.25 * grid.length(); }
};

/// Inverse transform of the symbol on the grid, radial binning by exact
/// lattice radius, and optional dyadic Littlewood-Paley pieces.
KernelProfile extract_kernel(const SymbolSpec& symbol, const GridSpec& grid, bool dyadic = false);

/// Writes r,value,bin_spread. Throws Error{Io}; leaves no partial file.
void write_profile_csv(const KernelProfile& profile, const std::string& path);

struct DecayReport {
  double sup_q = 0.0;
  /// Max of Q over |mu x| in [10^k, 10^{k+1}), from the lowest resolved decade.
  std::vector<std::pair<double, double>> per_decade;
  double near_sup = 0.0;  ///< sup Q over zmin <= |mu x| <= 1
  double far_sup = 0.0;   ///< sup Q over 1 < |mu x| <= zmax
  double far_slope = 0.0; ///< log-log slope of |B| over 2 <= |mu x| <= zmax
};

struct DecayOptions {
  double zmin = 0.05;
  double zmax = 100.0;
};

/// Compensated decay Q(x) = |B(x)| |x|^d w(x), w = (2 mu|x|)^{a/2} for |mu x| > 1
/// and (1 + |mu x|^2)^{a/2} otherwise. Throws Error{Unresolvable} unless the
/// resolved radii cover [zmin, zmax] in |mu x|.
DecayReport decay_check(const KernelProfile& profile, double alpha, double mu,
                        const DecayOptions& options = {});

struct HormanderSample {
  double y = 0.0;          ///< translation actually used (a lattice multiple)
  double integral = 0.0;   ///< h sum over 2|y| <= |x| <= L/4 of |B(x+y) - B(x)|
  double tail_estimate = 0.0;  ///< estimated contribution from |x| > L/4
  double bound = 0.0;      ///< (2 mu y)^{-1/2} or (1 + (mu y)^2)^{-1/2}
  double ratio = 0.0;      ///< integral / bound
};

struct HormanderReport {
  std::vector<HormanderSample> samples;
  double max_ratio = 0.0;
  double min_ratio = 0.0;
};

/// Translation-difference integrals of a d = 1 kernel. Each y is rounded to
/// the nearest lattice multiple; nonzero |y| below 2h is an Error{Unresolvable}.
HormanderReport hormander_check(const KernelProfile& profile, const std::vector<double>& ys);
HormanderReport hormander_check(const SymbolSpec& symbol, const std::vector<double>& ys,
                                const GridSpec& grid);

}  // namespace brq
