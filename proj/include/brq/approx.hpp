#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "brq/fit.hpp"
#include "brq/grid.hpp"
#include "brq/symbols.hpp"

namespace brq {

/// Experiment output: named series over a strictly increasing mu grid, plus
/// log-log fits and free-form provenance notes (both go to the CSV footer).
struct CurveResult {
  struct Fit {
    std::string series;
    double lo = 0.0, hi = 0.0;
    LogLogFit fit;
  };

  std::vector<double> mu;
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
  std::vector<Fit> fits;
  std::vector<std::pair<std::string, std::string>> notes;

  void add_series(std::string name, std::vector<double> values);
  bool has_series(const std::string& name) const;
  const std::vector<double>& series(const std::string& name) const;
  /// Throws unless mu is strictly increasing and every value is finite and >= 0.
  void validate() const;
};

/// Geometric grid lo * 2^{k/per_octave} up to hi (inclusive within rounding).
std::vector<double> geometric_grid(double lo, double hi, int per_octave = 2);

struct TestFunctionSpec {
  enum class Kind {
    Gaussian,           ///< exp(-|x-c|^2 / (2 w^2))
    Bump,               ///< exp(-1/(1-rho^2)) with rho = |x-c|/w, compact support
    Indicator,          ///< 1 on the box [c, c+w]^d
    Tent,               ///< max(0, 1 - |x-c|/w), product over axes
    RandomBandLimited,  ///< seeded Hermitian spectrum with |xi| <= cutoff
    Annular,            ///< supported in inner <= |x-c| <= outer; smooth or indicator
    SpectralCustom,     ///< inverse transform of a user radial spectrum
  };
  Kind kind = Kind::Gaussian;
  std::array<double, 3> center{0.0, 0.0, 0.0};
  double width = 1.0;
  std::uint64_t seed = 1;
  double cutoff = 4.0;
  bool mean_zero = false;  ///< random band-limited: drop the xi = 0 mode
  double inner = 1.0;      ///< annular vanishing radius delta
  double outer = 2.0;
  bool smooth = true;      ///< annular profile: C-infinity bump or indicator
  std::function<Complex(const std::array<double, 3>&)> spectrum;

  static TestFunctionSpec gaussian() { return {}; }
  static TestFunctionSpec indicator() {
    TestFunctionSpec s;
    s.kind = Kind::Indicator;
    return s;
  }
  static TestFunctionSpec tent() {
    TestFunctionSpec s;
    s.kind = Kind::Tent;
    return s;
  }
  static TestFunctionSpec band_limited(std::uint64_t seed, double cutoff, bool mean_zero = false) {
    TestFunctionSpec s;
    s.kind = Kind::RandomBandLimited;
    s.seed = seed;
    s.cutoff = cutoff;
    s.mean_zero = mean_zero;
    return s;
  }
  static TestFunctionSpec annular(double inner, double outer, bool smooth) {
    TestFunctionSpec s;
    s.kind = Kind::Annular;
    s.inner = inner;
    s.outer = outer;
    s.smooth = smooth;
    return s;
  }
};

std::string to_string(TestFunctionSpec::Kind kind);
SampledField make_test_function(const GridSpec& grid, const TestFunctionSpec& spec);
/// Lattice offsets for discontinuous profiles (no Gibbs ringing), spectral otherwise.
OmegaSampling recommended_sampling(const TestFunctionSpec& spec);

/// ||E_{alpha,mu} f||_p with E the quotient multiplier.
double approx_error(const SampledField& field, double alpha, double mu, double p);
double approx_error(const SpectralField& spectrum, double alpha, double mu, double p);

/// Series err, omega = omega(f, 1/mu)_p, ratio = err/omega. For alpha < 1
/// also "interp" = omega^a ||f||^{1-a} and "two_term" = omega + interp; for
/// alpha = 1, p = 1 also "log_envelope" = omega (3 + 2 ln(||f|| / (2 omega))).
/// Requires mu in [2, n pi / (4L)] and 1/mu >= 2h.
CurveResult equivalence_curve(const SampledField& field, double alpha, double p,
                              const std::vector<double>& mu_grid,
                              const OmegaSampling& sampling = {});

/// Candidate g = T_mu f of the K-functional: ||f - T f||_p + ||D| T f||_p / mu.
double k_functional_upper(const SampledField& field, double mu, double p);

/// Log-log least squares of a series over mu in [lo, hi]; needs >= 4 points.
LogLogFit rate_fit(const CurveResult& curve, const std::string& series, double lo, double hi);
/// Same, recording the fit in curve.fits.
LogLogFit rate_fit(CurveResult& curve, const std::string& series, double lo, double hi);

/// Smoothness class of a profile in L^p: omega(f, t)_p = O(t^s).
double lipschitz_exponent(TestFunctionSpec::Kind kind, double p);

/// err(mu) with a fitted slope over [fit_lo, max mu]. When the class is
/// Lip(1, 1) (boundary case) the series err_over_log = err / ln(mu) is fitted
/// instead, matching the mu^{-1} ln(mu) rate.
CurveResult lipschitz_rate(const GridSpec& grid, const TestFunctionSpec& kind, double alpha,
                           double p, const std::vector<double>& mu_grid, double fit_lo = 8.0);

/// Series mu_err = mu * err and mu12_err = mu^{1.2} * err (alpha = 1). For
/// p = 2 also the constant "reference" = || |D| f ||_2 from the spectrum.
CurveResult saturation_curve(const SampledField& field, double p,
                             const std::vector<double>& mu_grid);

struct BesovReport {
  double lhs = 0.0;  ///< (int_{1/mu_max}^1 (t^{-s} omega(f,t)_p)^q dt/t)^{1/q}
  double rhs = 0.0;  ///< (int_1^{mu_max} (mu^s ||E_mu f||_p)^q dmu/mu)^{1/q}
  double ratio = 1.0;  ///< rhs / lhs
  /// Relative drop of each side when the top decade is removed.
  double lhs_defect = 0.0;
  double rhs_defect = 0.0;
  bool truncated = false;  ///< a defect exceeds 5%
};

/// Geometric-grid quadrature (per_octave nodes per octave, trapezoid in ln mu).
/// Requires 0 < s < 1, 1 < p < inf, 1 <= q < inf. Throws Error{Divergent} when
/// the per-decade contributions of the lhs stop decaying.
BesovReport besov_ratio(const SampledField& field, double s, double p, double q, double mu_max,
                        const OmegaSampling& sampling = {}, int per_octave = 4);

/// Discrete sup over r in {h, 2h, ..., delta} of r^{alpha-d} sum_{|y-x|<=r} |f(y)| h^d.
/// In d = 1 the two boundary points get weight 1/2. Requires delta >= h.
SampledField truncated_maximal(const SampledField& field, double alpha, double delta);

struct DominationResult {
  double constant = 0.0;    ///< fitted C (anchor ratio times safety)
  double worst = 0.0;       ///< max over the grid of lhs / rhs
  bool holds = true;        ///< lhs <= C rhs everywhere
};

/// Fits C = safety * lhs/rhs at the anchor index and checks lhs <= C rhs over
/// the whole curve. Points where both sides vanish are skipped.
DominationResult fitted_domination(const CurveResult& curve, const std::string& lhs,
                                   const std::string& rhs, std::size_t anchor, double safety);

/// lhs = omega(I_1 f, 1/mu)_p, rhs = ||M_{1,1/mu} f||_p, ratio = lhs/rhs.
/// Requires p > 1 and a mean-zero field unless dc == DcPolicy::Zero is
/// passed explicitly as an override.
CurveResult muckenhoupt_wheeden_check(const SampledField& field, double p,
                                      const std::vector<double>& mu_grid,
                                      DcPolicy dc = DcPolicy::Error,
                                      const OmegaSampling& sampling = {});

/// |E_{alpha,mu} f(x0)| read at the grid point nearest x0, with a fitted slope
/// ("slope" note is "undefined" when every value vanishes). Requires f = 0 on
/// |x - x0| < delta and mu * delta > 1 for every grid mu.
CurveResult localization_slope(const SampledField& field, double alpha,
                               const std::array<double, 3>& x0, double delta,
                               const std::vector<double>& mu_grid);

/// Hoelder constants max_mu |E f(x0)| mu^{alpha/2} for a family of annular
/// fields of growing vanishing radius; returned in the order of deltas.
std::vector<double> localization_constants(const GridSpec& grid, double alpha,
                                           const std::vector<double>& deltas, double width,
                                           const std::vector<double>& mu_grid);

/// sup over |x| <= sigma and mu in the grid of |E_{alpha,mu} f(x)| / ||f||_inf.
/// Requires f = 0 on |x| < delta and sigma < delta.
double uniform_maximal_check(const SampledField& field, double alpha, double sigma, double delta,
                             const std::vector<double>& mu_grid);

/// Radial spectrum in d = 1 for the log-rate experiment.
using SpectralProfile = std::function<double(double)>;

/// Test profile |xi|^{-1/2} (1 + ln(1 + xi^2))^{-log_power} on |xi| >= 1.
SpectralProfile log_weighted_profile(double log_power);

/// ||sqrt(ln(1+xi^2)) fhat||_2^2 / (2 pi) by quadrature; Error{Divergent} if the
/// last doubling of the log-frequency range still adds more than 2%.
double log_weighted_norm_squared(const SpectralProfile& profile);

/// err(mu) = ||E_{1,mu} f||_2 by frequency-space quadrature, and
/// scaled = err * sqrt(ln mu).
CurveResult ksp_log_rate(const SpectralProfile& profile, const std::vector<double>& mu_grid);

/// Runs fn(i) for i in [0, count) on worker threads; fn writes only slot i.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace brq
