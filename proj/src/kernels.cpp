#include "brq/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unordered_map>

#include "brq/error.hpp"
#include "brq/fit.hpp"
#include "brq/special.hpp"

namespace brq {

double SeriesKernelSpec::exact_tail() const { return special::binom_tail(alpha, truncation); }

SeriesKernelSpec series_truncation(double alpha, double tail_tol) {
  if (!(tail_tol > 0.0 && tail_tol < 1.0))
    throw Error(ErrorCode::OutOfRange, "tail tolerance must lie in (0, 1)");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw Error(ErrorCode::OutOfRange, "alpha must lie in (0, 1]");
  // Relative slack over the closed-form tail covers its rounding error.
  constexpr double kSlack = 1e-10;
  auto certified = [&](std::int64_t J) { return special::binom_tail(alpha, J) * (1.0 + kSlack); };

  std::int64_t hi = 1;
  while (certified(hi) > tail_tol) {
    if (hi > (std::int64_t{1} << 61))
      throw Error(ErrorCode::OutOfRange, "tail tolerance not reachable");
    hi *= 2;
  }
  std::int64_t lo = hi / 2;  // certified(lo) > tol unless hi == 1
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (certified(mid) <= tail_tol)
      hi = mid;
    else
      lo = mid;
  }
  SeriesKernelSpec spec;
  spec.alpha = alpha;
  spec.truncation = hi;
  spec.tail_mass = certified(hi);
  spec.coefficients =
      special::binom_coeffs(alpha, std::min(hi, SeriesKernelSpec::kCoefficientCache));
  return spec;
}

CoefficientStream::CoefficientStream(const SeriesKernelSpec& spec)
    : spec_(&spec),
      value_(spec.coefficients.empty() ? 0.5 * spec.alpha : spec.coefficients.front()) {}

void CoefficientStream::advance() noexcept {
  const auto cached = static_cast<std::int64_t>(spec_->coefficients.size());
  if (j_ < cached) {
    value_ = spec_->coefficients[static_cast<std::size_t>(j_)];
  } else {
    value_ *= (static_cast<double>(j_) - 0.5 * spec_->alpha) / static_cast<double>(j_ + 1);
  }
  ++j_;
}

double series_symbol(const SeriesKernelSpec& spec, double mu, double r) {
  if (r == 0.0) return 1.0 - spec.exact_tail();
  const double x = (r / mu) * (r / mu);
  const double q = 1.0 / (1.0 + x);
  const double one_minus_q = x / (1.0 + x);
  CoefficientStream a(spec);
  double qj = q;
  double sum = 0.0;
  while (true) {
    const double term = a.value() * qj;
    sum += term;
    if (a.j() >= spec.truncation) break;
    // a_j is decreasing, so the remainder is below a_j q^{j+1} / (1 - q).
    if (term * q / one_minus_q < 1e-17 * sum) break;
    a.advance();
    qj *= q;
  }
  return sum;
}

SeriesKernelValue series_kernel_value(const SeriesKernelSpec& spec, double mu, double r, int d) {
  if (!(r > 0.0)) throw Error(ErrorCode::OutOfRange, "kernel radius must be > 0");
  if (d < 1 || d > 3) throw Error(ErrorCode::InvalidDimension, "dimension must be 1, 2 or 3");
  if (spec.truncation > kMaxRealSpaceTerms)
    throw Error(ErrorCode::OutOfRange, "truncation too large for real-space evaluation");
  special::BesselKernelLadder g(d, mu * r);
  CoefficientStream a(spec);
  double sum = 0.0;
  while (true) {
    sum += a.value() * g.current();
    if (a.j() >= spec.truncation) break;
    a.advance();
    g.advance();
  }
  const double scale = std::pow(mu, d);
  SeriesKernelValue out;
  out.value = scale * sum;
  out.tail_bound = spec.tail_mass * scale * special::bessel_kernel_at_origin(spec.truncation + 1, d);
  return out;
}

double series_moment(const SeriesKernelSpec& spec, double s, int d) {
  // g_moment(j) = g_moment(1) * Gamma(j + s/2) / Gamma(1 + s/2) / Gamma(j),
  // advanced by the factor (j + s/2) / j.
  double g = special::g_moment(1, s, d);
  CoefficientStream a(spec);
  double sum = 0.0;
  while (true) {
    sum += a.value() * g;
    if (a.j() >= spec.truncation) break;
    const double j = static_cast<double>(a.j());
    g *= (j + 0.5 * s) / j;
    a.advance();
  }
  return sum;
}

double series_moment_limit(double alpha, double s, int d) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorCode::OutOfRange, "alpha must lie in (0, 1]");
  if (!(s >= 0.0)) throw Error(ErrorCode::OutOfRange, "moment exponent s must be >= 0");
  if (!(s < alpha)) throw Error(ErrorCode::Divergent, "kernel moment diverges for s >= alpha");
  using special::log_gamma;
  const double hd = 0.5 * d;
  return std::exp(s * std::log(2.0) + log_gamma(hd + 0.5 * s) + log_gamma(1.0 + 0.5 * s) +
                  log_gamma(0.5 * (alpha - s)) - log_gamma(hd) - log_gamma(0.5 * alpha) -
                  log_gamma(1.0 - 0.5 * s));
}

SampledField convolve_series(const SampledField& field, const SeriesKernelSpec& spec, double mu) {
  if (!(mu > 0.0)) throw Error(ErrorCode::OutOfRange, "mu must be > 0");
  return apply_radial(field, [&](double r) { return series_symbol(spec, mu, r); });
}

namespace {

// Smooth step: 0 for u <= 0, 1 for u >= 1, C-infinity in between.
double smooth_step(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / u);
  const double b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

// 1 on [0, 1], 0 on [2, inf).
double plateau(double r) { return 1.0 - smooth_step(r - 1.0); }

}  // namespace

double littlewood_paley_bump(double r) { return plateau(r) - plateau(2.0 * r); }

KernelProfile extract_kernel(const SymbolSpec& symbol, const GridSpec& grid, bool dyadic) {
  symbol.validate();
  if (!symbol.bounded())
    throw Error(ErrorCode::Singular, "kernel extraction needs a bounded symbol");
  KernelProfile profile;
  profile.symbol = symbol;
  profile.grid = grid;

  SpectralField spectrum{grid, std::vector<Complex>(grid.size(), Complex(1.0, 0.0))};
  spectrum = apply_symbol(spectrum, symbol);
  profile.samples = inverse(spectrum).real_part();
  profile.dc_part = symbol_value(symbol, 0.0) / std::pow(grid.length(), grid.dim());

  // Bin by exact squared lattice radius about the center index n/2.
  struct Bin {
    double lo = INFINITY, hi = -INFINITY, sum = 0.0;
    int count = 0;
  };
  std::unordered_map<std::int64_t, Bin> bins;
  const auto half = static_cast<std::int64_t>(grid.n() / 2);
  const std::int64_t max_key = half * half;
  for (std::size_t flat = 0; flat < grid.size(); ++flat) {
    auto idx = grid.unflatten(flat);
    std::int64_t key = 0;
    for (int a = 0; a < grid.dim(); ++a) {
      const auto off = static_cast<std::int64_t>(idx[a]) - half;
      key += off * off;
    }
    if (key == 0 || key > max_key) continue;
    auto& b = bins[key];
    const double v = profile.samples[flat];
    b.lo = std::min(b.lo, v);
    b.hi = std::max(b.hi, v);
    b.sum += v;
    ++b.count;
  }
  std::vector<std::int64_t> keys;
  keys.reserve(bins.size());
  for (const auto& [k, b] : bins) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  profile.radial.reserve(keys.size());
  for (auto k : keys) {
    const auto& b = bins[k];
    profile.radial.push_back({grid.spacing() * std::sqrt(static_cast<double>(k)),
                              b.sum / b.count, b.hi - b.lo});
  }

  if (dyadic) {
    const double xi_min = grid.frequency_step();
    const double xi_max = grid.frequency_step() * half * std::sqrt(static_cast<double>(grid.dim()));
    const int jlo = static_cast<int>(std::floor(std::log2(xi_min))) - 1;
    const int jhi = static_cast<int>(std::ceil(std::log2(xi_max))) + 1;
    for (int j = jlo; j <= jhi; ++j) {
      const double scale = std::exp2(-j);
      auto piece = apply_radial(spectrum, [&](double r) { return littlewood_paley_bump(scale * r); });
      DyadicPiece dp;
      dp.j = j;
      dp.values = inverse(piece).real_part();
      for (double v : dp.values) dp.sup_norm = std::max(dp.sup_norm, std::abs(v));
      profile.dyadic.push_back(std::move(dp));
    }
  }
  return profile;
}

void write_profile_csv(const KernelProfile& profile, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::FILE* f = std::fopen(tmp.c_str(), "wb");
    if (!f) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
    bool ok = std::fputs("r,value,bin_spread\n", f) >= 0;
    for (const auto& s : profile.radial)
      ok = ok && std::fprintf(f, "%.15e,%.15e,%.15e\n", s.r, s.value, s.bin_spread) > 0;
    ok = (std::fclose(f) == 0) && ok;
    if (!ok) {
      std::remove(tmp.c_str());
      throw Error(ErrorCode::Io, "write failed for " + path);
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::remove(tmp.c_str());
    throw Error(ErrorCode::Io, "cannot move output into " + path);
  }
}

DecayReport decay_check(const KernelProfile& profile, double alpha, double mu,
                        const DecayOptions& options) {
  const int d = profile.grid.dim();
  const double zlo = std::max(options.zmin, mu * profile.resolved_min());
  const double zhi = std::min(options.zmax, mu * profile.resolved_max());
  if (!(zlo < 1.0 && zhi > 1.0 && zhi / zlo >= 1000.0 * (1.0 - 1e-12)))
    throw Error(ErrorCode::Unresolvable,
                "kernel profile does not resolve three decades of |mu x| across |mu x| = 1");
  DecayReport report;
  std::vector<double> far_r, far_v;
  const int first_decade = static_cast<int>(std::floor(std::log10(zlo)));
  for (const auto& s : profile.radial) {
    const double z = mu * s.r;
    if (z < zlo || z > zhi) continue;
    const double w = z > 1.0 ? std::pow(2.0 * z, 0.5 * alpha) : std::pow(1.0 + z * z, 0.5 * alpha);
    const double q = std::abs(s.value) * std::pow(s.r, d) * w;
    report.sup_q = std::max(report.sup_q, q);
    if (z <= 1.0)
      report.near_sup = std::max(report.near_sup, q);
    else
      report.far_sup = std::max(report.far_sup, q);
    const int decade = static_cast<int>(std::floor(std::log10(z))) - first_decade;
    if (static_cast<int>(report.per_decade.size()) <= decade)
      report.per_decade.resize(decade + 1, {0.0, 0.0});
    report.per_decade[decade].first = std::pow(10.0, decade + first_decade);
    report.per_decade[decade].second = std::max(report.per_decade[decade].second, q);
    if (z >= 2.0 && s.value != 0.0) {
      far_r.push_back(s.r);
      far_v.push_back(std::abs(s.value));
    }
  }
  if (far_r.size() < 4)
    throw Error(ErrorCode::Unresolvable, "too few far-field samples for a slope fit");
  report.far_slope = loglog_fit(far_r, far_v).slope;
  return report;
}

HormanderReport hormander_check(const KernelProfile& profile, const std::vector<double>& ys) {
  const auto& g = profile.grid;
  if (g.dim() != 1)
    throw Error(ErrorCode::InvalidDimension, "Hormander check is implemented for d = 1");
  const double h = g.spacing();
  const double mu = profile.symbol.mu;
  const auto n = static_cast<std::int64_t>(g.n());
  const auto center = n / 2;
  const auto& B = profile.samples;
  const auto limit = static_cast<std::int64_t>(std::floor(0.25 * g.length() / h));

  // Local power law of |B| near L/4 for the truncated-tail estimate.
  const double b_quarter = std::abs(B[static_cast<std::size_t>(center + limit)]);
  const double b_eighth = std::abs(B[static_cast<std::size_t>(center + limit / 2)]);
  const double tail_slope =
      (b_quarter > 0.0 && b_eighth > 0.0) ? std::log(b_quarter / b_eighth) / std::log(2.0) : -INFINITY;

  HormanderReport report;
  report.min_ratio = INFINITY;
  for (double y : ys) {
    HormanderSample s;
    const auto k = static_cast<std::int64_t>(std::llround(std::abs(y) / h));
    s.y = static_cast<double>(k) * h;
    if (k != 0 && k < 2)
      throw Error(ErrorCode::Unresolvable, "translation shorter than two grid steps");
    if (k >= limit / 2) throw Error(ErrorCode::Unresolvable, "translation too long for the grid");
    const double my = mu * s.y;
    s.bound = my > 1.0 ? 1.0 / std::sqrt(2.0 * my) : 1.0 / std::sqrt(1.0 + my * my);
    if (k != 0) {
      double acc = 0.0;
      for (std::int64_t off = -limit; off <= limit; ++off) {
        if (std::abs(off) < 2 * k) continue;
        const auto i = center + off;
        acc += std::abs(B[static_cast<std::size_t>(i + k)] - B[static_cast<std::size_t>(i)]);
      }
      s.integral = h * acc;
      // Both sides beyond L/4: at most 2 * int_{L/4-y}^inf |B| on each side.
      if (tail_slope < -1.0) {
        const double x0 = 0.25 * g.length() - s.y;
        s.tail_estimate = 4.0 * b_quarter * x0 / (-tail_slope - 1.0);
      } else {
        s.tail_estimate = INFINITY;
      }
    }
    s.ratio = s.integral / s.bound;
    report.max_ratio = std::max(report.max_ratio, s.ratio);
    if (k != 0) report.min_ratio = std::min(report.min_ratio, s.ratio);
    report.samples.push_back(s);
  }
  if (!std::isfinite(report.min_ratio)) report.min_ratio = 0.0;
  return report;
}

HormanderReport hormander_check(const SymbolSpec& symbol, const std::vector<double>& ys,
                                const GridSpec& grid) {
  return hormander_check(extract_kernel(symbol, grid), ys);
}

}  // namespace brq
