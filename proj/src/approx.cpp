#include "brq/approx.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

#include "brq/error.hpp"

namespace brq {

using std::numbers::pi;

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------------------
// CurveResult

void CurveResult::add_series(std::string name, std::vector<double> values) {
  if (values.size() != mu.size())
    throw Error(ErrorCode::InvalidArgument, "series length differs from the mu grid");
  names.push_back(std::move(name));
  columns.push_back(std::move(values));
}

bool CurveResult::has_series(const std::string& name) const {
  return std::find(names.begin(), names.end(), name) != names.end();
}

const std::vector<double>& CurveResult::series(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw Error(ErrorCode::InvalidArgument, "no series named " + name);
  return columns[static_cast<std::size_t>(it - names.begin())];
}

void CurveResult::validate() const {
  for (std::size_t i = 1; i < mu.size(); ++i)
    if (!(mu[i] > mu[i - 1])) throw Error(ErrorCode::InvalidArgument, "mu grid not increasing");
  for (const auto& col : columns)
    for (double v : col)
      if (!std::isfinite(v) || v < 0.0)
        throw Error(ErrorCode::InvalidArgument, "curve value not finite and nonnegative");
}

std::vector<double> geometric_grid(double lo, double hi, int per_octave) {
  if (!(lo > 0.0) || !(hi >= lo) || per_octave < 1)
    throw Error(ErrorCode::OutOfRange, "invalid geometric grid");
  std::vector<double> out;
  for (int k = 0;; ++k) {
    const double v = lo * std::exp2(static_cast<double>(k) / per_octave);
    if (v > hi * (1.0 + 1e-12)) break;
    out.push_back(v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Test functions

std::string to_string(TestFunctionSpec::Kind kind) {
  using K = TestFunctionSpec::Kind;
  switch (kind) {
    case K::Gaussian: return "gaussian";
    case K::Bump: return "bump";
    case K::Indicator: return "indicator";
    case K::Tent: return "tent";
    case K::RandomBandLimited: return "random_band_limited";
    case K::Annular: return "annular";
    case K::SpectralCustom: return "spectral_custom";
  }
  return "unknown";
}

namespace {

double distance(const std::array<double, 3>& x, const std::array<double, 3>& c, int d) {
  double s = 0.0;
  for (int a = 0; a < d; ++a) s += (x[a] - c[a]) * (x[a] - c[a]);
  return std::sqrt(s);
}

double bump(double rho) { return rho < 1.0 ? std::exp(-1.0 / (1.0 - rho * rho)) : 0.0; }

}  // namespace

SampledField make_test_function(const GridSpec& grid, const TestFunctionSpec& spec) {
  using K = TestFunctionSpec::Kind;
  const int d = grid.dim();
  switch (spec.kind) {
    case K::Gaussian:
      return SampledField::from_function(grid, [&](const auto& x) {
        const double r = distance(x, spec.center, d) / spec.width;
        return Complex(std::exp(-0.5 * r * r), 0.0);
      });
    case K::Bump:
      return SampledField::from_function(grid, [&](const auto& x) {
        return Complex(bump(distance(x, spec.center, d) / spec.width), 0.0);
      });
    case K::Indicator:
      return SampledField::from_function(grid, [&](const auto& x) {
        for (int a = 0; a < d; ++a)
          if (x[a] < spec.center[a] || x[a] >= spec.center[a] + spec.width) return Complex(0.0);
        return Complex(1.0);
      });
    case K::Tent:
      return SampledField::from_function(grid, [&](const auto& x) {
        double v = 1.0;
        for (int a = 0; a < d; ++a)
          v *= std::max(0.0, 1.0 - std::abs(x[a] - spec.center[a]) / spec.width);
        return Complex(v, 0.0);
      });
    case K::RandomBandLimited: {
      auto f = random_band_limited(grid, spec.seed, spec.cutoff);
      if (spec.mean_zero) {
        auto s = forward(f);
        s.coefficients[0] = 0.0;
        f = inverse(s);
        for (auto& v : f.values) v = Complex(v.real(), 0.0);
      }
      return f;
    }
    case K::Annular: {
      if (!(spec.inner >= 0.0 && spec.outer > spec.inner))
        throw Error(ErrorCode::OutOfRange, "annulus needs 0 <= inner < outer");
      return SampledField::from_function(grid, [&](const auto& x) {
        const double r = distance(x, spec.center, d);
        if (r < spec.inner || r > spec.outer) return Complex(0.0);
        if (!spec.smooth) return Complex(1.0);
        const double rho = (2.0 * r - spec.inner - spec.outer) / (spec.outer - spec.inner);
        return Complex(bump(std::abs(rho)), 0.0);
      });
    }
    case K::SpectralCustom: {
      if (!spec.spectrum) throw Error(ErrorCode::InvalidArgument, "spectral_custom needs a spectrum");
      SpectralField s{grid, std::vector<Complex>(grid.size())};
      for (std::size_t i = 0; i < grid.size(); ++i) s.coefficients[i] = spec.spectrum(grid.wavevector(i));
      return inverse(s);
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown test function kind");
}

OmegaSampling recommended_sampling(const TestFunctionSpec& spec) {
  OmegaSampling s;
  const bool discontinuous = spec.kind == TestFunctionSpec::Kind::Indicator ||
                             (spec.kind == TestFunctionSpec::Kind::Annular && !spec.smooth);
  if (discontinuous) s.mode = OmegaSampling::Mode::Lattice;
  return s;
}

// ---------------------------------------------------------------------------
// Approximation error and equivalence curves

double approx_error(const SpectralField& spectrum, double alpha, double mu, double p) {
  return lp_norm(inverse(apply_symbol(spectrum, SymbolSpec::quotient(alpha, mu))), p);
}

double approx_error(const SampledField& field, double alpha, double mu, double p) {
  return approx_error(forward(field), alpha, mu, p);
}

namespace {

void check_mu_grid(const GridSpec& g, const std::vector<double>& mu_grid, double lo) {
  if (mu_grid.empty()) throw Error(ErrorCode::OutOfRange, "empty mu grid");
  const double hi = std::min(static_cast<double>(g.n()) * pi / (4.0 * g.length()),
                             1.0 / (2.0 * g.spacing()));
  for (double mu : mu_grid)
    if (!(mu >= lo * (1.0 - 1e-12) && mu <= hi * (1.0 + 1e-12)))
      throw Error(ErrorCode::OutOfRange,
                  "mu outside the resolvable range [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
}

}  // namespace

CurveResult equivalence_curve(const SampledField& field, double alpha, double p,
                              const std::vector<double>& mu_grid, const OmegaSampling& sampling) {
  check_mu_grid(field.grid, mu_grid, 2.0);
  const auto spectrum = forward(field);
  const double fnorm = lp_norm(field, p);
  const std::size_t m = mu_grid.size();
  std::vector<double> err(m), omega(m), ratio(m);
  parallel_for(m, [&](std::size_t i) {
    err[i] = approx_error(spectrum, alpha, mu_grid[i], p);
    omega[i] = modulus_of_continuity(field, 1.0 / mu_grid[i], p, sampling);
    ratio[i] = omega[i] > 0.0 ? err[i] / omega[i] : 0.0;
  });
  CurveResult curve;
  curve.mu = mu_grid;
  curve.add_series("err", err);
  curve.add_series("omega", omega);
  curve.add_series("ratio", ratio);
  if (alpha < 1.0) {
    std::vector<double> interp(m), two(m);
    for (std::size_t i = 0; i < m; ++i) {
      interp[i] = std::pow(omega[i], alpha) * std::pow(fnorm, 1.0 - alpha);
      two[i] = omega[i] + interp[i];
    }
    curve.add_series("interp", interp);
    curve.add_series("two_term", two);
  } else if (p == 1.0) {
    std::vector<double> env(m);
    for (std::size_t i = 0; i < m; ++i)
      env[i] = omega[i] > 0.0 ? omega[i] * (3.0 + 2.0 * std::log(fnorm / (2.0 * omega[i]))) : 0.0;
    curve.add_series("log_envelope", env);
  }
  curve.notes.push_back({"alpha", std::to_string(alpha)});
  curve.notes.push_back({"p", std::to_string(p)});
  curve.notes.push_back({"norm_f", std::to_string(fnorm)});
  return curve;
}

double k_functional_upper(const SampledField& field, double mu, double p) {
  const auto spectrum = forward(field);
  const double residual = approx_error(spectrum, 1.0, mu, p);
  const auto quotient = SymbolSpec::quotient(1.0, mu);
  auto dt = apply_radial(spectrum, [&](double r) { return r * (1.0 - symbol_value(quotient, r)); });
  return residual + lp_norm(inverse(dt), p) / mu;
}

LogLogFit rate_fit(const CurveResult& curve, const std::string& series, double lo, double hi) {
  const auto& values = curve.series(series);
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < curve.mu.size(); ++i) {
    const double mu = curve.mu[i];
    if (mu < lo * (1.0 - 1e-9) || mu > hi * (1.0 + 1e-9)) continue;
    if (!(values[i] > 0.0))
      throw Error(ErrorCode::InvalidArgument, "non-positive value inside the fit window");
    xs.push_back(mu);
    ys.push_back(values[i]);
  }
  if (xs.size() < 4) throw Error(ErrorCode::InvalidArgument, "fit window holds fewer than 4 points");
  return loglog_fit(xs, ys);
}

LogLogFit rate_fit(CurveResult& curve, const std::string& series, double lo, double hi) {
  const auto fit = rate_fit(static_cast<const CurveResult&>(curve), series, lo, hi);
  curve.fits.push_back({series, lo, hi, fit});
  return fit;
}

double lipschitz_exponent(TestFunctionSpec::Kind kind, double p) {
  using K = TestFunctionSpec::Kind;
  switch (kind) {
    case K::Indicator: return 1.0 / p;
    default: return 1.0;
  }
}

CurveResult lipschitz_rate(const GridSpec& grid, const TestFunctionSpec& kind, double alpha,
                           double p, const std::vector<double>& mu_grid, double fit_lo) {
  const auto field = make_test_function(grid, kind);
  const auto spectrum = forward(field);
  CurveResult curve;
  curve.mu = mu_grid;
  std::vector<double> err(mu_grid.size());
  parallel_for(mu_grid.size(), [&](std::size_t i) {
    err[i] = approx_error(spectrum, alpha, mu_grid[i], p);
  });
  curve.add_series("err", err);
  const double s = lipschitz_exponent(kind.kind, p);
  // Lip(1,1) without W^1_1 membership: the rate carries a logarithm.
  const bool log_rate = p == 1.0 && kind.kind == TestFunctionSpec::Kind::Indicator;
  curve.notes.push_back({"function", to_string(kind.kind)});
  curve.notes.push_back({"lipschitz_s", std::to_string(s)});
  if (log_rate) {
    std::vector<double> comp(err.size());
    for (std::size_t i = 0; i < err.size(); ++i) comp[i] = err[i] / std::log(mu_grid[i]);
    curve.add_series("err_over_log", comp);
    curve.notes.push_back({"predicted_rate", "mu^-1 ln(mu)"});
    rate_fit(curve, "err", fit_lo, mu_grid.back());
    rate_fit(curve, "err_over_log", fit_lo, mu_grid.back());
  } else {
    curve.notes.push_back({"predicted_rate", "mu^-" + std::to_string(alpha * s)});
    rate_fit(curve, "err", fit_lo, mu_grid.back());
  }
  return curve;
}

CurveResult saturation_curve(const SampledField& field, double p,
                             const std::vector<double>& mu_grid) {
  const auto spectrum = forward(field);
  CurveResult curve;
  curve.mu = mu_grid;
  std::vector<double> mu_err(mu_grid.size()), mu12(mu_grid.size());
  parallel_for(mu_grid.size(), [&](std::size_t i) {
    const double e = approx_error(spectrum, 1.0, mu_grid[i], p);
    mu_err[i] = mu_grid[i] * e;
    mu12[i] = std::pow(mu_grid[i], 1.2) * e;
  });
  curve.add_series("mu_err", mu_err);
  curve.add_series("mu12_err", mu12);
  if (p == 2.0) {
    const double ref = l2_norm(apply_radial(spectrum, [](double r) { return r; }));
    curve.add_series("reference", std::vector<double>(mu_grid.size(), ref));
  }
  return curve;
}

// ---------------------------------------------------------------------------
// Besov

BesovReport besov_ratio(const SampledField& field, double s, double p, double q, double mu_max,
                        const OmegaSampling& sampling, int per_octave) {
  if (!(s > 0.0 && s < 1.0)) throw Error(ErrorCode::OutOfRange, "Besov smoothness must lie in (0,1)");
  if (!(p > 1.0) || !std::isfinite(p)) throw Error(ErrorCode::OutOfRange, "Besov needs 1 < p < inf");
  if (!(q >= 1.0) || !std::isfinite(q)) throw Error(ErrorCode::OutOfRange, "Besov needs 1 <= q < inf");
  if (!(mu_max >= 100.0)) throw Error(ErrorCode::OutOfRange, "mu_max must cover two decades");
  if (1.0 / mu_max < 2.0 * field.grid.spacing() * (1.0 - 1e-12))
    throw Error(ErrorCode::Unresolvable, "1/mu_max is below two grid steps");

  const auto nodes = geometric_grid(1.0, mu_max, per_octave);
  const auto spectrum = forward(field);
  std::vector<double> gl(nodes.size()), gr(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) {
    const double mu = nodes[i];
    const double w = modulus_of_continuity(field, 1.0 / mu, p, sampling);
    const double e = approx_error(spectrum, 1.0, mu, p);
    gl[i] = std::pow(std::pow(mu, s) * w, q);
    gr[i] = std::pow(std::pow(mu, s) * e, q);
  });
  const double du = std::log(2.0) / per_octave;
  // Trapezoid in ln mu restricted to nodes with mu <= upper.
  auto integrate = [&](const std::vector<double>& g, double upper) {
    double acc = 0.0;
    for (std::size_t i = 1; i < nodes.size(); ++i) {
      if (nodes[i] > upper * (1.0 + 1e-12)) break;
      acc += 0.5 * du * (g[i - 1] + g[i]);
    }
    return acc;
  };
  BesovReport report;
  const double il = integrate(gl, mu_max), ir = integrate(gr, mu_max);
  if (il == 0.0 && ir == 0.0) return report;

  // Per-decade contributions of the lhs must shrink at the top.
  const double top = integrate(gl, mu_max) - integrate(gl, mu_max / 10.0);
  const double below = integrate(gl, mu_max / 10.0) - integrate(gl, mu_max / 100.0);
  if (top >= below) throw Error(ErrorCode::Divergent, "Besov modulus integral is not converging");

  report.lhs = std::pow(il, 1.0 / q);
  report.rhs = std::pow(ir, 1.0 / q);
  report.ratio = report.lhs > 0.0 ? report.rhs / report.lhs : INFINITY;
  report.lhs_defect = 1.0 - std::pow(integrate(gl, mu_max / 10.0) / il, 1.0 / q);
  report.rhs_defect = ir > 0.0 ? 1.0 - std::pow(integrate(gr, mu_max / 10.0) / ir, 1.0 / q) : 0.0;
  report.truncated = report.lhs_defect > 0.05 || report.rhs_defect > 0.05;
  return report;
}

// ---------------------------------------------------------------------------
// Maximal functions

SampledField truncated_maximal(const SampledField& field, double alpha, double delta) {
  const auto& g = field.grid;
  const double h = g.spacing();
  if (!(delta >= h * (1.0 - 1e-12)))
    throw Error(ErrorCode::OutOfRange, "truncation radius must be at least one grid step");
  const auto K = static_cast<std::int64_t>(std::floor(delta / h * (1.0 + 1e-12)));
  const int d = g.dim();
  const auto n = static_cast<std::int64_t>(g.n());
  std::vector<double> absf(field.values.size());
  for (std::size_t i = 0; i < absf.size(); ++i) absf[i] = std::abs(field.values[i]);
  SampledField out = SampledField::zeros(g);

  if (d == 1) {
    // Periodic prefix sums: S[i] = sum_{m < i} |f_m| over a doubled array.
    std::vector<double> prefix(static_cast<std::size_t>(3 * n + 1), 0.0);
    for (std::int64_t i = 0; i < 3 * n; ++i)
      prefix[static_cast<std::size_t>(i + 1)] = prefix[static_cast<std::size_t>(i)] +
                                                 absf[static_cast<std::size_t>(i % n)];
    auto window = [&](std::int64_t lo, std::int64_t hi) {  // sum over [lo, hi]
      return prefix[static_cast<std::size_t>(hi + n + 1)] - prefix[static_cast<std::size_t>(lo + n)];
    };
    for (std::int64_t i = 0; i < n; ++i) {
      double best = 0.0;
      for (std::int64_t k = 1; k <= K && k < n / 2; ++k) {
        const double r = static_cast<double>(k) * h;
        const double interior = k > 1 ? window(i - k + 1, i + k - 1) : absf[static_cast<std::size_t>(i)];
        const double edge = 0.5 * (absf[static_cast<std::size_t>(((i - k) % n + n) % n)] +
                                   absf[static_cast<std::size_t>((i + k) % n)]);
        best = std::max(best, std::pow(r, alpha - 1.0) * h * (interior + edge));
      }
      out.values[static_cast<std::size_t>(i)] = best;
    }
    return out;
  }

  // d >= 2: lattice offsets sorted by squared length, swept radius by radius.
  std::vector<std::pair<std::int64_t, std::array<std::int64_t, 3>>> offsets;
  for (std::int64_t a = -K; a <= K; ++a)
    for (std::int64_t b = -K; b <= K; ++b)
      for (std::int64_t c = (d == 3 ? -K : 0); c <= (d == 3 ? K : 0); ++c) {
        const auto r2 = a * a + b * b + c * c;
        if (r2 <= K * K) offsets.push_back({r2, {a, b, c}});
      }
  std::sort(offsets.begin(), offsets.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  const double vol = g.cell_volume();
  for (std::size_t flat = 0; flat < g.size(); ++flat) {
    const auto idx = g.unflatten(flat);
    double sum = 0.0, best = 0.0;
    std::size_t o = 0;
    for (std::int64_t k = 1; k <= K; ++k) {
      while (o < offsets.size() && offsets[o].first <= k * k) {
        std::array<std::size_t, 3> src{0, 0, 0};
        for (int a = 0; a < d; ++a)
          src[a] = static_cast<std::size_t>(((static_cast<std::int64_t>(idx[a]) + offsets[o].second[a]) % n + n) % n);
        sum += absf[g.flatten(src)];
        ++o;
      }
      const double r = static_cast<double>(k) * h;
      best = std::max(best, std::pow(r, alpha - d) * vol * sum);
    }
    out.values[flat] = best;
  }
  return out;
}

DominationResult fitted_domination(const CurveResult& curve, const std::string& lhs,
                                   const std::string& rhs, std::size_t anchor, double safety) {
  const auto& a = curve.series(lhs);
  const auto& b = curve.series(rhs);
  DominationResult r;
  if (anchor >= a.size()) throw Error(ErrorCode::OutOfRange, "anchor outside the curve");
  r.constant = b[anchor] > 0.0 ? safety * a[anchor] / b[anchor] : 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0 && b[i] == 0.0) continue;
    const double ratio = b[i] > 0.0 ? a[i] / b[i] : INFINITY;
    r.worst = std::max(r.worst, ratio);
    if (a[i] > r.constant * b[i]) r.holds = false;
  }
  return r;
}

CurveResult muckenhoupt_wheeden_check(const SampledField& field, double p,
                                      const std::vector<double>& mu_grid, DcPolicy dc,
                                      const OmegaSampling& sampling) {
  if (!(p > 1.0)) throw Error(ErrorCode::OutOfRange, "Muckenhoupt-Wheeden check needs p > 1");
  const auto spectrum = forward(field);
  // Throws Singular for a nonzero mean unless the caller overrides the policy.
  auto riesz = inverse(apply_symbol(spectrum, SymbolSpec::riesz(1.0), dc));
  for (auto& v : riesz.values) v = Complex(v.real(), 0.0);
  CurveResult curve;
  curve.mu = mu_grid;
  std::vector<double> lhs(mu_grid.size()), rhs(mu_grid.size()), ratio(mu_grid.size());
  parallel_for(mu_grid.size(), [&](std::size_t i) {
    const double t = 1.0 / mu_grid[i];
    lhs[i] = modulus_of_continuity(riesz, t, p, sampling);
    rhs[i] = lp_norm(truncated_maximal(field, 1.0, t), p);
    ratio[i] = rhs[i] > 0.0 ? lhs[i] / rhs[i] : 0.0;
  });
  curve.add_series("lhs", lhs);
  curve.add_series("rhs", rhs);
  curve.add_series("ratio", ratio);
  curve.notes.push_back({"riesz_dc", "zero-mean convention (DC mode of I_1 f set to 0)"});
  return curve;
}

// ---------------------------------------------------------------------------
// Localization

namespace {

void require_vanishing(const SampledField& field, const std::array<double, 3>& x0, double delta) {
  const auto& g = field.grid;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (distance(g.position(i), x0, g.dim()) < delta && field.values[i] != Complex(0.0))
      throw Error(ErrorCode::InvalidArgument, "field does not vanish on the excluded ball");
  }
}

// E_{alpha,mu} f at one grid point by a direct spectral sum.
double pointwise_error(const SpectralField& spectrum, double alpha, double mu, std::size_t point) {
  const auto& g = spectrum.grid;
  const auto x = g.position(point);
  const auto quotient = SymbolSpec::quotient(alpha, mu);
  Complex acc = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto xi = g.wavevector(k);
    const double phase = xi[0] * x[0] + xi[1] * x[1] + xi[2] * x[2];
    acc += symbol_value(quotient, g.frequency_norm(k)) * spectrum.coefficients[k] *
           std::polar(1.0, phase);
  }
  return std::abs(acc) / std::pow(g.length(), g.dim());
}

}  // namespace

CurveResult localization_slope(const SampledField& field, double alpha,
                               const std::array<double, 3>& x0, double delta,
                               const std::vector<double>& mu_grid) {
  if (!(delta > 0.0)) throw Error(ErrorCode::OutOfRange, "vanishing radius delta must be > 0");
  for (double mu : mu_grid)
    if (!(mu * delta > 1.0)) throw Error(ErrorCode::OutOfRange, "need mu * delta > 1 on the grid");
  require_vanishing(field, x0, delta);
  const auto spectrum = forward(field);
  const auto point = field.grid.nearest_index(x0);
  CurveResult curve;
  curve.mu = mu_grid;
  std::vector<double> values(mu_grid.size());
  parallel_for(mu_grid.size(), [&](std::size_t i) {
    values[i] = pointwise_error(spectrum, alpha, mu_grid[i], point);
  });
  curve.add_series("value", values);
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] > 0.0) {
      xs.push_back(mu_grid[i]);
      ys.push_back(values[i]);
    }
  if (xs.size() >= 4) {
    const auto fit = loglog_fit(xs, ys);
    curve.fits.push_back({"value", xs.front(), xs.back(), fit});
    curve.notes.push_back({"slope", std::to_string(fit.slope)});
  } else {
    curve.notes.push_back({"slope", "undefined"});
  }
  curve.notes.push_back({"predicted_exponent", std::to_string(-0.5 * alpha)});
  return curve;
}

std::vector<double> localization_constants(const GridSpec& grid, double alpha,
                                           const std::vector<double>& deltas, double width,
                                           const std::vector<double>& mu_grid) {
  std::vector<double> out;
  for (double delta : deltas) {
    const auto field = make_test_function(grid, TestFunctionSpec::annular(delta, delta + width, true));
    const auto curve = localization_slope(field, alpha, {0.0, 0.0, 0.0}, delta, mu_grid);
    const auto& v = curve.series("value");
    const double norm = lp_norm(field, 2.0);
    double c = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
      c = std::max(c, v[i] * std::pow(mu_grid[i], 0.5 * alpha) / norm);
    out.push_back(c);
  }
  return out;
}

double uniform_maximal_check(const SampledField& field, double alpha, double sigma, double delta,
                             const std::vector<double>& mu_grid) {
  if (!(sigma < delta)) throw Error(ErrorCode::OutOfRange, "need sigma < delta");
  if (!(sigma >= 0.0)) throw Error(ErrorCode::OutOfRange, "sigma must be >= 0");
  const std::array<double, 3> origin{0.0, 0.0, 0.0};
  require_vanishing(field, origin, delta);
  double sup_f = 0.0;
  for (const auto& v : field.values) sup_f = std::max(sup_f, std::abs(v));
  if (sup_f == 0.0) return 0.0;
  const auto& g = field.grid;
  std::vector<std::size_t> inner;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (distance(g.position(i), origin, g.dim()) <= sigma) inner.push_back(i);
  const auto spectrum = forward(field);
  std::vector<double> best(mu_grid.size(), 0.0);
  parallel_for(mu_grid.size(), [&](std::size_t m) {
    const auto e = inverse(apply_symbol(spectrum, SymbolSpec::quotient(alpha, mu_grid[m])));
    for (auto i : inner) best[m] = std::max(best[m], std::abs(e.values[i]));
  });
  return *std::max_element(best.begin(), best.end()) / sup_f;
}

// ---------------------------------------------------------------------------
// Log-rate experiment in frequency space (d = 1, even profiles)

namespace {

double log1p_xi2(double xi) {
  return xi < 1e8 ? std::log1p(xi * xi) : 2.0 * std::log(xi) + std::log1p(1.0 / (xi * xi));
}

// (1/pi) int_0^inf g(xi) dxi over xi = e^u, u in [u_lo, u_hi], unit pieces.
double frequency_integral(const std::function<double(double)>& g, double u_lo, double u_hi) {
  using boost::math::quadrature::gauss_kronrod;
  double acc = 0.0;
  for (double a = u_lo; a < u_hi; a += 1.0) {
    const double b = std::min(a + 1.0, u_hi);
    acc += gauss_kronrod<double, 21>::integrate(
        [&](double u) {
          const double xi = std::exp(u);
          return g(xi) * xi;
        },
        a, b, 0, 0.0);
  }
  return acc / pi;
}

constexpr double kLogLow = -40.0;
constexpr double kLogHigh = 700.0;

}  // namespace

SpectralProfile log_weighted_profile(double log_power) {
  return [log_power](double xi) {
    const double r = std::abs(xi);
    if (r < 1.0) return 0.0;
    return std::pow(r, -0.5) * std::pow(1.0 + log1p_xi2(r), -log_power);
  };
}

double log_weighted_norm_squared(const SpectralProfile& profile) {
  auto g = [&](double xi) {
    const double v = profile(xi);
    return log1p_xi2(xi) * v * v;
  };
  const double half = frequency_integral(g, kLogLow, 0.5 * kLogHigh);
  const double full = half + frequency_integral(g, 0.5 * kLogHigh, kLogHigh);
  if (full - half > 0.02 * full)
    throw Error(ErrorCode::Divergent, "log-weighted spectral norm does not converge");
  return full;
}

CurveResult ksp_log_rate(const SpectralProfile& profile, const std::vector<double>& mu_grid) {
  const double weighted = log_weighted_norm_squared(profile);
  CurveResult curve;
  curve.mu = mu_grid;
  std::vector<double> err(mu_grid.size()), scaled(mu_grid.size());
  for (std::size_t i = 0; i < mu_grid.size(); ++i) {
    const double mu = mu_grid[i];
    if (!(mu > 1.0)) throw Error(ErrorCode::OutOfRange, "log-rate grid needs mu > 1");
    const auto quotient = SymbolSpec::quotient(1.0, mu);
    const double e2 = frequency_integral(
        [&](double xi) {
          const double m = symbol_value(quotient, xi);
          const double v = profile(xi);
          return m * m * v * v;
        },
        kLogLow, kLogHigh);
    err[i] = std::sqrt(e2);
    scaled[i] = err[i] * std::sqrt(std::log(mu));
  }
  curve.add_series("err", err);
  curve.add_series("scaled", scaled);
  curve.notes.push_back({"log_weighted_norm_sq", std::to_string(weighted)});
  return curve;
}

}  // namespace brq
