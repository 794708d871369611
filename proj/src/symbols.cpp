#include "brq/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "brq/error.hpp"

namespace brq {

std::string to_string(SymbolKind kind) {
  switch (kind) {
    case SymbolKind::Quotient: return "quotient";
    case SymbolKind::Complement: return "complement";
    case SymbolKind::BesselPotential: return "bessel_potential";
    case SymbolKind::RieszPotential: return "riesz_potential";
    case SymbolKind::Remainder: return "remainder";
  }
  return "unknown";
}

void SymbolSpec::validate() const {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw Error(ErrorCode::OutOfRange, "mu must be > 0");
  switch (kind) {
    case SymbolKind::Quotient:
    case SymbolKind::Complement:
      if (!(alpha > 0.0 && alpha <= 1.0))
        throw Error(ErrorCode::OutOfRange, "quotient order alpha must lie in (0, 1]");
      break;
    case SymbolKind::BesselPotential:
    case SymbolKind::RieszPotential:
      if (!(alpha > 0.0 && alpha <= 2.0))
        throw Error(ErrorCode::OutOfRange, "potential order alpha must lie in (0, 2]");
      break;
    case SymbolKind::Remainder:
      if (alpha != 1.0) throw Error(ErrorCode::OutOfRange, "remainder symbol has alpha = 1");
      break;
  }
}

double symbol_value(const SymbolSpec& spec, double r) {
  const double mu = spec.mu;
  const double a = spec.alpha;
  switch (spec.kind) {
    case SymbolKind::Quotient:
      if (r == 0.0) return 0.0;
      // Scaled form keeps m(xi) = m_{a,1}(xi/mu) bit-for-bit.
      return std::pow((r / mu) / std::hypot(1.0, r / mu), a);
    case SymbolKind::Complement:
      if (r == 0.0) return 1.0;
      return 1.0 - std::pow((r / mu) / std::hypot(1.0, r / mu), a);
    case SymbolKind::BesselPotential:
      return std::pow(std::hypot(mu, r), -a);
    case SymbolKind::RieszPotential:
      if (r == 0.0) throw Error(ErrorCode::Singular, "Riesz potential is singular at xi = 0");
      return std::pow(r, -a);
    case SymbolKind::Remainder:
      return mu / (std::hypot(mu, r) + r);
  }
  return 0.0;
}

double symbol_value(const SymbolSpec& spec, const std::array<double, 3>& xi) {
  return symbol_value(spec, std::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]));
}

namespace {

std::int64_t squared_index(const GridSpec& g, std::size_t flat) {
  auto idx = g.unflatten(flat);
  std::int64_t s = 0;
  for (int a = 0; a < g.dim(); ++a) {
    const auto k = g.signed_index(idx[a]);
    s += k * k;
  }
  return s;
}

}  // namespace

SpectralField apply_radial(const SpectralField& spectrum, const RadialMultiplier& b) {
  const auto& g = spectrum.grid;
  SpectralField out = spectrum;
  std::unordered_map<std::int64_t, double> memo;
  for (std::size_t i = 0; i < out.coefficients.size(); ++i) {
    const auto key = squared_index(g, i);
    auto it = memo.find(key);
    if (it == memo.end())
      it = memo.emplace(key, b(g.frequency_step() * std::sqrt(static_cast<double>(key)))).first;
    out.coefficients[i] *= it->second;
  }
  return out;
}

SampledField apply_radial(const SampledField& field, const RadialMultiplier& b) {
  return inverse(apply_radial(forward(field), b));
}

SpectralField apply_symbol(const SpectralField& spectrum, const SymbolSpec& spec, DcPolicy dc) {
  spec.validate();
  if (spec.kind == SymbolKind::RieszPotential) {
    const Complex c0 = spectrum.coefficients.at(0);
    double scale = 0.0;
    for (const auto& c : spectrum.coefficients) scale = std::max(scale, std::abs(c));
    if (dc == DcPolicy::Error && std::abs(c0) > 1e-12 * scale)
      throw Error(ErrorCode::Singular, "Riesz potential of a field with nonzero mean");
    SpectralField out = apply_radial(spectrum, [&](double r) {
      return r == 0.0 ? 1.0 : symbol_value(spec, r);
    });
    if (dc != DcPolicy::Keep) out.coefficients[0] = 0.0;
    return out;
  }
  return apply_radial(spectrum, [&](double r) { return symbol_value(spec, r); });
}

SampledField apply_symbol(const SampledField& field, const SymbolSpec& spec, DcPolicy dc) {
  return inverse(apply_symbol(forward(field), spec, dc));
}

DerivativeBound default_bound(const SymbolSpec& spec) {
  switch (spec.kind) {
    case SymbolKind::Quotient:
    case SymbolKind::Complement: return DerivativeBound::Refined;
    case SymbolKind::Remainder: return DerivativeBound::Remainder;
    default: return DerivativeBound::Mikhlin;
  }
}

double derivative_bound(const SymbolSpec& spec, DerivativeBound bound, int order, double xi) {
  const double r = std::abs(xi);
  switch (bound) {
    case DerivativeBound::Refined:
      return std::pow(r, spec.alpha - order) * std::pow(spec.mu * spec.mu + r * r, -0.5 * spec.alpha);
    case DerivativeBound::Mikhlin: {
      // Potentials carry their own homogeneity: |xi|^{-a-k} or (mu^2+xi^2)^{-a/2} |xi|^{-k}.
      double base = 1.0;
      if (spec.kind == SymbolKind::RieszPotential) base = std::pow(r, -spec.alpha);
      if (spec.kind == SymbolKind::BesselPotential)
        base = std::pow(spec.mu * spec.mu + r * r, -0.5 * spec.alpha);
      return base * std::pow(r, -order);
    }
    case DerivativeBound::Remainder:
      return 2.0 * std::pow(r, -order);
  }
  return 0.0;
}

namespace {

void check_samples(const std::vector<double>& samples, int order) {
  if (order != 1 && order != 2)
    throw Error(ErrorCode::OutOfRange, "derivative order must be 1 or 2");
  if (samples.empty()) throw Error(ErrorCode::InvalidArgument, "no frequency samples");
  double lo = INFINITY, hi = 0.0;
  for (double s : samples) {
    if (s == 0.0) throw Error(ErrorCode::Singular, "derivative sample at xi = 0");
    lo = std::min(lo, std::abs(s));
    hi = std::max(hi, std::abs(s));
  }
  if (hi < 16.0 * lo)
    throw Error(ErrorCode::InvalidArgument, "samples must span at least 4 dyadic scales");
}

}  // namespace

BoundReport derivative_bound_check(const RadialMultiplier& b,
                                   const std::function<double(double)>& bound, int order,
                                   const std::vector<double>& samples) {
  check_samples(samples, order);
  BoundReport report;
  report.samples = samples;
  for (double xi : samples) {
    const double step = 1e-4 * std::abs(xi);
    double deriv;
    if (order == 1)
      deriv = (b(xi + step) - b(xi - step)) / (2.0 * step);
    else
      deriv = (b(xi + step) - 2.0 * b(xi) + b(xi - step)) / (step * step);
    const double ratio = std::abs(deriv) / bound(xi);
    report.ratios.push_back(ratio);
    report.max_ratio = std::max(report.max_ratio, ratio);
  }
  return report;
}

BoundReport derivative_bound_check(const SymbolSpec& spec, int order,
                                   const std::vector<double>& samples, DerivativeBound bound) {
  spec.validate();
  // Symbols are even in xi; evaluate through |xi| so negative samples work.
  auto b = [&](double xi) { return symbol_value(spec, std::abs(xi)); };
  auto ref = [&](double xi) { return derivative_bound(spec, bound, order, xi); };
  auto report = derivative_bound_check(b, ref, order, samples);
  report.label = to_string(spec.kind);
  return report;
}

BoundReport derivative_bound_check(const SymbolSpec& spec, int order,
                                   const std::vector<double>& samples) {
  return derivative_bound_check(spec, order, samples, default_bound(spec));
}

std::vector<double> dyadic_samples(double mu, int scales, int per_octave) {
  std::vector<double> out;
  for (int k = -scales * per_octave; k <= scales * per_octave; ++k)
    out.push_back(mu * std::exp2(static_cast<double>(k) / per_octave));
  return out;
}

}  // namespace brq
