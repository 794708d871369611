#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "brq/grid.hpp"

namespace brq {

enum class SymbolKind {
  Quotient,         ///< m(xi) = |xi|^a / (mu^2 + |xi|^2)^{a/2}
  Complement,       ///< 1 - m(xi)
  BesselPotential,  ///< (mu^2 + |xi|^2)^{-a/2}
  RieszPotential,   ///< |xi|^{-a}
  Remainder,        ///< mu / ((mu^2 + |xi|^2)^{1/2} + |xi|), order fixed at 1
};

std::string to_string(SymbolKind kind);

/// A radial multiplier from the Bessel-Riesz family. Quotient and complement
/// take alpha in (0, 1]; the potentials take alpha in (0, 2]; mu > 0.
struct SymbolSpec {
  SymbolKind kind = SymbolKind::Quotient;
  double alpha = 1.0;
  double mu = 1.0;

  static SymbolSpec quotient(double alpha, double mu) { return {SymbolKind::Quotient, alpha, mu}; }
  static SymbolSpec complement(double alpha, double mu) { return {SymbolKind::Complement, alpha, mu}; }
  static SymbolSpec bessel(double alpha, double mu) { return {SymbolKind::BesselPotential, alpha, mu}; }
  static SymbolSpec riesz(double alpha) { return {SymbolKind::RieszPotential, alpha, 1.0}; }
  static SymbolSpec remainder(double mu) { return {SymbolKind::Remainder, 1.0, mu}; }

  /// Throws Error{OutOfRange} on parameters outside the family.
  void validate() const;
  /// False only for the Riesz potential, which blows up at xi = 0.
  bool bounded() const noexcept { return kind != SymbolKind::RieszPotential; }
};

/// Symbol value at a frequency of norm |xi|. Throws Error{Singular} for the
/// Riesz potential at xi = 0.
double symbol_value(const SymbolSpec& spec, double xi_norm);
double symbol_value(const SymbolSpec& spec, const std::array<double, 3>& xi);

/// Treatment of the xi = 0 mode for symbols singular there: set it to zero,
/// pass it through unchanged, or throw when the input mean is nonzero.
enum class DcPolicy { Zero, Keep, Error };

/// Multiplies the spectrum by the symbol at every lattice frequency.
SpectralField apply_symbol(const SpectralField& spectrum, const SymbolSpec& spec,
                           DcPolicy dc = DcPolicy::Zero);
SampledField apply_symbol(const SampledField& field, const SymbolSpec& spec,
                          DcPolicy dc = DcPolicy::Zero);

using RadialMultiplier = std::function<double(double)>;

/// Applies an arbitrary radial multiplier b(|xi|). Lattice norms repeat a
/// lot in d > 1, so values are memoized per |k|^2 within one call.
SpectralField apply_radial(const SpectralField& spectrum, const RadialMultiplier& b);
SampledField apply_radial(const SampledField& field, const RadialMultiplier& b);

/// Per-sample ratios |d^k b(xi)| / bound(xi) for a radial symbol in d = 1.
struct BoundReport {
  std::string label;
  std::vector<double> samples;
  std::vector<double> ratios;
  double max_ratio = 0.0;
};

/// Reference bounds for symbol derivatives.
enum class DerivativeBound {
  /// C |xi|^{a-k} (mu^2 + |xi|^2)^{-a/2}, the refined estimate for m and 1 - m.
  Refined,
  /// C |xi|^{-k}, the Mikhlin-type estimate.
  Mikhlin,
  /// 2 / |xi| for the first derivative of the remainder symbol.
  Remainder,
};

DerivativeBound default_bound(const SymbolSpec& spec);
double derivative_bound(const SymbolSpec& spec, DerivativeBound bound, int order, double xi);

/// Central finite differences with step 1e-4 |xi|. order in {1, 2}. The
/// samples must be nonzero and span at least 4 dyadic scales.
BoundReport derivative_bound_check(const SymbolSpec& spec, int order,
                                   const std::vector<double>& samples);
BoundReport derivative_bound_check(const SymbolSpec& spec, int order,
                                   const std::vector<double>& samples, DerivativeBound bound);
BoundReport derivative_bound_check(const RadialMultiplier& b,
                                   const std::function<double(double)>& bound, int order,
                                   const std::vector<double>& samples);

/// Dyadic frequencies mu * 2^{k/per_octave} for k in [-scales, scales] octaves.
std::vector<double> dyadic_samples(double mu, int scales, int per_octave = 4);

}  // namespace brq
