#pragma once

#include <span>

namespace brq {

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Root-mean-square residual in log space.
  double residual = 0.0;
  int points = 0;
};

/// Least-squares line through (ln x, ln y). Throws Error{InvalidArgument} for
/// fewer than two points or non-positive values.
LogLogFit loglog_fit(std::span<const double> x, std::span<const double> y);

}  // namespace brq
