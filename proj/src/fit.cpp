#include "brq/fit.hpp"

#include <cmath>

#include "brq/error.hpp"

namespace brq {

LogLogFit loglog_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::InvalidArgument, "fit inputs differ in length");
  if (x.size() < 2) throw Error(ErrorCode::InvalidArgument, "fit needs at least two points");
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw Error(ErrorCode::InvalidArgument, "log-log fit needs positive values");
    sx += std::log(x[i]);
    sy += std::log(y[i]);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  LogLogFit fit;
  fit.points = static_cast<int>(x.size());
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = std::log(y[i]) - (fit.intercept + fit.slope * std::log(x[i]));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

}  // namespace brq
