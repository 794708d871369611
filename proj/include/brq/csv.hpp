#pragma once

#include <string>

#include "brq/approx.hpp"

namespace brq {

/// CSV text for a curve: header "mu,<series...>", one row per mu in %.15e,
/// then footer rows "#fit,<series>,<lo>,<hi>,<slope>,<intercept>,<residual>"
/// and "#note,<key>,<value>".
std::string format_csv(const CurveResult& result);

/// Writes format_csv(result) to path through a temporary file and a rename, so
/// a failed write leaves nothing behind. Throws Error{Io}.
void write_csv(const CurveResult& result, const std::string& path);

}  // namespace brq
