#pragma once

#include <optional>
#include <string>

#include "metaband/complexity.hpp"
#include "metaband/dec.hpp"

namespace metaband {

/// JSON report of the coefficients, with the DEC scan when given.
/// Infinite coefficients are written as the string "inf".
std::string coefficients_json(const CoefficientReport& report, const std::optional<DecScan>& scan = std::nullopt);

}  // namespace metaband
