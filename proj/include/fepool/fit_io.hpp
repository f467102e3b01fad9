#pragma once

#include <string>

#include "fepool/forecast.hpp"

namespace fepool {

/// JSON persistence of a trained combination: catalog, standardization
/// stats, coefficients, variable-selection draws, window/prior/inference
/// settings. Round-trips exactly (doubles are serialized losslessly).
std::string fit_to_json(const CombinationFit& fit);
CombinationFit fit_from_json(const std::string& text);

void save_fit(const CombinationFit& fit, const std::string& path);
CombinationFit load_fit(const std::string& path);

} // namespace fepool
