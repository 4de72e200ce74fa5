#pragma once

#include "conflow/comparison.hpp"
#include "conflow/ellipticity.hpp"
#include "conflow/solver.hpp"

#include <json.hpp>

namespace conflow::detail {

using Json = nlohmann::ordered_json;

/// Non-finite doubles become null.
Json number(double v);
Json node_json(const SphericalGrid& grid, Node n);
Json grid_to_json(const SphericalGrid& grid);
Json to_json(const EllipticityCertificate& cert);
Json to_json(const SolveReport& report);
Json to_json(const ComparisonReport& report, const SphericalGrid& grid);
Json to_json(const std::vector<HopfEntry>& hopf);

} // namespace conflow::detail
