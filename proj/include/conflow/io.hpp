#pragma once

#include "conflow/comparison.hpp"
#include "conflow/ellipticity.hpp"
#include "conflow/gas.hpp"
#include "conflow/grid.hpp"
#include "conflow/solver.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace conflow {

/// CSV with header `theta,phi,value`, one row per node, theta index outer,
/// values printed with 17 significant digits.
void write_field_csv(std::ostream& os, const ScalarField& f);
void write_field_csv(const std::filesystem::path& path, const ScalarField& f);

/// Reads a field written by write_field_csv onto `grid`. Row count and node
/// coordinates must match the grid.
ScalarField read_field_csv(std::istream& is, const GridPtr& grid);
ScalarField read_field_csv(const std::filesystem::path& path, const GridPtr& grid);

/// Grid metadata as a JSON object; the mask is omitted for full patches.
std::string grid_json(const SphericalGrid& grid);

/// Mask text: n_theta non-empty lines of n_phi characters from {0, 1};
/// blanks are ignored and '#' starts a comment.
std::vector<std::uint8_t> read_mask(std::istream& is, const GridSpec& spec);
std::vector<std::uint8_t> read_mask(const std::filesystem::path& path, const GridSpec& spec);

/// Rows `i,j,theta,phi,type` over masked nodes, type in {E, P, H, V}.
void write_type_map_csv(std::ostream& os, const GasModel& gas, const ScalarField& f,
                        double eps_type = kDefaultTypeBand);

/// Pseudo-Mach square at every node (inf where c^2 <= 0, nan outside the mask).
ScalarField pseudo_mach_field(const GasModel& gas, const ScalarField& f);

/// 8-bit binary PGM; finite values are scaled linearly to [0, 255] and
/// non-finite ones written as 0.
void write_pgm(const std::filesystem::path& path, const ScalarField& f);

std::string certificate_json(const EllipticityCertificate& cert);
std::string solve_report_json(const SolveReport& report);
/// Node entries carry theta and phi taken from `grid`.
std::string comparison_report_json(const ComparisonReport& report, const SphericalGrid& grid);

} // namespace conflow
