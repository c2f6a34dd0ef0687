#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ccmin/grid.hpp"

namespace ccmin {

/// Full-precision scientific rendering used by every CSV writer (17 significant digits).
std::string format_number(double v);

/// Writes `coord1[,coord2],component,value`, one row per node per component.
void write_field_csv(std::ostream& os, const Field& f);

/// Reads a dump produced by write_field_csv back onto `grid`. Rows must be in
/// the writer's order; coordinates are checked against the grid.
Field read_field_csv(std::istream& is, GridPtr grid);

/// Splits one CSV line on commas (no quoting; all artifacts are numeric).
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace ccmin
