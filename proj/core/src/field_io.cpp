#include "ccmin/field_io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include "ccmin/error.hpp"

namespace ccmin {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

void write_field_csv(std::ostream& os, const Field& f) {
  const Grid& g = f.grid();
  const bool cyl = g.kind() == GridKind::cylindrical;
  os << (cyl ? "coord1,coord2,component,value\n" : "coord1,component,value\n");
  const auto c1 = g.coord1();
  const auto c2 = g.coord2();
  for (std::size_t k = 0; k < f.components(); ++k) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      os << format_number(c1[i]) << ',';
      if (cyl) os << format_number(c2[i]) << ',';
      os << k << ',' << format_number(f(k, i)) << '\n';
    }
  }
}

Field read_field_csv(std::istream& is, GridPtr grid) {
  const bool cyl = grid->kind() == GridKind::cylindrical;
  const std::size_t cols = cyl ? 4 : 3;
  std::string line;
  if (!std::getline(is, line)) throw InvalidArgument("read_field_csv: empty input");
  const auto header = split_csv_line(line);
  if (header.size() != cols || header[0] != "coord1" || header[cols - 1] != "value") {
    throw InvalidArgument("read_field_csv: unexpected header '" + line + "'");
  }
  std::vector<double> values;
  std::size_t components = 0;
  const std::size_t n = grid->size();
  const auto c1 = grid->coord1();
  const auto c2 = grid->coord2();
  std::size_t row = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != cols) throw InvalidArgument("read_field_csv: bad row " + line);
    const std::size_t i = row % n;
    const std::size_t k = std::stoul(cells[cols - 2]);
    if (k != row / n) throw InvalidArgument("read_field_csv: rows out of order");
    const double x = std::stod(cells[0]);
    const double tol = 1e-12 * (1.0 + std::abs(c1[i]));
    bool ok = std::abs(x - c1[i]) <= tol;
    if (cyl) ok = ok && std::abs(std::stod(cells[1]) - c2[i]) <= 1e-12 * (1.0 + std::abs(c2[i]));
    if (!ok) throw GridMismatch("read_field_csv: coordinates do not match the grid");
    values.push_back(std::stod(cells[cols - 1]));
    components = k + 1;
    ++row;
  }
  if (components == 0 || values.size() != components * n) {
    throw InvalidArgument("read_field_csv: incomplete field dump");
  }
  return Field(std::move(grid), components, std::move(values));
}

}  // namespace ccmin
