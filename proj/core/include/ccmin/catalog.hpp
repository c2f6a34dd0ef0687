#pragma once

#include <string>
#include <vector>

#include "ccmin/energy.hpp"

namespace ccmin {

/// Parameter schema entry for --list output and config validation.
struct ParamSpec {
  std::string name;
  double default_value;
  std::string description;
};

struct CatalogEntry {
  std::string kind;  // "lagrangian", "nonlinearity", "constraint"
  std::string name;
  std::string formula;
  std::vector<ParamSpec> params;
};

const std::vector<CatalogEntry>& catalog();

/// Looks up `name` and fills unspecified parameters with defaults. Unknown
/// names or parameter keys throw InvalidArgument naming the identifier.
Lagrangian make_lagrangian(const std::string& name, const Params& params = {});
Nonlinearity make_nonlinearity(const std::string& name, const Params& params = {},
                               std::size_t components = 1);
Constraint make_constraint(const std::string& name, const Params& params = {});

/// Human-readable listing, byte-stable across runs.
std::string list_catalog();

}  // namespace ccmin
