#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "nrcq/kvalue.hpp"
#include "nrcq/normalize.hpp"
#include "nrcq/workspace.hpp"

namespace nrcq {

struct RunOptions {
  std::string engine = "eval";  // eval | sqlexec
  std::string dialect = "generic";
  bool keep_lateral = false;
  bool nested = false;
  bool trace = false;
  std::uint64_t seed = 0;
  int corpus_count = 100;
  std::size_t step_budget = kDefaultStepBudget;
};

/// Executes one CLI command against a loaded workspace; returns the process
/// exit status. Commands: check, normalize, delateralize, sql, shred, run,
/// corpus-test.
int run_command(const Workspace& ws, const std::string& command,
                const std::string& query_source, const RunOptions& opts,
                std::ostream& out, std::ostream& err);

/// Canonical JSON for nested values: sets as sorted arrays, bags as arrays
/// of {"value": ..., "count": ...}.
std::string value_to_json(const KValue& v);

/// Flat rows as JSON lines with a __count multiplicity field; columns follow
/// the element type.
void print_rows_json(const KValue& rows, const Type& elem, std::ostream& out);

}  // namespace nrcq
