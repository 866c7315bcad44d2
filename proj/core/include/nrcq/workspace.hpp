#pragma once

#include <stdexcept>
#include <string>

#include "nrcq/eval.hpp"
#include "nrcq/signature.hpp"

namespace nrcq {

struct WorkspaceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Workspace {
  Signature sig;
  TableStore store;
};

/// Parses the signature JSON: {"tables": {name: {field: basetype}},
/// "prims": {name: {"args": [...], "result": ...}}}. Field order follows
/// the file.
Signature load_signature(const std::string& schema_path);

/// Loads `<table>.csv` (header row = field names, multiplicity by row
/// repetition) or `<table>.json` (array of row objects) for every table in
/// the signature. A table without a data file is an error; a file with only
/// a header is the empty bag.
TableStore load_tables(const Signature& sig, const std::string& data_dir);

Workspace load_workspace(const std::string& schema_path, const std::string& data_dir);

}  // namespace nrcq
