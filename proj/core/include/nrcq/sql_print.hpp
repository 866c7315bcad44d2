#pragma once

#include <stdexcept>
#include <string>

#include "nrcq/sql.hpp"

namespace nrcq {

enum class SqlDialect { Generic, Sqlite, Postgres };

struct SqlPrintError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

SqlDialect parse_dialect(const std::string& name);

/// Deterministic rendering: keywords upper-case, aliases as generated,
/// `expr AS alias` elided when the expression is a column reference with the
/// same name. Sqlite refuses LATERAL with a hint to delateralize.
std::string print_sql(const SqlQueryPtr& q, SqlDialect dialect = SqlDialect::Generic);

}  // namespace nrcq
