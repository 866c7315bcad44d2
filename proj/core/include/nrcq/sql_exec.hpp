#pragma once

#include <stdexcept>
#include <vector>

#include "nrcq/eval.hpp"
#include "nrcq/sql.hpp"

namespace nrcq {

struct SqlExecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Multiset-semantics interpreter for exactly the emitted SQL subset; an
/// oracle, not a database. SELECT preserves multiplicity, DISTINCT collapses
/// to one, UNION ALL adds, EXCEPT ALL subtracts truncated, NOT EXISTS tests
/// emptiness, LATERAL re-evaluates per outer row. Non-lateral subqueries are
/// evaluated under an empty scope, so an unmarked correlated item is an error.
/// Returns a bag of flat records.
KValue exec_sql(const SqlQueryPtr& q, const TableStore& store, const Signature& sig);

/// Column names a query produces, in output order.
std::vector<std::string> sql_columns(const SqlQueryPtr& q, const Signature& sig);

}  // namespace nrcq
