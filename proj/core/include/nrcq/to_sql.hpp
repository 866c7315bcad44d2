#pragma once

#include <stdexcept>

#include "nrcq/eval.hpp"
#include "nrcq/signature.hpp"
#include "nrcq/sql.hpp"
#include "nrcq/term.hpp"

namespace nrcq {

struct ToSqlError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SqlTranslation {
  SqlQueryPtr query;
  Type elem_type;  // element type of the source collection
  bool set_typed = false;
};

/// Structural translation of a flat-collection normal form to SQL. Base
/// element types travel as a single `value` column. Generators whose source
/// references an in-scope variable are marked LATERAL.
SqlTranslation to_sql(const TermPtr& term, const Signature& sig);

/// Converts an executor result (bag of records) back to the evaluator's
/// value shape: unwraps `value` columns for base elements and rebuilds a set
/// when the source was set-typed.
KValue sql_result_value(const KValue& rows, const SqlTranslation& t);

}  // namespace nrcq
