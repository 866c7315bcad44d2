#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace nrcq {

struct SqlQuery;
using SqlQueryPtr = std::shared_ptr<const SqlQuery>;
struct SqlExpr;
using SqlExprPtr = std::shared_ptr<const SqlExpr>;

enum class SqlExprKind { ColRef, IntLit, StringLit, BoolLit, NullLit, PrimApp, NotExists };

struct SqlExpr {
  SqlExprKind kind;
  std::string alias;   // ColRef
  std::string column;  // ColRef
  std::int64_t i = 0;
  std::string s;
  bool b = false;
  std::string op;  // PrimApp
  std::vector<SqlExprPtr> args;
  SqlQueryPtr sub;  // NotExists
};

/// FROM item: either a base table or an aliased subquery; lateral items may
/// reference aliases introduced to their left (or in enclosing queries).
struct FromItem {
  bool lateral = false;
  std::string table;  // nonempty for base tables
  SqlQueryPtr sub;    // otherwise
  std::string alias;
};

enum class SqlQueryKind { Select, Union, ExceptAll };

struct SqlQuery {
  SqlQueryKind kind;
  // Select
  bool distinct = false;
  bool star = false;  // SELECT * (projections empty)
  std::vector<std::pair<SqlExprPtr, std::string>> projections;
  std::vector<FromItem> from;
  SqlExprPtr where;  // absent for no WHERE clause
  // Union / ExceptAll
  bool union_all = false;
  SqlQueryPtr left;
  SqlQueryPtr right;
};

namespace sqlast {
SqlExprPtr col(std::string alias, std::string column);
SqlExprPtr int_lit(std::int64_t v);
SqlExprPtr string_lit(std::string v);
SqlExprPtr bool_lit(bool v);
SqlExprPtr null_lit();
SqlExprPtr prim(std::string op, std::vector<SqlExprPtr> args);
SqlExprPtr not_exists(SqlQueryPtr sub);

SqlQueryPtr select(bool distinct, std::vector<std::pair<SqlExprPtr, std::string>> projections,
                   std::vector<FromItem> from, SqlExprPtr where);
SqlQueryPtr select_star(bool distinct, std::vector<FromItem> from, SqlExprPtr where);
SqlQueryPtr union_(bool all, SqlQueryPtr l, SqlQueryPtr r);
SqlQueryPtr except_all(SqlQueryPtr l, SqlQueryPtr r);
}  // namespace sqlast

/// True if the query or any subquery has a lateral FROM item.
bool has_lateral(const SqlQueryPtr& q);

}  // namespace nrcq
