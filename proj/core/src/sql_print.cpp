#include "nrcq/sql_print.hpp"

#include <sstream>

namespace nrcq {

SqlDialect parse_dialect(const std::string& name) {
  if (name == "generic") return SqlDialect::Generic;
  if (name == "sqlite") return SqlDialect::Sqlite;
  if (name == "postgres") return SqlDialect::Postgres;
  throw SqlPrintError("unknown SQL dialect: " + name);
}

namespace {

struct Printer {
  SqlDialect dialect;

  std::string expr(const SqlExprPtr& e) {
    switch (e->kind) {
      case SqlExprKind::ColRef:
        return e->alias + "." + e->column;
      case SqlExprKind::IntLit:
        return std::to_string(e->i);
      case SqlExprKind::StringLit: {
        std::string out = "'";
        for (char c : e->s) {
          if (c == '\'') out += "''";
          out += c;
        }
        return out + "'";
      }
      case SqlExprKind::BoolLit:
        if (dialect == SqlDialect::Postgres) return e->b ? "TRUE" : "FALSE";
        return e->b ? "1=1" : "1=0";
      case SqlExprKind::NullLit:
        return "NULL";
      case SqlExprKind::PrimApp: {
        if (e->op == "!") return "NOT (" + expr(e->args[0]) + ")";
        static const std::map<std::string, std::string> infix = {
            {"==", "="},  {"!=", "<>"}, {"<", "<"},   {"<=", "<="},
            {">", ">"},   {">=", ">="}, {"&&", "AND"}, {"||", "OR"}};
        auto it = infix.find(e->op);
        if (it != infix.end() && e->args.size() == 2)
          return "(" + expr(e->args[0]) + " " + it->second + " " + expr(e->args[1]) + ")";
        std::string out = e->op + "(";
        for (size_t i = 0; i < e->args.size(); ++i) {
          if (i) out += ", ";
          out += expr(e->args[i]);
        }
        return out + ")";
      }
      case SqlExprKind::NotExists:
        return "NOT EXISTS (" + query(*e->sub) + ")";
    }
    return "?";
  }

  std::string from_item(const FromItem& f) {
    std::string out;
    if (f.lateral) {
      if (dialect == SqlDialect::Sqlite)
        throw SqlPrintError(
            "sqlite dialect cannot express LATERAL; delateralize the query first");
      out += "LATERAL ";
    }
    if (!f.table.empty())
      out += f.table;
    else
      out += "(" + query(*f.sub) + ")";
    out += " AS " + f.alias;
    return out;
  }

  std::string compound_operand(const SqlQueryPtr& q) {
    bool compound = q->kind != SqlQueryKind::Select;
    if (dialect == SqlDialect::Postgres || compound) return "(" + query(*q) + ")";
    return query(*q);
  }

  std::string query(const SqlQuery& q) {
    switch (q.kind) {
      case SqlQueryKind::Select: {
        std::string out = "SELECT ";
        if (q.distinct) out += "DISTINCT ";
        if (q.star) {
          out += "*";
        } else {
          for (size_t i = 0; i < q.projections.size(); ++i) {
            if (i) out += ", ";
            const auto& [e, alias] = q.projections[i];
            out += expr(e);
            if (!(e->kind == SqlExprKind::ColRef && e->column == alias))
              out += " AS " + alias;
          }
        }
        if (!q.from.empty()) {
          out += " FROM ";
          for (size_t i = 0; i < q.from.size(); ++i) {
            if (i) out += ", ";
            out += from_item(q.from[i]);
          }
        }
        if (q.where) out += " WHERE " + expr(q.where);
        return out;
      }
      case SqlQueryKind::Union:
        return compound_operand(q.left) + (q.union_all ? " UNION ALL " : " UNION ") +
               compound_operand(q.right);
      case SqlQueryKind::ExceptAll:
        return compound_operand(q.left) + " EXCEPT ALL " + compound_operand(q.right);
    }
    return "?";
  }
};

}  // namespace

std::string print_sql(const SqlQueryPtr& q, SqlDialect dialect) {
  Printer p{dialect};
  return p.query(*q);
}

}  // namespace nrcq
