#include "nrcq/sql.hpp"

namespace nrcq {

namespace sqlast {

namespace {
std::shared_ptr<SqlExpr> enode(SqlExprKind k) {
  auto e = std::make_shared<SqlExpr>();
  e->kind = k;
  return e;
}
}  // namespace

SqlExprPtr col(std::string alias, std::string column) {
  auto e = enode(SqlExprKind::ColRef);
  e->alias = std::move(alias);
  e->column = std::move(column);
  return e;
}

SqlExprPtr int_lit(std::int64_t v) {
  auto e = enode(SqlExprKind::IntLit);
  e->i = v;
  return e;
}

SqlExprPtr string_lit(std::string v) {
  auto e = enode(SqlExprKind::StringLit);
  e->s = std::move(v);
  return e;
}

SqlExprPtr bool_lit(bool v) {
  auto e = enode(SqlExprKind::BoolLit);
  e->b = v;
  return e;
}

SqlExprPtr null_lit() { return enode(SqlExprKind::NullLit); }

SqlExprPtr prim(std::string op, std::vector<SqlExprPtr> args) {
  auto e = enode(SqlExprKind::PrimApp);
  e->op = std::move(op);
  e->args = std::move(args);
  return e;
}

SqlExprPtr not_exists(SqlQueryPtr sub) {
  auto e = enode(SqlExprKind::NotExists);
  e->sub = std::move(sub);
  return e;
}

SqlQueryPtr select(bool distinct, std::vector<std::pair<SqlExprPtr, std::string>> projections,
                   std::vector<FromItem> from, SqlExprPtr where) {
  auto q = std::make_shared<SqlQuery>();
  q->kind = SqlQueryKind::Select;
  q->distinct = distinct;
  q->projections = std::move(projections);
  q->from = std::move(from);
  q->where = std::move(where);
  return q;
}

SqlQueryPtr select_star(bool distinct, std::vector<FromItem> from, SqlExprPtr where) {
  auto q = std::make_shared<SqlQuery>();
  q->kind = SqlQueryKind::Select;
  q->distinct = distinct;
  q->star = true;
  q->from = std::move(from);
  q->where = std::move(where);
  return q;
}

SqlQueryPtr union_(bool all, SqlQueryPtr l, SqlQueryPtr r) {
  auto q = std::make_shared<SqlQuery>();
  q->kind = SqlQueryKind::Union;
  q->union_all = all;
  q->left = std::move(l);
  q->right = std::move(r);
  return q;
}

SqlQueryPtr except_all(SqlQueryPtr l, SqlQueryPtr r) {
  auto q = std::make_shared<SqlQuery>();
  q->kind = SqlQueryKind::ExceptAll;
  q->left = std::move(l);
  q->right = std::move(r);
  return q;
}

}  // namespace sqlast

namespace {
bool expr_has_lateral(const SqlExprPtr& e);

bool query_has_lateral(const SqlQuery& q) {
  if (q.kind != SqlQueryKind::Select) {
    return query_has_lateral(*q.left) || query_has_lateral(*q.right);
  }
  for (const auto& f : q.from) {
    if (f.lateral) return true;
    if (f.sub && query_has_lateral(*f.sub)) return true;
  }
  for (const auto& [e, a] : q.projections)
    if (expr_has_lateral(e)) return true;
  if (q.where && expr_has_lateral(q.where)) return true;
  return false;
}

bool expr_has_lateral(const SqlExprPtr& e) {
  if (!e) return false;
  if (e->kind == SqlExprKind::NotExists) return query_has_lateral(*e->sub);
  for (const auto& a : e->args)
    if (expr_has_lateral(a)) return true;
  return false;
}
}  // namespace

bool has_lateral(const SqlQueryPtr& q) { return q && query_has_lateral(*q); }

}  // namespace nrcq
