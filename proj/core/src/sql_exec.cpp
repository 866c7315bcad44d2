#include "nrcq/sql_exec.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace nrcq {

namespace {

using RowEnv = std::map<std::string, KValue>;  // alias -> row record

struct Executor {
  const TableStore& store;
  const Signature& sig;

  KValue table_rows(const std::string& name) {
    auto it = store.find(name);
    if (it == store.end()) throw SqlExecError("unknown table: " + name);
    return it->second;
  }

  KValue eval_expr(const SqlExprPtr& e, const RowEnv& env) {
    switch (e->kind) {
      case SqlExprKind::ColRef: {
        auto it = env.find(e->alias);
        if (it == env.end()) throw SqlExecError("unknown alias: " + e->alias);
        const KValue* f = it->second.field(e->column);
        if (!f)
          throw SqlExecError("unknown column " + e->column + " of alias " + e->alias);
        return *f;
      }
      case SqlExprKind::IntLit:
        return KValue::integer(e->i);
      case SqlExprKind::StringLit:
        return KValue::string(e->s);
      case SqlExprKind::BoolLit:
        return KValue::boolean(e->b);
      case SqlExprKind::NullLit:
        throw SqlExecError("NULL evaluated; emitted only under false guards");
      case SqlExprKind::PrimApp: {
        std::vector<KValue> args;
        for (const auto& a : e->args) args.push_back(eval_expr(a, env));
        const std::string& op = e->op;
        if (op == "==") return KValue::boolean(args[0] == args[1]);
        if (op == "!=") return KValue::boolean(args[0] != args[1]);
        if (op == "&&") return KValue::boolean(args[0].as_bool() && args[1].as_bool());
        if (op == "||") return KValue::boolean(args[0].as_bool() || args[1].as_bool());
        if (op == "!") return KValue::boolean(!args[0].as_bool());
        if (op == "<") return KValue::boolean(args[0].as_int() < args[1].as_int());
        if (op == "<=") return KValue::boolean(args[0].as_int() <= args[1].as_int());
        if (op == ">") return KValue::boolean(args[0].as_int() > args[1].as_int());
        if (op == ">=") return KValue::boolean(args[0].as_int() >= args[1].as_int());
        throw SqlExecError("primitive without executor semantics: " + op);
      }
      case SqlExprKind::NotExists: {
        KValue sub = run(*e->sub, env);
        return KValue::boolean(sub.entries().empty());
      }
    }
    throw SqlExecError("unreachable expression kind");
  }

  KValue run(const SqlQuery& q, const RowEnv& outer) {
    switch (q.kind) {
      case SqlQueryKind::Select: {
        CollectionBuilder out;
        RowEnv env = outer;
        std::function<void(size_t, std::uint64_t)> go = [&](size_t i,
                                                            std::uint64_t mult) {
          if (i == q.from.size()) {
            if (q.where) {
              KValue c = eval_expr(q.where, env);
              if (!c.as_bool()) return;
            }
            KValue row;
            if (q.star) {
              if (q.from.size() != 1)
                throw SqlExecError("SELECT * requires exactly one FROM item");
              row = env.at(q.from[0].alias);
            } else {
              std::vector<std::pair<std::string, KValue>> fields;
              for (const auto& [e, alias] : q.projections)
                fields.emplace_back(alias, eval_expr(e, env));
              row = KValue::record(std::move(fields));
            }
            out.add(row, mult);
            return;
          }
          const FromItem& f = q.from[i];
          KValue rows;
          if (!f.table.empty()) {
            rows = table_rows(f.table);
          } else if (f.lateral) {
            rows = run(*f.sub, env);
          } else {
            rows = run(*f.sub, RowEnv{});  // non-lateral items must be closed
          }
          for (const auto& [row, m] : rows.entries()) {
            env[f.alias] = row;
            go(i + 1, mult * m);
            env.erase(f.alias);
          }
        };
        go(0, 1);
        KValue bag = std::move(out).finish_bag();
        if (!q.distinct) return bag;
        std::vector<KValue::Entry> es;
        for (const auto& [v, m] : bag.entries()) es.emplace_back(v, 1);
        return KValue::bag(std::move(es));
      }
      case SqlQueryKind::Union: {
        KValue l = run(*q.left, outer);
        KValue r = run(*q.right, outer);
        check_compatible(l, r);
        CollectionBuilder out;
        for (const auto& [v, m] : l.entries()) out.add(v, m);
        for (const auto& [v, m] : r.entries()) out.add(v, m);
        KValue bag = std::move(out).finish_bag();
        if (q.union_all) return bag;
        std::vector<KValue::Entry> es;
        for (const auto& [v, m] : bag.entries()) es.emplace_back(v, 1);
        return KValue::bag(std::move(es));
      }
      case SqlQueryKind::ExceptAll: {
        KValue l = run(*q.left, outer);
        KValue r = run(*q.right, outer);
        check_compatible(l, r);
        std::vector<KValue::Entry> es;
        for (const auto& [v, m] : l.entries()) {
          std::uint64_t k = monus(m, r.multiplicity(v));
          if (k) es.emplace_back(v, k);
        }
        return KValue::bag(std::move(es));
      }
    }
    throw SqlExecError("unreachable query kind");
  }

  void check_compatible(const KValue& l, const KValue& r) {
    auto labels = [](const KValue& rows) -> std::optional<std::vector<std::string>> {
      if (rows.entries().empty()) return std::nullopt;
      std::vector<std::string> ls;
      for (const auto& [f, v] : rows.entries()[0].first.fields()) ls.push_back(f);
      return ls;
    };
    auto ll = labels(l), rl = labels(r);
    if (ll && rl && *ll != *rl)
      throw SqlExecError("set operation over incompatible column lists");
  }
};

}  // namespace

KValue exec_sql(const SqlQueryPtr& q, const TableStore& store, const Signature& sig) {
  Executor ex{store, sig};
  return ex.run(*q, RowEnv{});
}

std::vector<std::string> sql_columns(const SqlQueryPtr& q, const Signature& sig) {
  switch (q->kind) {
    case SqlQueryKind::Select: {
      if (q->star) {
        const FromItem& f = q->from.at(0);
        if (!f.table.empty()) {
          const Type* row = sig.table(f.table);
          if (!row) throw SqlExecError("unknown table: " + f.table);
          std::vector<std::string> cols;
          for (const auto& [l, t] : row->fields()) cols.push_back(l);
          return cols;
        }
        return sql_columns(f.sub, sig);
      }
      std::vector<std::string> cols;
      for (const auto& [e, alias] : q->projections) cols.push_back(alias);
      return cols;
    }
    case SqlQueryKind::Union:
    case SqlQueryKind::ExceptAll:
      return sql_columns(q->left, sig);
  }
  return {};
}

}  // namespace nrcq
