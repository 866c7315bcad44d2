#include "nrcq/to_sql.hpp"

#include <map>
#include <optional>
#include <set>

#include "nrcq/typecheck.hpp"

namespace nrcq {

namespace {

constexpr const char* kValueColumn = "value";

struct Scope {
  std::map<std::string, std::pair<std::string, Type>> vars;  // binder -> (alias, elem type)
  std::set<std::string> aliases;

  std::string pick_alias(const std::string& want) {
    std::string a = want;
    int k = 2;
    while (aliases.count(a)) a = want + "_" + std::to_string(k++);
    aliases.insert(a);
    return a;
  }
};

struct Translator {
  const Signature& sig;

  [[noreturn]] void fail(const std::string& msg, const TermPtr& t) {
    throw ToSqlError(msg + ": " + show(t));
  }

  Type elem_type_of(const TermPtr& t, const Scope& sc) {
    TypeEnv ctx;
    for (const auto& [v, at] : sc.vars) ctx[v] = at.second;
    Type ty = typecheck(ctx, t, sig);
    if (!ty.is_collection()) fail("expected a collection", t);
    return ty.elem();
  }

  std::vector<std::string> elem_columns(const Type& elem) {
    if (elem.is_base()) return {kValueColumn};
    if (is_flat_record(elem)) {
      std::vector<std::string> cols;
      for (const auto& [l, ft] : elem.fields()) cols.push_back(l);
      return cols;
    }
    throw ToSqlError("non-flat element type in SQL translation: " + elem.show());
  }

  bool is_lateral(const TermPtr& src, const Scope& sc) {
    for (const auto& v : free_vars(src))
      if (sc.vars.count(v)) return true;
    return false;
  }

  SqlExprPtr expr(const TermPtr& t, const Scope& sc) {
    switch (t->kind) {
      case TermKind::Var: {
        auto it = sc.vars.find(t->name);
        if (it == sc.vars.end()) fail("variable out of scope in SQL expression", t);
        if (!it->second.second.is_base())
          fail("record variable in a scalar position", t);
        return sqlast::col(it->second.first, kValueColumn);
      }
      case TermKind::Project: {
        if (t->args[0]->kind != TermKind::Var)
          fail("projection base must be a generator variable", t);
        auto it = sc.vars.find(t->args[0]->name);
        if (it == sc.vars.end()) fail("variable out of scope in SQL expression", t);
        return sqlast::col(it->second.first, t->name);
      }
      case TermKind::PrimApp: {
        switch (lit_kind(t->name)) {
          case LitKind::Int: return sqlast::int_lit(lit_int(t->name));
          case LitKind::Bool: return sqlast::bool_lit(t->name == "true");
          case LitKind::String: return sqlast::string_lit(lit_string(t->name));
          case LitKind::None: break;
        }
        std::vector<SqlExprPtr> args;
        for (const auto& a : t->args) args.push_back(expr(a, sc));
        return sqlast::prim(t->name, std::move(args));
      }
      case TermKind::EmptySetTest:
      case TermKind::EmptyBagTest:
        return sqlast::not_exists(query(t->args[0], sc, nullptr));
      default:
        fail("term outside the SQL expression grammar", t);
    }
  }

  /// Projections for a comprehension head element, optionally reordered to
  /// match the column order of an earlier union branch.
  std::vector<std::pair<SqlExprPtr, std::string>> head_projections(
      const TermPtr& m, const Scope& sc, const std::vector<std::string>* order) {
    std::vector<std::pair<SqlExprPtr, std::string>> cols;
    if (m->kind == TermKind::RecordLit) {
      for (size_t i = 0; i < m->args.size(); ++i)
        cols.emplace_back(expr(m->args[i], sc), m->labels[i]);
    } else if (m->kind == TermKind::Var) {
      auto it = sc.vars.find(m->name);
      if (it == sc.vars.end()) fail("variable out of scope in SQL head", m);
      const Type& et = it->second.second;
      if (et.is_base()) {
        cols.emplace_back(sqlast::col(it->second.first, kValueColumn), kValueColumn);
      } else {
        for (const auto& [l, ft] : et.fields())
          cols.emplace_back(sqlast::col(it->second.first, l), l);
      }
    } else {
      cols.emplace_back(expr(m, sc), kValueColumn);
    }
    if (order) {
      std::vector<std::pair<SqlExprPtr, std::string>> reordered;
      for (const auto& want : *order) {
        bool found = false;
        for (auto& c : cols)
          if (c.second == want) {
            reordered.push_back(c);
            found = true;
            break;
          }
        if (!found) throw ToSqlError("union branches have incompatible columns");
      }
      if (reordered.size() != cols.size())
        throw ToSqlError("union branches have incompatible columns");
      cols = std::move(reordered);
    }
    return cols;
  }

  SqlQueryPtr null_select(const Type& elem, const std::vector<std::string>* order) {
    std::vector<std::string> cols = order ? *order : elem_columns(elem);
    std::vector<std::pair<SqlExprPtr, std::string>> projections;
    for (const auto& c : cols) projections.emplace_back(sqlast::null_lit(), c);
    return sqlast::select(false, std::move(projections), {}, sqlast::bool_lit(false));
  }

  FromItem generator_item(const Generator& g, Scope& sc) {
    bool lateral = is_lateral(g.source, sc);
    const TermPtr& src = g.source;
    std::string alias = sc.pick_alias(g.var);
    if (src->kind == TermKind::TableRef)
      return {lateral, src->name, nullptr, alias};
    if (src->kind == TermKind::Dedup && src->args[0]->kind == TermKind::TableRef) {
      Scope inner = sc;
      std::string ta = inner.pick_alias(src->args[0]->name);
      SqlQueryPtr sub = sqlast::select_star(
          true, {{false, src->args[0]->name, nullptr, ta}}, nullptr);
      return {lateral, "", sub, alias};
    }
    if (src->kind == TermKind::Dedup && src->args[0]->kind == TermKind::BagDiff) {
      SqlQueryPtr l = query(src->args[0]->args[0], sc, nullptr);
      std::vector<std::string> order = columns_of(l);
      SqlQueryPtr r = query(src->args[0]->args[1], sc, &order);
      Scope inner = sc;
      std::string ra = inner.pick_alias("r");
      SqlQueryPtr sub = sqlast::select_star(
          true, {{false, "", sqlast::except_all(l, r), ra}}, nullptr);
      return {lateral, "", sub, alias};
    }
    if (src->kind == TermKind::Promote)
      return {lateral, "", query(src->args[0], sc, nullptr), alias};
    if (src->kind == TermKind::BagDiff) {
      SqlQueryPtr l = query(src->args[0], sc, nullptr);
      std::vector<std::string> order = columns_of(l);
      SqlQueryPtr r = query(src->args[1], sc, &order);
      return {lateral, "", sqlast::except_all(l, r), alias};
    }
    fail("generator outside the SQL-translatable grammar", src);
  }

  std::vector<std::string> columns_of(const SqlQueryPtr& q) {
    switch (q->kind) {
      case SqlQueryKind::Select: {
        if (q->star) {
          const FromItem& f = q->from.at(0);
          if (!f.table.empty()) {
            const Type* row = sig.table(f.table);
            std::vector<std::string> cols;
            for (const auto& [l, t] : row->fields()) cols.push_back(l);
            return cols;
          }
          return columns_of(f.sub);
        }
        std::vector<std::string> cols;
        for (const auto& [e, a] : q->projections) cols.push_back(a);
        return cols;
      }
      default:
        return columns_of(q->left);
    }
  }

  SqlQueryPtr comp_select(const TermPtr& t, Scope sc, bool set_kind,
                          const std::vector<std::string>* order) {
    std::vector<FromItem> from;
    for (const auto& g : t->gens) {
      FromItem item = generator_item(g, sc);
      Type et = elem_type_of(g.source, sc);
      sc.vars[g.var] = {item.alias, et};
      from.push_back(std::move(item));
    }
    TermPtr head = t->args[0];
    SqlExprPtr where;
    TermKind wk = set_kind ? TermKind::WhereSet : TermKind::WhereBag;
    if (head->kind == wk) {
      if (!is_true_lit(head->args[1])) where = expr(head->args[1], sc);
      head = head->args[0];
    }
    TermKind singleton = set_kind ? TermKind::SetSingleton : TermKind::BagSingleton;
    if (head->kind != singleton) fail("comprehension head must be a singleton", head);
    auto projections = head_projections(head->args[0], sc, order);
    return sqlast::select(set_kind, std::move(projections), std::move(from), where);
  }

  SqlQueryPtr singleton_select(const TermPtr& t, const Scope& sc, bool set_kind,
                               const std::vector<std::string>* order) {
    auto projections = head_projections(t->args[0], sc, order);
    return sqlast::select(set_kind, std::move(projections), {}, nullptr);
  }

  SqlQueryPtr query(const TermPtr& t, const Scope& sc, const std::vector<std::string>* order) {
    switch (t->kind) {
      case TermKind::EmptySet:
      case TermKind::EmptyBag:
        return null_select(t->annot, order);
      case TermKind::SetUnion:
      case TermKind::BagUnion: {
        SqlQueryPtr l = query(t->args[0], sc, order);
        std::vector<std::string> lorder = columns_of(l);
        SqlQueryPtr r = query(t->args[1], sc, &lorder);
        return sqlast::union_(t->kind == TermKind::BagUnion, l, r);
      }
      case TermKind::BagDiff: {
        SqlQueryPtr l = query(t->args[0], sc, order);
        std::vector<std::string> lorder = columns_of(l);
        SqlQueryPtr r = query(t->args[1], sc, &lorder);
        return sqlast::except_all(l, r);
      }
      case TermKind::TableRef: {
        Scope inner = sc;
        std::string a = inner.pick_alias(t->name);
        return sqlast::select_star(false, {{false, t->name, nullptr, a}}, nullptr);
      }
      case TermKind::Dedup: {
        if (t->args[0]->kind == TermKind::TableRef) {
          Scope inner = sc;
          std::string a = inner.pick_alias(t->args[0]->name);
          return sqlast::select_star(true, {{false, t->args[0]->name, nullptr, a}},
                                     nullptr);
        }
        if (t->args[0]->kind == TermKind::BagDiff) {
          SqlQueryPtr l = query(t->args[0]->args[0], sc, order);
          std::vector<std::string> lorder = columns_of(l);
          SqlQueryPtr r = query(t->args[0]->args[1], sc, &lorder);
          Scope inner = sc;
          std::string a = inner.pick_alias("r");
          return sqlast::select_star(true, {{false, "", sqlast::except_all(l, r), a}},
                                     nullptr);
        }
        fail("dedup argument outside the SQL-translatable grammar", t);
      }
      case TermKind::Promote:
        return query(t->args[0], sc, order);
      case TermKind::SetSingleton:
        return singleton_select(t, sc, true, order);
      case TermKind::BagSingleton:
        return singleton_select(t, sc, false, order);
      case TermKind::SetComp:
        return comp_select(t, sc, true, order);
      case TermKind::BagComp:
        return comp_select(t, sc, false, order);
      default:
        fail("term outside the SQL-translatable normal forms", t);
    }
  }
};

}  // namespace

SqlTranslation to_sql(const TermPtr& term, const Signature& sig) {
  Translator tr{sig};
  Type ty = typecheck(term, sig);
  if (!ty.is_collection() || !is_flat_elem(ty.elem()))
    throw ToSqlError("SQL translation needs a flat collection query, got " + ty.show());
  Scope sc;
  SqlQueryPtr q = tr.query(term, sc, nullptr);
  return {q, ty.elem(), ty.is_set()};
}

KValue sql_result_value(const KValue& rows, const SqlTranslation& t) {
  CollectionBuilder cb;
  for (const auto& [row, m] : rows.entries()) {
    KValue v = row;
    if (t.elem_type.is_base()) {
      const KValue* f = row.field(kValueColumn);
      if (!f) throw ToSqlError("missing value column in SQL result row");
      v = *f;
    }
    cb.add(v, m);
  }
  return t.set_typed ? std::move(cb).finish_set() : std::move(cb).finish_bag();
}

}  // namespace nrcq
