#include "nrcq/typecheck.hpp"

#include <sstream>

namespace nrcq {

namespace {

[[noreturn]] void fail(TypeErrorCode code, const std::string& msg) {
  throw TypeError(code, msg);
}

Type base_of(BaseType b) { return Type::base(b); }

struct Checker {
  const Signature& sig;

  Type check(TypeEnv& ctx, const TermPtr& t) {
    switch (t->kind) {
      case TermKind::Var: {
        auto it = ctx.find(t->name);
        if (it == ctx.end())
          fail(TypeErrorCode::UnboundVariable, "unbound variable: " + t->name);
        return it->second;
      }
      case TermKind::TableRef: {
        const Type* row = sig.table(t->name);
        if (!row) fail(TypeErrorCode::UnknownTable, "unknown table: " + t->name);
        return Type::bag(*row);
      }
      case TermKind::PrimApp:
        return check_prim(ctx, t);
      case TermKind::RecordLit: {
        std::vector<std::pair<std::string, Type>> fields;
        for (size_t i = 0; i < t->args.size(); ++i)
          fields.emplace_back(t->labels[i], check(ctx, t->args[i]));
        return Type::record(std::move(fields));
      }
      case TermKind::Project: {
        Type rt = check(ctx, t->args[0]);
        if (!rt.is_record())
          fail(TypeErrorCode::OperandMismatch,
               "projection ." + t->name + " of non-record type " + rt.show());
        const Type* ft = rt.field(t->name);
        if (!ft)
          fail(TypeErrorCode::LabelNotFound,
               "label " + t->name + " not found in " + rt.show());
        return *ft;
      }
      case TermKind::Lam: {
        auto saved = ctx.find(t->name) != ctx.end()
                         ? std::optional<Type>(ctx[t->name])
                         : std::nullopt;
        ctx[t->name] = t->annot;
        Type body = check(ctx, t->args[0]);
        if (saved) ctx[t->name] = *saved; else ctx.erase(t->name);
        return Type::fun(t->annot, body);
      }
      case TermKind::App: {
        Type ft = check(ctx, t->args[0]);
        if (!ft.is_fun())
          fail(TypeErrorCode::OperandMismatch, "application of non-function " + ft.show());
        Type at = check(ctx, t->args[1]);
        if (!(at == ft.fun_arg()))
          fail(TypeErrorCode::OperandMismatch,
               "argument type " + at.show() + " does not match " + ft.fun_arg().show());
        return ft.fun_res();
      }
      case TermKind::EmptySet:
        return Type::set(t->annot);
      case TermKind::EmptyBag:
        return Type::bag(t->annot);
      case TermKind::SetSingleton:
        return Type::set(check(ctx, t->args[0]));
      case TermKind::BagSingleton:
        return Type::bag(check(ctx, t->args[0]));
      case TermKind::SetUnion:
        return check_union(ctx, t, /*set=*/true);
      case TermKind::BagUnion:
        return check_union(ctx, t, /*set=*/false);
      case TermKind::BagDiff: {
        Type a = check(ctx, t->args[0]);
        Type b = check(ctx, t->args[1]);
        if (a.is_graph() || b.is_graph()) {
          if (!a.is_graph() || !b.is_graph() || !(a == b) || !a.graph_out().is_bag())
            fail(TypeErrorCode::OperandMismatch, "graph difference operand mismatch");
          return a;
        }
        if (!a.is_bag() || !b.is_bag() || !(a == b))
          fail(TypeErrorCode::OperandMismatch,
               "bag difference needs equal bag types, got " + a.show() + " and " + b.show());
        if (!is_flat_elem(a.elem()))
          fail(TypeErrorCode::NonFlatArgument,
               "bag difference over non-flat element type " + a.elem().show());
        return a;
      }
      case TermKind::SetComp:
        return check_comp(ctx, t, /*set=*/true);
      case TermKind::BagComp:
        return check_comp(ctx, t, /*set=*/false);
      case TermKind::Dedup: {
        Type a = check(ctx, t->args[0]);
        if (a.is_graph()) {
          if (!a.graph_out().is_bag())
            fail(TypeErrorCode::OperandMismatch, "dedup of a set-valued graph");
          return Type::graph(a.graph_args(), Type::set(a.graph_out().elem()));
        }
        if (!a.is_bag())
          fail(TypeErrorCode::OperandMismatch, "dedup needs a bag, got " + a.show());
        if (!is_flat_elem(a.elem()))
          fail(TypeErrorCode::NonFlatArgument,
               "dedup over non-flat element type " + a.elem().show());
        return Type::set(a.elem());
      }
      case TermKind::Promote: {
        Type a = check(ctx, t->args[0]);
        if (a.is_graph()) {
          if (!a.graph_out().is_set())
            fail(TypeErrorCode::OperandMismatch, "promote of a bag-valued graph");
          return Type::graph(a.graph_args(), Type::bag(a.graph_out().elem()));
        }
        if (!a.is_set())
          fail(TypeErrorCode::OperandMismatch, "promote needs a set, got " + a.show());
        if (!is_flat_elem(a.elem()))
          fail(TypeErrorCode::NonFlatArgument,
               "promote over non-flat element type " + a.elem().show());
        return Type::bag(a.elem());
      }
      case TermKind::WhereSet:
      case TermKind::WhereBag: {
        Type a = check(ctx, t->args[0]);
        Type c = check(ctx, t->args[1]);
        bool want_set = t->kind == TermKind::WhereSet;
        if (want_set ? !a.is_set() : !a.is_bag())
          fail(TypeErrorCode::OperandMismatch,
               std::string(want_set ? "whereset" : "wherebag") +
                   " over wrong collection kind " + a.show());
        if (!c.is_base() || c.base_type() != BaseType::Bool)
          fail(TypeErrorCode::OperandMismatch, "where condition must be Bool");
        return a;
      }
      case TermKind::EmptySetTest: {
        Type a = check(ctx, t->args[0]);
        if (!a.is_set())
          fail(TypeErrorCode::OperandMismatch, "empty-set test of " + a.show());
        return Type::boolean();
      }
      case TermKind::EmptyBagTest: {
        Type a = check(ctx, t->args[0]);
        if (!a.is_bag())
          fail(TypeErrorCode::OperandMismatch, "empty-bag test of " + a.show());
        return Type::boolean();
      }
      case TermKind::GraphAbsSet:
      case TermKind::GraphAbsBag: {
        bool set_kind = t->kind == TermKind::GraphAbsSet;
        std::vector<Type> doms;
        std::map<std::string, std::optional<Type>> saved;
        for (const auto& g : t->gens) {
          Type st = check(ctx, g.source);
          if (!st.is_set())
            fail(TypeErrorCode::OperandMismatch,
                 "graph domain generator must be set-typed, got " + st.show());
          doms.push_back(st.elem());
          if (!saved.count(g.var))
            saved[g.var] = ctx.count(g.var) ? std::optional<Type>(ctx[g.var]) : std::nullopt;
          ctx[g.var] = st.elem();
        }
        Type body = check(ctx, t->args[0]);
        for (auto& [v, old] : saved) {
          if (old) ctx[v] = *old; else ctx.erase(v);
        }
        if (set_kind ? !body.is_set() : !body.is_bag())
          fail(TypeErrorCode::GraphOutputNotCollection,
               "graph body must be a " + std::string(set_kind ? "set" : "bag") +
                   ", got " + body.show());
        return Type::graph(std::move(doms), body);
      }
      case TermKind::GraphApp: {
        Type gt = check(ctx, t->args[0]);
        if (!gt.is_graph())
          fail(TypeErrorCode::OperandMismatch, "graph application of " + gt.show());
        size_t n = t->args.size() - 1;
        if (n != gt.graph_args().size())
          fail(TypeErrorCode::PrimArityMismatch,
               "graph application arity mismatch: expected " +
                   std::to_string(gt.graph_args().size()) + " got " + std::to_string(n));
        for (size_t i = 0; i < n; ++i) {
          Type at = check(ctx, t->args[i + 1]);
          if (!(at == gt.graph_args()[i]))
            fail(TypeErrorCode::OperandMismatch,
                 "graph argument " + std::to_string(i + 1) + " has type " + at.show() +
                     ", expected " + gt.graph_args()[i].show());
        }
        return gt.graph_out();
      }
    }
    fail(TypeErrorCode::OperandMismatch, "unreachable term kind");
  }

  Type check_union(TypeEnv& ctx, const TermPtr& t, bool set) {
    Type a = check(ctx, t->args[0]);
    Type b = check(ctx, t->args[1]);
    if (a.is_graph() && b.is_graph()) {
      if (!(a == b) || (set ? !a.graph_out().is_set() : !a.graph_out().is_bag()))
        fail(TypeErrorCode::OperandMismatch, "graph union operand mismatch");
      return a;
    }
    if ((set ? !a.is_set() : !a.is_bag()) || !(a == b))
      fail(TypeErrorCode::OperandMismatch,
           std::string(set ? "set" : "bag") + " union needs equal types, got " +
               a.show() + " and " + b.show());
    return a;
  }

  Type check_comp(TypeEnv& ctx, const TermPtr& t, bool set) {
    std::vector<std::pair<std::string, std::optional<Type>>> saved;
    for (const auto& g : t->gens) {
      Type st = check(ctx, g.source);
      if (set ? !st.is_set() : !st.is_bag())
        fail(TypeErrorCode::OperandMismatch,
             std::string(set ? "set" : "bag") + " comprehension generator " + g.var +
                 " must be " + (set ? "set" : "bag") + "-typed, got " + st.show());
      saved.emplace_back(g.var,
                         ctx.count(g.var) ? std::optional<Type>(ctx[g.var]) : std::nullopt);
      ctx[g.var] = st.elem();
    }
    Type head = check(ctx, t->args[0]);
    for (auto it = saved.rbegin(); it != saved.rend(); ++it) {
      if (it->second) ctx[it->first] = *it->second; else ctx.erase(it->first);
    }
    if (set ? !head.is_set() : !head.is_bag())
      fail(TypeErrorCode::OperandMismatch,
           std::string(set ? "set" : "bag") + " comprehension head must be a " +
               (set ? "set" : "bag") + ", got " + head.show());
    return head;
  }

  Type check_prim(TypeEnv& ctx, const TermPtr& t) {
    // Literals.
    switch (lit_kind(t->name)) {
      case LitKind::Int:
        if (!t->args.empty())
          fail(TypeErrorCode::PrimArityMismatch, "literal applied to arguments");
        return Type::integer();
      case LitKind::String:
        if (!t->args.empty())
          fail(TypeErrorCode::PrimArityMismatch, "literal applied to arguments");
        return Type::string();
      case LitKind::Bool:
        if (!t->args.empty())
          fail(TypeErrorCode::PrimArityMismatch, "literal applied to arguments");
        return Type::boolean();
      case LitKind::None:
        break;
    }
    // Equality at every base type.
    if (t->name == "==" || t->name == "!=") {
      if (t->args.size() != 2)
        fail(TypeErrorCode::PrimArityMismatch, t->name + " expects 2 arguments");
      Type a = check(ctx, t->args[0]);
      Type b = check(ctx, t->args[1]);
      if (!a.is_base() || !b.is_base() || a.base_type() != b.base_type())
        fail(TypeErrorCode::OperandMismatch,
             t->name + " needs equal base types, got " + a.show() + " and " + b.show());
      return Type::boolean();
    }
    const PrimSig* ps = sig.prim(t->name);
    if (!ps) fail(TypeErrorCode::UnknownPrim, "unknown primitive: " + t->name);
    if (t->args.size() != ps->args.size())
      fail(TypeErrorCode::PrimArityMismatch,
           t->name + " expects " + std::to_string(ps->args.size()) + " arguments, got " +
               std::to_string(t->args.size()));
    for (size_t i = 0; i < t->args.size(); ++i) {
      Type at = check(ctx, t->args[i]);
      if (!at.is_base() || at.base_type() != ps->args[i])
        fail(TypeErrorCode::OperandMismatch,
             t->name + " argument " + std::to_string(i + 1) + " has type " + at.show() +
                 ", expected " + base_of(ps->args[i]).show());
    }
    return base_of(ps->result);
  }
};

}  // namespace

Type typecheck(const TypeEnv& ctx, const TermPtr& term, const Signature& sig) {
  TypeEnv env = ctx;
  Checker c{sig};
  return c.check(env, term);
}

}  // namespace nrcq
