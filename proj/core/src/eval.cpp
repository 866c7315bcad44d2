#include "nrcq/eval.hpp"

#include <functional>

#include "nrcq/typecheck.hpp"

namespace nrcq {

namespace {

std::uint64_t truth(const KValue& v) { return v.as_bool() ? 1 : 0; }

struct Evaluator {
  const TableStore* store;

  KValue run(const TermPtr& t, std::map<std::string, KValue>& rho) {
    switch (t->kind) {
      case TermKind::Var: {
        auto it = rho.find(t->name);
        if (it == rho.end()) throw EvalError("unbound variable at evaluation: " + t->name);
        return it->second;
      }
      case TermKind::TableRef: {
        if (!store) throw EvalError("no table store supplied");
        auto it = store->find(t->name);
        if (it == store->end()) throw EvalError("table missing from store: " + t->name);
        return it->second;
      }
      case TermKind::PrimApp:
        return run_prim(t, rho);
      case TermKind::RecordLit: {
        std::vector<std::pair<std::string, KValue>> fs;
        for (size_t i = 0; i < t->args.size(); ++i)
          fs.emplace_back(t->labels[i], run(t->args[i], rho));
        return KValue::record(std::move(fs));
      }
      case TermKind::Project: {
        KValue r = run(t->args[0], rho);
        const KValue* f = r.field(t->name);
        if (!f) throw EvalError("record has no field " + t->name);
        return *f;
      }
      case TermKind::Lam:
        return KValue::closure(rho, t->name, t->annot, t->args[0]);
      case TermKind::App: {
        KValue f = run(t->args[0], rho);
        KValue a = run(t->args[1], rho);
        if (f.kind() != KValue::Kind::Closure)
          throw EvalError("application of a non-closure value");
        auto env = f.closure_env();
        env[f.closure_var()] = a;
        return run(f.closure_body(), env);
      }
      case TermKind::EmptySet:
        return KValue::set({});
      case TermKind::EmptyBag:
        return KValue::bag({});
      case TermKind::SetSingleton:
        return KValue::set({{run(t->args[0], rho), 1}});
      case TermKind::BagSingleton:
        return KValue::bag({{run(t->args[0], rho), 1}});
      case TermKind::SetUnion: {
        KValue a = run(t->args[0], rho);
        KValue b = run(t->args[1], rho);
        if (a.kind() == KValue::Kind::Graph) return graph_merge(a, b, /*diff=*/false);
        CollectionBuilder cb;
        for (const auto& [v, m] : a.entries()) cb.add(v, m);
        for (const auto& [v, m] : b.entries()) cb.add(v, m);
        return std::move(cb).finish_set();
      }
      case TermKind::BagUnion: {
        KValue a = run(t->args[0], rho);
        KValue b = run(t->args[1], rho);
        if (a.kind() == KValue::Kind::Graph) return graph_merge(a, b, /*diff=*/false);
        CollectionBuilder cb;
        for (const auto& [v, m] : a.entries()) cb.add(v, m);
        for (const auto& [v, m] : b.entries()) cb.add(v, m);
        return std::move(cb).finish_bag();
      }
      case TermKind::BagDiff: {
        KValue a = run(t->args[0], rho);
        KValue b = run(t->args[1], rho);
        if (a.kind() == KValue::Kind::Graph) return graph_merge(a, b, /*diff=*/true);
        std::vector<KValue::Entry> es;
        for (const auto& [v, m] : a.entries()) {
          std::uint64_t r = monus(m, b.multiplicity(v));
          if (r) es.emplace_back(v, r);
        }
        return KValue::bag(std::move(es));
      }
      case TermKind::SetComp:
        return run_comp(t, rho, /*set=*/true);
      case TermKind::BagComp:
        return run_comp(t, rho, /*set=*/false);
      case TermKind::Dedup: {
        KValue a = run(t->args[0], rho);
        if (a.kind() == KValue::Kind::Graph) {
          std::vector<KValue::GraphEntry> es;
          for (const auto& [k, m] : a.graph_entries()) es.emplace_back(k, 1);
          return KValue::graph(true, a.graph_arity(), std::move(es));
        }
        std::vector<KValue::Entry> es;
        for (const auto& [v, m] : a.entries()) es.emplace_back(v, 1);
        return KValue::set(std::move(es));
      }
      case TermKind::Promote: {
        KValue a = run(t->args[0], rho);
        if (a.kind() == KValue::Kind::Graph)
          return KValue::graph(false, a.graph_arity(),
                               {a.graph_entries().begin(), a.graph_entries().end()});
        std::vector<KValue::Entry> es;
        for (const auto& [v, m] : a.entries()) es.emplace_back(v, 1);
        return KValue::bag(std::move(es));
      }
      case TermKind::WhereSet:
      case TermKind::WhereBag: {
        KValue cond = run(t->args[1], rho);
        if (!cond.as_bool())
          return t->kind == TermKind::WhereSet ? KValue::set({}) : KValue::bag({});
        return run(t->args[0], rho);
      }
      case TermKind::EmptySetTest:
      case TermKind::EmptyBagTest: {
        KValue a = run(t->args[0], rho);
        return KValue::boolean(a.entries().empty());
      }
      case TermKind::GraphAbsSet:
      case TermKind::GraphAbsBag: {
        bool set_kind = t->kind == TermKind::GraphAbsSet;
        std::vector<KValue::GraphEntry> entries;
        std::vector<KValue> tuple;
        enumerate_domain(t->gens, 0, rho, tuple, [&](std::map<std::string, KValue>& r) {
          KValue out = run(t->args[0], r);
          for (const auto& [v, m] : out.entries())
            entries.emplace_back(std::make_pair(tuple, v), m);
        });
        return KValue::graph(set_kind, t->gens.size(), std::move(entries));
      }
      case TermKind::GraphApp: {
        KValue g = run(t->args[0], rho);
        if (g.kind() != KValue::Kind::Graph)
          throw EvalError("graph application of a non-graph value");
        if (g.graph_arity() != t->args.size() - 1)
          throw EvalError("graph application arity mismatch");
        std::vector<KValue> args;
        for (size_t i = 1; i < t->args.size(); ++i) args.push_back(run(t->args[i], rho));
        CollectionBuilder cb;
        for (const auto& [k, m] : g.graph_entries())
          if (k.first == args) cb.add(k.second, m);
        return g.graph_set_kind() ? std::move(cb).finish_set() : std::move(cb).finish_bag();
      }
    }
    throw EvalError("unreachable term kind");
  }

  KValue graph_merge(const KValue& a, const KValue& b, bool diff) {
    if (b.kind() != KValue::Kind::Graph) throw EvalError("graph merged with non-graph");
    std::map<std::pair<std::vector<KValue>, KValue>, std::uint64_t> acc;
    for (const auto& [k, m] : a.graph_entries()) acc[k] += m;
    std::vector<KValue::GraphEntry> es;
    if (diff) {
      for (const auto& [k, m] : b.graph_entries()) {
        auto it = acc.find(k);
        if (it != acc.end()) it->second = monus(it->second, m);
      }
    } else {
      for (const auto& [k, m] : b.graph_entries()) acc[k] += m;
    }
    for (auto& [k, m] : acc)
      if (m) es.emplace_back(k, m);
    return KValue::graph(a.graph_set_kind(), a.graph_arity(), std::move(es));
  }

  /// Enumerates the telescopic domain of a graph abstraction: each tuple of
  /// elements drawn from the (set-typed) generator sources, binding as it goes.
  void enumerate_domain(const GeneratorList& gens, size_t i,
                        std::map<std::string, KValue>& rho, std::vector<KValue>& tuple,
                        const std::function<void(std::map<std::string, KValue>&)>& k) {
    if (i == gens.size()) {
      k(rho);
      return;
    }
    KValue src = run(gens[i].source, rho);
    for (const auto& [v, m] : src.entries()) {
      auto saved = rho.find(gens[i].var) != rho.end()
                       ? std::optional<KValue>(rho[gens[i].var])
                       : std::nullopt;
      rho[gens[i].var] = v;
      tuple.push_back(v);
      enumerate_domain(gens, i + 1, rho, tuple, k);
      tuple.pop_back();
      if (saved) rho[gens[i].var] = *saved; else rho.erase(gens[i].var);
    }
  }

  KValue run_comp(const TermPtr& t, std::map<std::string, KValue>& rho, bool set) {
    CollectionBuilder cb;
    std::function<void(size_t, std::uint64_t)> go = [&](size_t i, std::uint64_t mult) {
      if (i == t->gens.size()) {
        KValue head = run(t->args[0], rho);
        for (const auto& [v, m] : head.entries()) cb.add(v, set ? 1 : mult * m);
        return;
      }
      KValue src = run(t->gens[i].source, rho);
      for (const auto& [v, m] : src.entries()) {
        auto saved = rho.find(t->gens[i].var) != rho.end()
                         ? std::optional<KValue>(rho[t->gens[i].var])
                         : std::nullopt;
        rho[t->gens[i].var] = v;
        go(i + 1, mult * m);
        if (saved) rho[t->gens[i].var] = *saved; else rho.erase(t->gens[i].var);
      }
    };
    go(0, 1);
    return set ? std::move(cb).finish_set() : std::move(cb).finish_bag();
  }

  /// Membership built as !empty({x | x <- N, x == M}) evaluates through the
  /// definable form; this shortcut computes the same multiplicity test
  /// directly when the pattern is syntactically recognizable.
  bool try_membership(const TermPtr& t, std::map<std::string, KValue>& rho, KValue* out) {
    if (t->name != "!" || t->args.size() != 1) return false;
    const TermPtr& et = t->args[0];
    if (et->kind != TermKind::EmptySetTest) return false;
    const TermPtr& comp = et->args[0];
    if (comp->kind != TermKind::SetComp || comp->gens.size() != 1) return false;
    const TermPtr& head = comp->args[0];
    if (head->kind != TermKind::WhereSet) return false;
    if (head->args[0]->kind != TermKind::SetSingleton) return false;
    if (head->args[0]->args[0]->kind != TermKind::Var ||
        head->args[0]->args[0]->name != comp->gens[0].var)
      return false;
    // Guard must be an equality chain that does not rebind the element var in
    // its right-hand sides; evaluating it under each binding is exact anyway,
    // so only use the shortcut for the single base-equality shape.
    const TermPtr& guard = head->args[1];
    if (guard->kind != TermKind::PrimApp || guard->name != "==" ||
        guard->args.size() != 2)
      return false;
    if (guard->args[0]->kind != TermKind::Var ||
        guard->args[0]->name != comp->gens[0].var)
      return false;
    if (free_vars(guard->args[1]).count(comp->gens[0].var)) return false;
    KValue coll = run(comp->gens[0].source, rho);
    KValue elem = run(guard->args[1], rho);
    *out = KValue::boolean(coll.multiplicity(elem) > 0);
    return true;
  }

  KValue run_prim(const TermPtr& t, std::map<std::string, KValue>& rho) {
    switch (lit_kind(t->name)) {
      case LitKind::Int: return KValue::integer(lit_int(t->name));
      case LitKind::Bool: return KValue::boolean(t->name == "true");
      case LitKind::String: return KValue::string(lit_string(t->name));
      case LitKind::None: break;
    }
    {
      KValue shortcut;
      if (try_membership(t, rho, &shortcut)) return shortcut;
    }
    std::vector<KValue> args;
    args.reserve(t->args.size());
    for (const auto& a : t->args) args.push_back(run(a, rho));
    const std::string& n = t->name;
    if (n == "==") return KValue::boolean(args[0] == args[1]);
    if (n == "!=") return KValue::boolean(args[0] != args[1]);
    if (n == "&&") return KValue::boolean(args[0].as_bool() && args[1].as_bool());
    if (n == "||") return KValue::boolean(args[0].as_bool() || args[1].as_bool());
    if (n == "!") return KValue::boolean(!args[0].as_bool());
    if (n == "<") return KValue::boolean(args[0].as_int() < args[1].as_int());
    if (n == "<=") return KValue::boolean(args[0].as_int() <= args[1].as_int());
    if (n == ">") return KValue::boolean(args[0].as_int() > args[1].as_int());
    if (n == ">=") return KValue::boolean(args[0].as_int() >= args[1].as_int());
    throw EvalError("primitive has no evaluation semantics: " + n);
  }
};

}  // namespace

KValue eval(const TermPtr& term, const Env& env) {
  Evaluator ev{env.store};
  auto rho = env.vars;
  return ev.run(term, rho);
}

bool models(const Env& env, const GeneratorList& gens) {
  for (const auto& g : gens) {
    auto it = env.vars.find(g.var);
    if (it == env.vars.end())
      throw EvalError("unassigned generator variable: " + g.var);
    KValue src = eval(g.source, env);
    if (src.multiplicity(it->second) == 0) return false;
  }
  return true;
}

bool equiv(const TermPtr& t1, const TermPtr& t2, const Env& env, const Signature& sig,
           const TypeEnv& ctx) {
  Type a = typecheck(ctx, t1, sig);
  Type b = typecheck(ctx, t2, sig);
  if (!(a == b))
    throw TypeError(TypeErrorCode::OperandMismatch,
                    "equiv over distinct types " + a.show() + " and " + b.show());
  return eval(t1, env) == eval(t2, env);
}

}  // namespace nrcq
