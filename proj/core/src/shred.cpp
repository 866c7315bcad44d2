#include "nrcq/shred.hpp"

#include <algorithm>

#include "nrcq/delateralize.hpp"
#include "nrcq/flatten_records.hpp"
#include "nrcq/normalize.hpp"
#include "nrcq/sql_exec.hpp"
#include "nrcq/to_sql.hpp"

namespace nrcq {

const TermPtr* ShreddingEnv::lookup(const std::string& var) const {
  for (const auto& e : entries_)
    if (e.var == var) return &e.graph;
  return nullptr;
}

void ShreddingEnv::append(std::string var, TermPtr graph) {
  if (contains(var)) throw ShredError("graph variable already bound: " + var);
  entries_.push_back({std::move(var), std::move(graph)});
}

void ShreddingEnv::remove(const std::vector<std::string>& vars) {
  entries_.erase(std::remove_if(entries_.begin(), entries_.end(),
                                [&](const Entry& e) {
                                  return std::find(vars.begin(), vars.end(), e.var) !=
                                         vars.end();
                                }),
                 entries_.end());
}

std::string GraphVarSupply::next() {
  for (;;) {
    std::string name = "phi" + std::to_string(++n_);
    if (!avoid_.count(name)) return name;
  }
}

namespace {

/// Collects the branches of a (possibly nested) union of one collection kind.
void union_branches(const TermPtr& t, TermKind union_kind, TermKind empty_kind,
                    std::vector<TermPtr>& out) {
  if (t->kind == union_kind) {
    union_branches(t->args[0], union_kind, empty_kind, out);
    union_branches(t->args[1], union_kind, empty_kind, out);
    return;
  }
  if (t->kind == empty_kind) return;  // zero-branch spelling
  out.push_back(t);
}

struct Shredder {
  const Signature& sig;
  GraphVarSupply& phis;
  FreshSupply fresh;
  ShreddingEnv env;

  TermPtr apply_to_dom(const std::string& phi, const GeneratorList& gens) {
    std::vector<TermPtr> args;
    for (const auto& g : gens) args.push_back(mk::var(g.var));
    return mk::graph_app(mk::var(phi), std::move(args));
  }

  /// Set-converted telescope extension for a bag comprehension generator:
  /// promote arguments pass through, everything else is deduplicated.
  TermPtr set_convert(const TermPtr& g) {
    if (g->kind == TermKind::Promote) return g->args[0];
    return mk::dedup(g);
  }

  TermPtr shred_term(const GeneratorList& theta, const TermPtr& t, TypeEnv& ctx) {
    Type ty = typecheck(ctx, t, sig);
    if (ty.is_base()) return t;  // base terms shred to themselves
    if (ty.is_record()) {
      if (t->kind == TermKind::Var) return t;  // flat record variable
      if (t->kind != TermKind::RecordLit)
        throw ShredError("record-typed normal form expected, got: " + show(t));
      std::vector<std::pair<std::string, TermPtr>> fields;
      for (size_t i = 0; i < t->args.size(); ++i)
        fields.emplace_back(t->labels[i], shred_term(theta, t->args[i], ctx));
      return mk::record(std::move(fields));
    }
    if (!ty.is_collection())
      throw ShredError("shredding a non-relational type: " + ty.show());
    return shred_collection(theta, t, ty, ctx);
  }

  TermPtr shred_collection(const GeneratorList& theta, const TermPtr& t, const Type& ty,
                           TypeEnv& ctx) {
    bool set_kind = ty.is_set();
    std::string phi = phis.next();
    TermKind union_kind = set_kind ? TermKind::SetUnion : TermKind::BagUnion;
    TermKind empty_kind = set_kind ? TermKind::EmptySet : TermKind::EmptyBag;
    std::vector<TermPtr> branches;
    union_branches(t, union_kind, empty_kind, branches);

    if (branches.empty()) {
      TermPtr body = set_kind ? mk::empty_set(ty.elem()) : mk::empty_bag(ty.elem());
      env.append(phi, make_graph(set_kind, theta, body));
      return apply_to_dom(phi, theta);
    }
    if (branches.size() == 1) {
      env.append(phi, branch_graph(theta, branches[0], set_kind, ty, ctx));
      return apply_to_dom(phi, theta);
    }
    // Union rule: shred each branch, absorb the child graphs into one.
    std::vector<std::string> children;
    for (const auto& b : branches) {
      TermPtr shredded = shred_collection(theta, b, ty, ctx);
      if (shredded->kind != TermKind::GraphApp ||
          shredded->args[0]->kind != TermKind::Var)
        throw ShredError("union branch did not shred to a graph application");
      children.push_back(shredded->args[0]->name);
    }
    TermPtr merged;
    for (const auto& c : children) {
      const TermPtr* g = env.lookup(c);
      if (!g) throw ShredError("missing child graph " + c);
      merged = merged ? (set_kind ? mk::set_union(merged, *g) : mk::bag_union(merged, *g))
                      : *g;
    }
    env.remove(children);
    env.append(phi, merged);
    return apply_to_dom(phi, theta);
  }

  TermPtr make_graph(bool set_kind, const GeneratorList& theta, TermPtr body) {
    return set_kind ? mk::graph_abs_set(theta, std::move(body))
                    : mk::graph_abs_bag(theta, std::move(body));
  }

  /// Lifts one union branch (comprehension, singleton, or a bare generator
  /// form read as its trivial comprehension) into a graph over `theta`.
  TermPtr branch_graph(const GeneratorList& theta, const TermPtr& b, bool set_kind,
                       const Type& ty, TypeEnv& ctx) {
    TermKind comp_kind = set_kind ? TermKind::SetComp : TermKind::BagComp;
    TermKind singleton_kind = set_kind ? TermKind::SetSingleton : TermKind::BagSingleton;

    if (b->kind == singleton_kind) {
      TermPtr elem = shred_term(theta, b->args[0], ctx);
      TermPtr head = set_kind ? mk::set_singleton(elem) : mk::bag_singleton(elem);
      return make_graph(set_kind, theta, head);
    }
    if (b->kind == comp_kind) {
      // Extend the set-typed telescope, shred the head element, and keep the
      // original generators in the graph body.
      GeneratorList extended = theta;
      TypeEnv inner = ctx;
      for (const auto& g : b->gens) {
        TermPtr conv = set_kind ? g.source : set_convert(g.source);
        extended.push_back({g.var, conv});
        inner[g.var] = typecheck(inner, g.source, sig).elem();
      }
      TermPtr head = b->args[0];
      TermPtr guard;
      TermKind wk = set_kind ? TermKind::WhereSet : TermKind::WhereBag;
      if (head->kind == wk) {
        guard = head->args[1];
        head = head->args[0];
      }
      if (head->kind != singleton_kind)
        throw ShredError("comprehension head is not a singleton: " + show(head));
      TermPtr elem = shred_term(extended, head->args[0], inner);
      TermPtr new_head = set_kind ? mk::set_singleton(elem) : mk::bag_singleton(elem);
      if (guard)
        new_head = set_kind ? mk::where_set(new_head, guard) : mk::where_bag(new_head, guard);
      TermPtr body = set_kind ? mk::set_comp(new_head, b->gens)
                              : mk::bag_comp(new_head, b->gens);
      return make_graph(set_kind, theta, body);
    }
    // Bare generator forms (tables, dedup'd tables/differences, promotions)
    // are trivial comprehensions over themselves; their element is flat, so
    // no recursion is needed.
    std::string z = fresh.fresh("z");
    TermPtr head = set_kind ? mk::set_singleton(mk::var(z)) : mk::bag_singleton(mk::var(z));
    TermPtr body = set_kind ? mk::set_comp(head, {{z, b}}) : mk::bag_comp(head, {{z, b}});
    return make_graph(set_kind, theta, body);
  }
};

}  // namespace

ShredResult shred(const ShreddingEnv& env_in, const GeneratorList& gens,
                  const TermPtr& term, const Signature& sig, GraphVarSupply& phis) {
  Shredder sh{sig, phis};
  sh.env = env_in;
  TypeEnv ctx;
  for (const auto& [v, g] : typecheck_env(env_in, sig)) ctx[v] = g;
  for (const auto& g : gens) {
    Type st = typecheck(ctx, g.source, sig);
    if (!st.is_set())
      throw ShredError("shredding telescope must be set-typed at " + g.var);
    ctx[g.var] = st.elem();
  }
  TermPtr shredded = sh.shred_term(gens, term, ctx);
  return {shredded, std::move(sh.env)};
}

TypeEnv typecheck_env(const ShreddingEnv& env, const Signature& sig) {
  TypeEnv ctx;
  for (const auto& e : env.entries()) {
    if (ctx.count(e.var)) throw ShredError("duplicate graph variable " + e.var);
    Type t = typecheck(ctx, e.graph, sig);
    if (!t.is_graph())
      throw ShredError("environment entry " + e.var + " is not graph-typed: " + t.show());
    ctx[e.var] = t;
  }
  return ctx;
}

namespace {

struct Flattener {
  const Signature& sig;

  TermPtr pair_record(const GeneratorList& gens, const TermPtr& out) {
    std::vector<std::pair<std::string, TermPtr>> fields;
    for (size_t i = 0; i < gens.size(); ++i)
      fields.emplace_back(graph_in_label(i, gens.size()), mk::var(gens[i].var));
    fields.emplace_back("out", out);
    return mk::record(std::move(fields));
  }

  TermPtr index_record(const std::string& phi, const std::vector<TermPtr>& args) {
    std::vector<std::pair<std::string, TermPtr>> key;
    for (size_t i = 0; i < args.size(); ++i)
      key.emplace_back(std::to_string(i + 1), args[i]);
    return mk::record({{"tag", mk::string_lit(phi)}, {"key", mk::record(std::move(key))}});
  }

  TermPtr flatten(const TermPtr& t) {
    switch (t->kind) {
      case TermKind::GraphApp: {
        if (t->args[0]->kind != TermKind::Var)
          throw ShredError("flattening expects applications of graph variables");
        std::vector<TermPtr> args(t->args.begin() + 1, t->args.end());
        return index_record(t->args[0]->name, args);
      }
      case TermKind::GraphAbsSet: {
        GeneratorList gens = t->gens;
        std::string y = "y_out";
        TermPtr body = flatten(t->args[0]);
        TermPtr pair = pair_record(gens, mk::var(y));
        gens.push_back({y, body});
        return mk::set_comp(mk::set_singleton(pair), std::move(gens));
      }
      case TermKind::GraphAbsBag: {
        GeneratorList gens = t->gens;
        for (auto& g : gens) g.source = mk::promote(g.source);
        std::string y = "y_out";
        TermPtr body = flatten(t->args[0]);
        TermPtr pair = pair_record(gens, mk::var(y));
        gens.push_back({y, body});
        return mk::bag_comp(mk::bag_singleton(pair), std::move(gens));
      }
      case TermKind::SetUnion:
        return mk::set_union(flatten(t->args[0]), flatten(t->args[1]));
      case TermKind::BagUnion:
        return mk::bag_union(flatten(t->args[0]), flatten(t->args[1]));
      case TermKind::SetComp:
      case TermKind::BagComp: {
        // Generators are flat; only the head element is rewritten.
        TermPtr head = t->args[0];
        TermPtr guard;
        TermKind wk = t->kind == TermKind::SetComp ? TermKind::WhereSet : TermKind::WhereBag;
        if (head->kind == wk) {
          guard = head->args[1];
          head = head->args[0];
        }
        TermKind sk = t->kind == TermKind::SetComp ? TermKind::SetSingleton
                                                   : TermKind::BagSingleton;
        if (head->kind != sk)
          throw ShredError("flattening a comprehension without a singleton head");
        TermPtr elem = flatten(head->args[0]);
        TermPtr new_head =
            t->kind == TermKind::SetComp ? mk::set_singleton(elem) : mk::bag_singleton(elem);
        if (guard)
          new_head = t->kind == TermKind::SetComp ? mk::where_set(new_head, guard)
                                                  : mk::where_bag(new_head, guard);
        return t->kind == TermKind::SetComp ? mk::set_comp(new_head, t->gens)
                                            : mk::bag_comp(new_head, t->gens);
      }
      case TermKind::SetSingleton:
        return mk::set_singleton(flatten(t->args[0]));
      case TermKind::BagSingleton:
        return mk::bag_singleton(flatten(t->args[0]));
      case TermKind::RecordLit: {
        std::vector<std::pair<std::string, TermPtr>> fields;
        for (size_t i = 0; i < t->args.size(); ++i)
          fields.emplace_back(t->labels[i], flatten(t->args[i]));
        return mk::record(std::move(fields));
      }
      case TermKind::EmptySet:
      case TermKind::EmptyBag:
        return t;
      case TermKind::Var:
      case TermKind::TableRef:
      case TermKind::Project:
      case TermKind::PrimApp:
      case TermKind::EmptySetTest:
      case TermKind::EmptyBagTest:
        return t;  // base / flat forms are embeddable as they stand
      default:
        throw ShredError("term shape outside the flattening domain: " + show(t));
    }
  }
};

}  // namespace

TermPtr flatten_shredded(const TermPtr& term, const Signature& sig) {
  Flattener fl{sig};
  return fl.flatten(term);
}

std::optional<IndexValue> parse_index(const KValue& v) {
  if (v.kind() != KValue::Kind::Record) return std::nullopt;
  const KValue* tag = v.field("tag");
  const KValue* key = v.field("key");
  if (!tag || !key || v.fields().size() != 2) return std::nullopt;
  if (tag->kind() != KValue::Kind::Base ||
      tag->base_kind() != KValue::BaseKind::String)
    return std::nullopt;
  return IndexValue{tag->as_string(), *key};
}

ShreddedValueSet build_value_set(const ShreddingEnv& env, const TableStore& store,
                                 const Signature& sig, FreshSupply& fresh,
                                 ExecEngine engine) {
  TypeEnv types = typecheck_env(env, sig);
  ShreddedValueSet xi;
  for (const auto& entry : env.entries()) {
    const Type& gt = types.at(entry.var);
    bool set_kind = gt.graph_out().is_set();
    size_t arity = gt.graph_args().size();

    TermPtr flat = flatten_shredded(entry.graph, sig);
    auto [flat_term, desc] = flatten_records(flat, sig, fresh);
    TermPtr norm = normalize(flat_term, sig, fresh);
    TermPtr delat = delateralize(norm, sig, fresh);
    KValue rows;
    if (engine == ExecEngine::Eval) {
      rows = eval(delat, Env{{}, &store});
    } else {
      SqlTranslation tr = to_sql(delat, sig);
      rows = sql_result_value(exec_sql(tr.query, store, sig), tr);
    }
    KValue nested = desc.unflatten(rows, set_kind);

    // Repackage flattened pairs as (key tuple, out) records.
    std::vector<KValue::Entry> pairs;
    for (const auto& [row, m] : nested.entries()) {
      std::vector<std::pair<std::string, KValue>> key;
      for (size_t i = 0; i < arity; ++i) {
        const KValue* in = row.field(graph_in_label(i, arity));
        if (!in) throw ShredError("pair row misses an input column");
        key.emplace_back(std::to_string(i + 1), *in);
      }
      const KValue* out = row.field("out");
      if (!out) throw ShredError("pair row misses the output column");
      pairs.emplace_back(KValue::record({{"key", KValue::record(std::move(key))},
                                         {"out", *out}}),
                         m);
    }
    xi.graphs[entry.var] =
        set_kind ? KValue::set(std::move(pairs)) : KValue::bag(std::move(pairs));
  }
  return xi;
}

KValue stitch_value(const ShreddedValueSet& xi, const KValue& v, const Type& ty) {
  if (ty.is_base()) return v;
  if (ty.is_record()) {
    std::vector<std::pair<std::string, KValue>> fields;
    for (const auto& [l, ft] : ty.fields()) {
      const KValue* f = v.field(l);
      if (!f) throw ShredError("stitching a record value without field " + l);
      fields.emplace_back(l, stitch_value(xi, *f, ft));
    }
    return KValue::record(std::move(fields));
  }
  if (ty.is_collection()) {
    auto idx = parse_index(v);
    if (!idx) throw ShredError("collection position does not hold an index: " + v.show());
    auto it = xi.graphs.find(idx->graph_var);
    if (it == xi.graphs.end())
      throw ShredError("graph variable missing from the value set: " + idx->graph_var);
    CollectionBuilder cb;
    for (const auto& [pair, m] : it->second.entries()) {
      const KValue* key = pair.field("key");
      const KValue* out = pair.field("out");
      if (!key || !out) throw ShredError("malformed value-set pair");
      if (*key == idx->key) cb.add(stitch_value(xi, *out, ty.elem()), m);
    }
    return ty.is_set() ? std::move(cb).finish_set() : std::move(cb).finish_bag();
  }
  throw ShredError("stitching at a non-relational type: " + ty.show());
}

KValue stitch(const ShreddedValueSet& xi, const TermPtr& flattened_term, const Type& ty,
              const TableStore& store) {
  KValue v = eval(flattened_term, Env{{}, &store});
  return stitch_value(xi, v, ty);
}

KValue shred_pipeline(const TermPtr& term, const TableStore& store, const Signature& sig,
                      FreshSupply& fresh, ExecEngine engine, ShredResult* out_shred,
                      ShreddedValueSet* out_xi) {
  Type ty = typecheck(term, sig);
  if (!is_nested_relational(ty))
    throw ShredError("shredding needs a nested relational result type, got " + ty.show());
  TermPtr nf = normalize(term, sig, fresh);
  std::set<std::string> avoid = free_vars(term);
  GraphVarSupply phis(avoid);
  ShredResult sr = shred(ShreddingEnv{}, {}, nf, sig, phis);
  ShreddedValueSet xi = build_value_set(sr.env, store, sig, fresh, engine);
  TermPtr flat_top = flatten_shredded(sr.term, sig);
  KValue result = stitch(xi, flat_top, ty, store);
  if (out_shred) *out_shred = sr;
  if (out_xi) *out_xi = xi;
  return result;
}

TermPtr env_substitute(const TermPtr& term, const ShreddingEnv& env, FreshSupply& fresh) {
  // Entries only reference variables to their left, so substituting left to
  // right closes each graph before it is inserted.
  std::map<std::string, TermPtr> closed;
  for (const auto& e : env.entries()) {
    TermPtr g = e.graph;
    for (const auto& [v, def] : closed) g = subst(g, v, def, fresh);
    closed[e.var] = g;
  }
  TermPtr out = term;
  for (const auto& [v, def] : closed) out = subst(out, v, def, fresh);
  return out;
}

}  // namespace nrcq
