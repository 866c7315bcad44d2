#include "nrcq/corpus.hpp"

#include <random>

#include "nrcq/delateralize.hpp"
#include "nrcq/lateral.hpp"
#include "nrcq/normal_form.hpp"
#include "nrcq/normalize.hpp"
#include "nrcq/shred.hpp"
#include "nrcq/sql_exec.hpp"
#include "nrcq/to_sql.hpp"
#include "nrcq/typecheck.hpp"

namespace nrcq {

Signature corpus_signature() {
  Signature sig;
  sig.add_table("t1", Type::record({{"a", Type::integer()}, {"b", Type::string()}}));
  sig.add_table("t2", Type::record({{"a", Type::integer()}, {"c", Type::boolean()}}));
  sig.add_table("t3", Type::record({{"x", Type::integer()}, {"y", Type::integer()}}));
  return sig;
}

namespace {

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  std::uint64_t next(std::uint64_t n) { return n ? eng() % n : 0; }
  bool chance(int percent) { return next(100) < static_cast<std::uint64_t>(percent); }
};

KValue random_base(Rng& rng, BaseType b, int domain) {
  switch (b) {
    case BaseType::Int: return KValue::integer(static_cast<std::int64_t>(rng.next(domain)));
    case BaseType::Bool: return KValue::boolean(rng.next(2) == 1);
    case BaseType::String:
      return KValue::string("s" + std::to_string(rng.next(domain)));
  }
  return KValue::integer(0);
}

struct Generator {
  Signature sig;
  Rng rng;
  int domain;
  FreshSupply names;

  explicit Generator(std::uint64_t seed, int domain)
      : sig(corpus_signature()), rng(seed), domain(domain) {}

  std::vector<std::string> table_names() const { return {"t1", "t2", "t3"}; }

  Type random_row_type() {
    auto ts = table_names();
    return *sig.table(ts[rng.next(ts.size())]);
  }

  Type random_base_type() {
    switch (rng.next(3)) {
      case 0: return Type::integer();
      case 1: return Type::boolean();
      default: return Type::string();
    }
  }

  Type random_flat_elem() {
    if (rng.chance(60)) return random_row_type();
    return random_base_type();
  }

  /// Result types for generated queries.
  Type random_result_type(int depth, bool flat_only, bool require_nested) {
    if (flat_only) {
      Type elem = random_flat_elem();
      return rng.chance(50) ? Type::set(elem) : Type::bag(elem);
    }
    Type elem = random_elem_type(depth, require_nested);
    return rng.chance(50) ? Type::set(elem) : Type::bag(elem);
  }

  Type random_elem_type(int depth, bool require_nested) {
    if (require_nested) {
      // A record with at least one nested collection field.
      std::vector<std::pair<std::string, Type>> fields;
      fields.emplace_back("k", random_base_type());
      Type inner = rng.chance(50) ? Type::set(random_flat_elem())
                                  : Type::bag(random_flat_elem());
      fields.emplace_back("sub", inner);
      if (rng.chance(30)) fields.emplace_back("m", random_base_type());
      return Type::record(std::move(fields));
    }
    if (depth <= 1 || rng.chance(55)) return random_flat_elem();
    if (rng.chance(50))
      return rng.chance(50) ? Type::set(random_flat_elem()) : Type::bag(random_flat_elem());
    std::vector<std::pair<std::string, Type>> fields;
    fields.emplace_back("k", random_base_type());
    fields.emplace_back("sub", random_elem_type(depth - 1, false));
    return Type::record(std::move(fields));
  }

  /// Variables in scope whose type equals `ty`.
  std::vector<std::string> vars_of(const TypeEnv& env, const Type& ty) {
    std::vector<std::string> vs;
    for (const auto& [v, t] : env)
      if (t == ty) vs.push_back(v);
    return vs;
  }

  TermPtr base_term(const Type& ty, int depth, const TypeEnv& env) {
    // Projections of in-scope record variables.
    std::vector<TermPtr> projections;
    for (const auto& [v, t] : env) {
      if (t == ty) projections.push_back(mk::var(v));
      if (t.is_record())
        for (const auto& [l, ft] : t.fields())
          if (ft == ty) projections.push_back(mk::project(mk::var(v), l));
    }
    if (!projections.empty() && rng.chance(55))
      return projections[rng.next(projections.size())];
    if (ty.base_type() == BaseType::Bool && depth > 0 && rng.chance(45)) {
      switch (rng.next(5)) {
        case 0:
          return mk::land(base_term(ty, depth - 1, env), base_term(ty, depth - 1, env));
        case 1:
          return mk::lor(base_term(ty, depth - 1, env), base_term(ty, depth - 1, env));
        case 2:
          return mk::lnot(base_term(ty, depth - 1, env));
        case 3: {
          Type bt = random_base_type();
          return mk::eq(base_term(bt, 0, env), base_term(bt, 0, env));
        }
        default: {
          // An emptiness test over a small collection subquery.
          Type elem = random_flat_elem();
          bool set_kind = rng.chance(50);
          Type ct = set_kind ? Type::set(elem) : Type::bag(elem);
          TermPtr c = collection_term(ct, depth > 1 ? 1 : 0, env);
          return set_kind ? mk::empty_set_test(c) : mk::empty_bag_test(c);
        }
      }
    }
    KValue k = random_base(rng, ty.base_type(), domain);
    switch (ty.base_type()) {
      case BaseType::Int: return mk::int_lit(k.as_int());
      case BaseType::Bool: return mk::bool_lit(k.as_bool());
      case BaseType::String: return mk::string_lit(k.as_string());
    }
    return mk::int_lit(0);
  }

  TermPtr record_term(const Type& ty, int depth, const TypeEnv& env) {
    auto vs = vars_of(env, ty);
    if (!vs.empty() && rng.chance(50)) return mk::var(vs[rng.next(vs.size())]);
    std::vector<std::pair<std::string, TermPtr>> fields;
    for (const auto& [l, ft] : ty.fields()) fields.emplace_back(l, term_of(ft, depth, env));
    return mk::record(std::move(fields));
  }

  TermPtr table_of_row(const Type& row) {
    for (const auto& name : table_names())
      if (*sig.table(name) == row) return mk::table(name);
    return nullptr;
  }

  TermPtr collection_term(const Type& ty, int depth, const TypeEnv& env) {
    bool set_kind = ty.is_set();
    const Type& elem = ty.elem();
    auto vs = vars_of(env, ty);
    if (!vs.empty() && rng.chance(30)) return mk::var(vs[rng.next(vs.size())]);

    if (depth <= 0) {
      // Leaves: tables, deduplicated tables, empties, singletons.
      if (is_flat_record(elem)) {
        TermPtr t = table_of_row(elem);
        if (t) {
          if (!set_kind) return t;
          return mk::dedup(t);
        }
      }
      if (rng.chance(35))
        return set_kind ? mk::empty_set(elem) : mk::empty_bag(elem);
      TermPtr e = term_of(elem, 0, env);
      return set_kind ? mk::set_singleton(e) : mk::bag_singleton(e);
    }

    int roll = static_cast<int>(rng.next(100));
    // Comprehension-heavy with a bias toward dedup/promote/difference.
    if (roll < 38) {
      int n = 1 + static_cast<int>(rng.next(2));
      GeneratorList gens;
      TypeEnv inner = env;
      for (int i = 0; i < n; ++i) {
        Type src_elem =
            rng.chance(75) ? random_flat_elem() : random_elem_type(depth - 1, false);
        Type src_ty = set_kind ? Type::set(src_elem) : Type::bag(src_elem);
        TermPtr src = collection_term(src_ty, depth - 1, inner);
        std::string v = names.fresh("v");
        gens.push_back({v, src});
        inner[v] = src_elem;
      }
      TermPtr head_elem = term_of(elem, depth - 1, inner);
      TermPtr head = set_kind ? mk::set_singleton(head_elem) : mk::bag_singleton(head_elem);
      if (rng.chance(55)) {
        TermPtr guard = base_term(Type::boolean(), depth - 1, inner);
        head = set_kind ? mk::where_set(head, guard) : mk::where_bag(head, guard);
      } else if (rng.chance(30)) {
        // Collection-typed head exercises the head-merge rules.
        TermPtr h = collection_term(ty, depth - 1, inner);
        return set_kind ? mk::set_comp(h, std::move(gens))
                        : mk::bag_comp(h, std::move(gens));
      }
      return set_kind ? mk::set_comp(head, std::move(gens))
                      : mk::bag_comp(head, std::move(gens));
    }
    if (roll < 50) {
      TermPtr a = collection_term(ty, depth - 1, env);
      TermPtr b = collection_term(ty, depth - 1, env);
      return set_kind ? mk::set_union(a, b) : mk::bag_union(a, b);
    }
    if (roll < 62 && is_flat_elem(elem)) {
      if (set_kind) return mk::dedup(collection_term(Type::bag(elem), depth - 1, env));
      return mk::promote(collection_term(Type::set(elem), depth - 1, env));
    }
    if (roll < 72 && !set_kind && is_flat_elem(elem)) {
      TermPtr a = collection_term(ty, depth - 1, env);
      TermPtr b = collection_term(ty, depth - 1, env);
      return mk::bag_diff(a, b);
    }
    if (roll < 80) {
      TermPtr c = collection_term(ty, depth - 1, env);
      TermPtr guard = base_term(Type::boolean(), depth - 1, env);
      return set_kind ? mk::where_set(c, guard) : mk::where_bag(c, guard);
    }
    if (roll < 86) {
      // A beta redex that normalization must remove.
      Type at = rng.chance(60) ? random_row_type() : random_base_type();
      std::string x = names.fresh("w");
      TypeEnv inner = env;
      inner[x] = at;
      TermPtr body = collection_term(ty, depth - 1, inner);
      return mk::app(mk::lam(x, at, body), term_of(at, depth - 1, env));
    }
    if (roll < 93) {
      TermPtr e = term_of(elem, depth - 1, env);
      return set_kind ? mk::set_singleton(e) : mk::bag_singleton(e);
    }
    if (is_flat_record(elem)) {
      TermPtr t = table_of_row(elem);
      if (t) return set_kind ? mk::dedup(t) : t;
    }
    return set_kind ? mk::empty_set(elem) : mk::empty_bag(elem);
  }

  TermPtr term_of(const Type& ty, int depth, const TypeEnv& env) {
    if (ty.is_base()) return base_term(ty, depth, env);
    if (ty.is_record()) return record_term(ty, depth, env);
    return collection_term(ty, depth, env);
  }
};

}  // namespace

TableStore generate_store(std::uint64_t seed, int max_rows, int domain_size) {
  Signature sig = corpus_signature();
  Rng rng(seed * 0x9e3779b97f4a7c15ULL + 17);
  TableStore store;
  for (const auto& [name, row] : sig.tables()) {
    std::vector<KValue::Entry> rows;
    int n = static_cast<int>(rng.next(max_rows + 1));
    for (int i = 0; i < n; ++i) {
      std::vector<std::pair<std::string, KValue>> fields;
      for (const auto& [l, ft] : row.fields())
        fields.emplace_back(l, random_base(rng, ft.base_type(), domain_size));
      rows.emplace_back(KValue::record(std::move(fields)), 1 + rng.next(3));
    }
    store[name] = KValue::bag(std::move(rows));
  }
  return store;
}

std::vector<TermPtr> generate_corpus(const CorpusSpec& spec) {
  Signature sig = corpus_signature();
  std::vector<TermPtr> out;
  std::uint64_t attempt = 0;
  while (out.size() < static_cast<size_t>(spec.count) && attempt < 50u * spec.count + 100) {
    Generator g(spec.seed * 0x100000001b3ULL + attempt, spec.domain_size);
    ++attempt;
    Type rt = g.random_result_type(spec.max_depth, spec.flat_only, spec.require_nested);
    TermPtr t;
    try {
      t = g.term_of(rt, spec.max_depth, {});
      Type got = typecheck(t, sig);
      if (!is_nested_relational(got)) continue;
      if (spec.flat_only && !is_flat_collection(got)) continue;
      if (spec.require_nested && !(got.is_collection() && contains_collection(got.elem())))
        continue;
      if (!free_vars(t).empty()) continue;
    } catch (const TypeError&) {
      continue;
    }
    out.push_back(t);
  }
  return out;
}

namespace {

/// Candidate replacements for a subterm during shrinking.
std::vector<TermPtr> shrink_candidates(const TermPtr& t, const Type& ty) {
  std::vector<TermPtr> cs;
  if (ty.is_set() && t->kind != TermKind::EmptySet) cs.push_back(mk::empty_set(ty.elem()));
  if (ty.is_bag() && t->kind != TermKind::EmptyBag) cs.push_back(mk::empty_bag(ty.elem()));
  if (ty.is_base()) {
    switch (ty.base_type()) {
      case BaseType::Int:
        if (!(t->kind == TermKind::PrimApp && t->name == "0")) cs.push_back(mk::int_lit(0));
        break;
      case BaseType::Bool:
        if (!is_true_lit(t)) cs.push_back(mk::bool_lit(true));
        break;
      case BaseType::String:
        if (!(t->kind == TermKind::PrimApp && t->name == "\"s0\""))
          cs.push_back(mk::string_lit("s0"));
        break;
    }
  }
  // Collapse binary nodes to one operand where the type allows it.
  if ((t->kind == TermKind::SetUnion || t->kind == TermKind::BagUnion ||
       t->kind == TermKind::BagDiff) &&
      t->args.size() == 2) {
    cs.push_back(t->args[0]);
    cs.push_back(t->args[1]);
  }
  return cs;
}

struct Shrinker {
  const Signature& sig;
  const std::function<bool(const TermPtr&)>& still_fails;

  bool try_replace(TermPtr& root, const TermPtr& target, const TermPtr& replacement) {
    TermPtr candidate = replace_once(root, target, replacement);
    if (!candidate) return false;
    try {
      typecheck(candidate, sig);
    } catch (const TypeError&) {
      return false;
    }
    if (!still_fails(candidate)) return false;
    root = candidate;
    return true;
  }

  TermPtr replace_once(const TermPtr& t, const TermPtr& target, const TermPtr& r) {
    if (t == target) return r;
    for (size_t i = 0; i < t->gens.size(); ++i) {
      if (TermPtr ns = replace_once(t->gens[i].source, target, r)) {
        auto nt = std::make_shared<Term>(*t);
        nt->gens[i].source = ns;
        return nt;
      }
    }
    for (size_t i = 0; i < t->args.size(); ++i) {
      if (TermPtr na = replace_once(t->args[i], target, r)) {
        auto nt = std::make_shared<Term>(*t);
        nt->args[i] = na;
        return nt;
      }
    }
    return nullptr;
  }

  void collect(const TermPtr& t, std::vector<TermPtr>& out) {
    out.push_back(t);
    for (const auto& g : t->gens) collect(g.source, out);
    for (const auto& a : t->args) collect(a, out);
  }
};

}  // namespace

TermPtr shrink_counterexample(const TermPtr& term, const Signature& sig,
                              const std::function<bool(const TermPtr&)>& still_fails) {
  TermPtr cur = term;
  Shrinker sh{sig, still_fails};
  bool progress = true;
  int rounds = 0;
  while (progress && rounds++ < 50) {
    progress = false;
    std::vector<TermPtr> subs;
    sh.collect(cur, subs);
    for (const auto& target : subs) {
      Type ty;
      try {
        // Type the subterm in isolation only when it is closed.
        if (!free_vars(target).empty()) continue;
        ty = typecheck(target, sig);
      } catch (const TypeError&) {
        continue;
      }
      for (const auto& rep : shrink_candidates(target, ty)) {
        if (term_equal(target, rep)) continue;
        if (sh.try_replace(cur, target, rep)) {
          progress = true;
          break;
        }
      }
      if (progress) break;
    }
  }
  return cur;
}

std::optional<std::string> check_normalize_soundness(const TermPtr& term,
                                                     const TableStore& store,
                                                     const Signature& sig) {
  FreshSupply fresh;
  Env env{{}, &store};
  KValue before = eval(term, env);
  TermPtr nf = normalize(term, sig, fresh);
  KValue after = eval(nf, env);
  if (!(before == after))
    return "normalization changed the meaning: " + before.show() + " vs " + after.show();
  TermPtr nf2 = normalize(nf, sig, fresh);
  if (!term_equal(nf, nf2)) return "normalize is not idempotent on " + show(nf);
  Type ty = typecheck(term, sig);
  if (is_nested_relational(ty) && free_vars(term).empty()) {
    NFFailure f;
    if (!is_normal_form(nf, sig, {}, &f))
      return "normal form rejected at '" + f.position + "': " + f.reason + " in " + show(nf);
  }
  return std::nullopt;
}

std::optional<std::string> check_delateralize_theorem(const TermPtr& term,
                                                      const TableStore& store,
                                                      const Signature& sig) {
  FreshSupply fresh;
  Type ty = typecheck(term, sig);
  if (!is_flat_collection(ty)) return std::nullopt;  // flat sub-corpus only
  Env env{{}, &store};
  KValue expect = eval(term, env);
  TermPtr nf = normalize(term, sig, fresh);
  // Strict decrease is asserted inside delateralize; metric zero below.
  TermPtr dl = delateralize(nf, sig, fresh);
  if (lateral_metric(dl) != 0)
    return "delateralized term keeps a positive metric: " + show(dl);
  LateralReport rep = lateral_report(dl, sig);
  if (!rep.occurrences.empty())
    return "delateralized term keeps lateral occurrences: " + show(dl);
  KValue got = eval(dl, env);
  if (!(got == expect))
    return "delateralization changed the meaning: " + expect.show() + " vs " + got.show();
  return std::nullopt;
}

std::optional<std::string> check_sql_oracle_agreement(const TermPtr& term,
                                                      const TableStore& store,
                                                      const Signature& sig) {
  FreshSupply fresh;
  Type ty = typecheck(term, sig);
  if (!is_flat_collection(ty)) return std::nullopt;
  Env env{{}, &store};
  KValue expect = eval(term, env);
  TermPtr nf = normalize(term, sig, fresh);

  // Delateralized pipeline: the emitted SQL must be LATERAL-free.
  TermPtr dl = delateralize(nf, sig, fresh);
  SqlTranslation tr = to_sql(dl, sig);
  if (has_lateral(tr.query))
    return "delateralized SQL still contains LATERAL";
  KValue got = sql_result_value(exec_sql(tr.query, store, sig), tr);
  if (!(got == expect))
    return "SQL executor disagrees with eval (delateralized): " + expect.show() + " vs " +
           got.show();

  // keep-lateral pipeline.
  SqlTranslation tr2 = to_sql(nf, sig);
  KValue got2 = sql_result_value(exec_sql(tr2.query, store, sig), tr2);
  if (!(got2 == expect))
    return "SQL executor disagrees with eval (keep-lateral): " + expect.show() + " vs " +
           got2.show();
  return std::nullopt;
}

std::optional<std::string> check_shred_roundtrip(const TermPtr& term,
                                                 const TableStore& store,
                                                 const Signature& sig) {
  Env env{{}, &store};
  KValue expect = eval(term, env);
  for (ExecEngine engine : {ExecEngine::Eval, ExecEngine::SqlExec}) {
    FreshSupply fresh;
    KValue got = shred_pipeline(term, store, sig, fresh, engine);
    if (!(got == expect))
      return std::string("shredding round-trip disagrees with eval (") +
             (engine == ExecEngine::Eval ? "eval" : "sql") + " engine): " + expect.show() +
             " vs " + got.show();
  }
  return std::nullopt;
}

}  // namespace nrcq
