#include "nrcq/normalize.hpp"

#include <cassert>

namespace nrcq {

namespace {

bool is_set_comp(const TermPtr& t) { return t->kind == TermKind::SetComp; }
bool is_bag_comp(const TermPtr& t) { return t->kind == TermKind::BagComp; }

TermPtr make_comp(bool set, TermPtr head, GeneratorList gens) {
  if (gens.empty()) return head;  // trivial comprehension is the head itself
  return set ? mk::set_comp(std::move(head), std::move(gens))
             : mk::bag_comp(std::move(head), std::move(gens));
}

struct Rewriter {
  const Signature& sig;
  FreshSupply& fresh;

  Type type_of(const TermPtr& t, const TypeEnv& ctx) { return typecheck(ctx, t, sig); }

  /// Renames the telescope binders of `comp` that appear in `avoid`,
  /// rewriting later sources and the head.
  TermPtr freshen_binders(const TermPtr& comp, const std::set<std::string>& avoid) {
    GeneratorList gens = comp->gens;
    std::vector<TermPtr> heads = comp->args;
    for (size_t i = 0; i < gens.size(); ++i) {
      if (!avoid.count(gens[i].var)) continue;
      std::string nv = fresh.fresh(gens[i].var);
      auto rep = mk::var(nv);
      for (size_t j = i + 1; j < gens.size(); ++j)
        gens[j].source = subst(gens[j].source, gens[i].var, rep, fresh);
      for (auto& h : heads) h = subst(h, gens[i].var, rep, fresh);
      gens[i].var = nv;
    }
    auto r = std::make_shared<Term>(*comp);
    r->gens = std::move(gens);
    r->args = std::move(heads);
    return r;
  }

  std::optional<RewriteStep> rules_at(const TermPtr& t, const TypeEnv& ctx) {
    switch (t->kind) {
      case TermKind::App:
        if (t->args[0]->kind == TermKind::Lam) {
          auto& lam = t->args[0];
          return RewriteStep{"beta", subst(lam->args[0], lam->name, t->args[1], fresh)};
        }
        return std::nullopt;
      case TermKind::Project:
        if (t->args[0]->kind == TermKind::RecordLit) {
          const auto& rec = t->args[0];
          for (size_t i = 0; i < rec->labels.size(); ++i)
            if (rec->labels[i] == t->name)
              return RewriteStep{"project", rec->args[i]};
        }
        return std::nullopt;
      case TermKind::SetComp:
        return comp_rules(t, ctx, /*set=*/true);
      case TermKind::BagComp:
        return comp_rules(t, ctx, /*set=*/false);
      case TermKind::WhereSet:
        return where_rules(t, ctx, /*set=*/true);
      case TermKind::WhereBag:
        return where_rules(t, ctx, /*set=*/false);
      case TermKind::Dedup:
        return dedup_rules(t);
      case TermKind::Promote:
        return promote_rules(t);
      case TermKind::EmptySetTest:
      case TermKind::EmptyBagTest:
        return empty_test_rules(t, ctx);
      default:
        return std::nullopt;
    }
  }

  std::optional<RewriteStep> comp_rules(const TermPtr& t, const TypeEnv& ctx, bool set) {
    const TermPtr& head = t->args[0];
    const TermKind empty_kind = set ? TermKind::EmptySet : TermKind::EmptyBag;
    const TermKind singleton_kind = set ? TermKind::SetSingleton : TermKind::BagSingleton;
    const TermKind union_kind = set ? TermKind::SetUnion : TermKind::BagUnion;
    const TermKind comp_kind = set ? TermKind::SetComp : TermKind::BagComp;
    const TermKind where_kind = set ? TermKind::WhereSet : TermKind::WhereBag;
    const char* pfx = set ? "set-" : "bag-";

    // Empty head.
    if (head->kind == empty_kind)
      return RewriteStep{pfx + std::string("comp-empty-head"), head};
    // Empty generator.
    for (const auto& g : t->gens)
      if (g.source->kind == empty_kind) {
        Type ct = type_of(t, ctx);
        return RewriteStep{pfx + std::string("comp-empty-gen"),
                           set ? mk::empty_set(ct.elem()) : mk::empty_bag(ct.elem())};
      }
    // Singleton generator: substitute through the tail.
    for (size_t i = 0; i < t->gens.size(); ++i) {
      if (t->gens[i].source->kind != singleton_kind) continue;
      const TermPtr elem = t->gens[i].source->args[0];
      GeneratorList tail(t->gens.begin() + i + 1, t->gens.end());
      TermPtr tail_comp = make_comp(set, head, std::move(tail));
      TermPtr substituted = subst(tail_comp, t->gens[i].var, elem, fresh);
      GeneratorList gens(t->gens.begin(), t->gens.begin() + i);
      if (substituted->kind == comp_kind && !tail.empty()) {
        for (const auto& g : substituted->gens) gens.push_back(g);
        return RewriteStep{pfx + std::string("comp-gen-singleton"),
                           make_comp(set, substituted->args[0], std::move(gens))};
      }
      return RewriteStep{pfx + std::string("comp-gen-singleton"),
                         make_comp(set, substituted, std::move(gens))};
    }
    // Union head distributes.
    if (head->kind == union_kind) {
      TermPtr l = make_comp(set, head->args[0], t->gens);
      TermPtr r = make_comp(set, head->args[1], t->gens);
      return RewriteStep{pfx + std::string("comp-union-head"),
                         set ? mk::set_union(l, r) : mk::bag_union(l, r)};
    }
    // Union generator splits.
    for (size_t i = 0; i < t->gens.size(); ++i) {
      if (t->gens[i].source->kind != union_kind) continue;
      GeneratorList g1 = t->gens, g2 = t->gens;
      g1[i].source = t->gens[i].source->args[0];
      g2[i].source = t->gens[i].source->args[1];
      TermPtr l = make_comp(set, head, std::move(g1));
      TermPtr r = make_comp(set, head, std::move(g2));
      return RewriteStep{pfx + std::string("comp-union-gen"),
                         set ? mk::set_union(l, r) : mk::bag_union(l, r)};
    }
    // Comprehension generator unnests.
    for (size_t i = 0; i < t->gens.size(); ++i) {
      if (t->gens[i].source->kind != comp_kind) continue;
      std::set<std::string> avoid = free_vars(head);
      for (size_t j = 0; j < t->gens.size(); ++j) {
        if (j != i) {
          avoid.insert(t->gens[j].var);
          for (const auto& v : free_vars(t->gens[j].source)) avoid.insert(v);
        }
      }
      avoid.insert(t->gens[i].var);
      TermPtr inner = freshen_binders(t->gens[i].source, avoid);
      GeneratorList gens(t->gens.begin(), t->gens.begin() + i);
      for (const auto& g : inner->gens) gens.push_back(g);
      gens.push_back({t->gens[i].var, inner->args[0]});
      gens.insert(gens.end(), t->gens.begin() + i + 1, t->gens.end());
      return RewriteStep{pfx + std::string("comp-gen-unnest"),
                         make_comp(set, head, std::move(gens))};
    }
    // Comprehension head merges.
    if (head->kind == comp_kind) {
      std::set<std::string> avoid;
      for (const auto& g : t->gens) avoid.insert(g.var);
      TermPtr inner = freshen_binders(head, avoid);
      GeneratorList gens = t->gens;
      gens.insert(gens.end(), inner->gens.begin(), inner->gens.end());
      return RewriteStep{pfx + std::string("comp-head-merge"),
                         make_comp(set, inner->args[0], std::move(gens))};
    }
    // Guarded generator hoists its guard to the head.
    for (size_t i = 0; i < t->gens.size(); ++i) {
      if (t->gens[i].source->kind != where_kind) continue;
      TermPtr guard = t->gens[i].source->args[1];
      auto gfv = free_vars(guard);
      // Binders from position i on would capture the moved guard; rename them.
      std::set<std::string> avoid;
      for (size_t j = i; j < t->gens.size(); ++j)
        if (gfv.count(t->gens[j].var)) avoid.insert(t->gens[j].var);
      TermPtr src = t;
      if (!avoid.empty()) src = freshen_binders(t, avoid);
      GeneratorList gens = src->gens;
      guard = gens[i].source->args[1];
      gens[i].source = gens[i].source->args[0];
      TermPtr new_head = set ? mk::where_set(src->args[0], guard)
                             : mk::where_bag(src->args[0], guard);
      return RewriteStep{pfx + std::string("comp-gen-where"),
                         make_comp(set, new_head, std::move(gens))};
    }
    // Constrained eta-expansions: blocking heads move into a generator.
    auto eta = [&](const TermPtr& blocking, const TermPtr& guard,
                   const std::string& rule) -> RewriteStep {
      std::string z = fresh.fresh("z");
      TermPtr zv = mk::var(z);
      TermPtr new_head = set ? mk::set_singleton(zv) : mk::bag_singleton(zv);
      if (guard)
        new_head = set ? mk::where_set(new_head, guard) : mk::where_bag(new_head, guard);
      GeneratorList gens = t->gens;
      gens.push_back({z, blocking});
      return RewriteStep{rule, make_comp(set, new_head, std::move(gens))};
    };
    TermPtr bare = head;
    TermPtr guard;
    if (head->kind == where_kind) {
      bare = head->args[0];
      guard = head->args[1];
    }
    if (set) {
      if (bare->kind == TermKind::Dedup &&
          (bare->args[0]->kind == TermKind::BagDiff ||
           bare->args[0]->kind == TermKind::TableRef))
        return eta(bare, guard, "set-comp-eta-dedup");
    } else {
      if (bare->kind == TermKind::Promote) return eta(bare, guard, "bag-comp-eta-promote");
      if (bare->kind == TermKind::BagDiff) return eta(bare, guard, "bag-comp-eta-diff");
      if (bare->kind == TermKind::TableRef) return eta(bare, guard, "bag-comp-eta-table");
    }
    return std::nullopt;
  }

  std::optional<RewriteStep> where_rules(const TermPtr& t, const TypeEnv& ctx, bool set) {
    const TermPtr& coll = t->args[0];
    const TermPtr& cond = t->args[1];
    const char* pfx = set ? "set-" : "bag-";
    if (is_true_lit(cond)) return RewriteStep{pfx + std::string("where-true"), coll};
    if (is_false_lit(cond)) {
      Type ct = type_of(coll, ctx);
      return RewriteStep{pfx + std::string("where-false"),
                         set ? mk::empty_set(ct.elem()) : mk::empty_bag(ct.elem())};
    }
    if (coll->kind == (set ? TermKind::EmptySet : TermKind::EmptyBag))
      return RewriteStep{pfx + std::string("where-empty"), coll};
    if (coll->kind == (set ? TermKind::SetUnion : TermKind::BagUnion)) {
      auto wrap = [&](const TermPtr& m) {
        return set ? mk::where_set(m, cond) : mk::where_bag(m, cond);
      };
      TermPtr l = wrap(coll->args[0]);
      TermPtr r = wrap(coll->args[1]);
      return RewriteStep{pfx + std::string("where-union"),
                         set ? mk::set_union(l, r) : mk::bag_union(l, r)};
    }
    if (coll->kind == (set ? TermKind::SetComp : TermKind::BagComp)) {
      auto cfv = free_vars(cond);
      std::set<std::string> avoid;
      for (const auto& g : coll->gens)
        if (cfv.count(g.var)) avoid.insert(g.var);
      TermPtr comp = avoid.empty() ? coll : freshen_binders(coll, avoid);
      TermPtr new_head = set ? mk::where_set(comp->args[0], cond)
                             : mk::where_bag(comp->args[0], cond);
      return RewriteStep{pfx + std::string("where-push"),
                         make_comp(set, new_head, comp->gens)};
    }
    if (coll->kind == (set ? TermKind::WhereSet : TermKind::WhereBag)) {
      TermPtr merged = mk::land(cond, coll->args[1]);
      TermPtr inner = set ? mk::where_set(coll->args[0], merged)
                          : mk::where_bag(coll->args[0], merged);
      return RewriteStep{pfx + std::string("where-merge"), inner};
    }
    return std::nullopt;
  }

  std::optional<RewriteStep> dedup_rules(const TermPtr& t) {
    const TermPtr& m = t->args[0];
    switch (m->kind) {
      case TermKind::EmptyBag:
        return RewriteStep{"delta-empty", mk::empty_set(m->annot)};
      case TermKind::BagSingleton:
        return RewriteStep{"delta-singleton", mk::set_singleton(m->args[0])};
      case TermKind::BagUnion:
        return RewriteStep{"delta-union", mk::set_union(mk::dedup(m->args[0]),
                                                        mk::dedup(m->args[1]))};
      case TermKind::BagComp: {
        GeneratorList gens = m->gens;
        for (auto& g : gens) g.source = mk::dedup(g.source);
        return RewriteStep{"delta-comp",
                           mk::set_comp(mk::dedup(m->args[0]), std::move(gens))};
      }
      case TermKind::WhereBag:
        return RewriteStep{"delta-where",
                           mk::where_set(mk::dedup(m->args[0]), m->args[1])};
      case TermKind::Promote:
        return RewriteStep{"delta-iota", m->args[0]};
      default:
        return std::nullopt;
    }
  }

  std::optional<RewriteStep> promote_rules(const TermPtr& t) {
    const TermPtr& m = t->args[0];
    switch (m->kind) {
      case TermKind::EmptySet:
        return RewriteStep{"iota-empty", mk::empty_bag(m->annot)};
      case TermKind::WhereSet:
        return RewriteStep{"iota-where",
                           mk::where_bag(mk::promote(m->args[0]), m->args[1])};
      default:
        return std::nullopt;
    }
  }

  std::optional<RewriteStep> empty_test_rules(const TermPtr& t, const TypeEnv& ctx) {
    bool set = t->kind == TermKind::EmptySetTest;
    Type at = type_of(t->args[0], ctx);
    if (is_flat_elem(at.elem())) return std::nullopt;
    std::string x = fresh.fresh("x");
    TermPtr unit = mk::record({});
    if (set) {
      TermPtr comp = mk::set_comp(mk::set_singleton(unit), {{x, t->args[0]}});
      return RewriteStep{"empty-set-flatten", mk::empty_set_test(comp)};
    }
    TermPtr comp = mk::bag_comp(mk::bag_singleton(unit), {{x, t->args[0]}});
    return RewriteStep{"empty-bag-flatten", mk::empty_bag_test(comp)};
  }

  std::optional<RewriteStep> step(const TermPtr& t, TypeEnv& ctx) {
    if (auto r = rules_at(t, ctx)) return r;
    // Descend. Generators first (left to right), then remaining children.
    if (!t->gens.empty()) {
      TypeEnv inner = ctx;
      for (size_t i = 0; i < t->gens.size(); ++i) {
        if (auto r = step(t->gens[i].source, inner)) {
          auto nt = std::make_shared<Term>(*t);
          nt->gens[i].source = r->result;
          return RewriteStep{r->rule, nt};
        }
        Type st = typecheck(inner, t->gens[i].source, sig);
        inner[t->gens[i].var] = st.elem();
      }
      for (size_t i = 0; i < t->args.size(); ++i) {
        if (auto r = step(t->args[i], inner)) {
          auto nt = std::make_shared<Term>(*t);
          nt->args[i] = r->result;
          return RewriteStep{r->rule, nt};
        }
      }
      return std::nullopt;
    }
    if (t->kind == TermKind::Lam) return std::nullopt;  // no rewriting under lambda
    for (size_t i = 0; i < t->args.size(); ++i) {
      if (auto r = step(t->args[i], ctx)) {
        auto nt = std::make_shared<Term>(*t);
        nt->args[i] = r->result;
        return RewriteStep{r->rule, nt};
      }
    }
    return std::nullopt;
  }
};

}  // namespace

std::optional<RewriteStep> rewrite_step(const TermPtr& term, const Signature& sig,
                                        FreshSupply& fresh, const TypeEnv& ctx) {
  Rewriter rw{sig, fresh};
  TypeEnv env = ctx;
  return rw.step(term, env);
}

TermPtr normalize(const TermPtr& term, const Signature& sig, FreshSupply& fresh,
                  std::size_t budget, std::vector<RewriteStep>* trace,
                  const TypeEnv& ctx) {
  TermPtr cur = term;
  for (std::size_t i = 0; i < budget; ++i) {
    auto r = rewrite_step(cur, sig, fresh, ctx);
    if (!r) return cur;
    cur = r->result;
    if (trace) trace->push_back(*r);
  }
  throw NormalizeBudgetExceeded("normalization exceeded the step budget of " +
                                std::to_string(budget));
}

}  // namespace nrcq
