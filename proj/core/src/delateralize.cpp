#include "nrcq/delateralize.hpp"

#include <optional>

#include "nrcq/typecheck.hpp"

namespace nrcq {

std::string graph_in_label(std::size_t index, std::size_t arity) {
  return arity == 1 ? "in" : "in" + std::to_string(index + 1);
}

namespace {

bool is_candidate_shape(const TermPtr& t) {
  if (t->kind == TermKind::Promote || t->kind == TermKind::BagDiff) return true;
  return t->kind == TermKind::Dedup && t->args[0]->kind == TermKind::BagDiff;
}

struct ScopeEntry {
  std::string var;
  TermPtr source;
  Type source_type;
};

/// Locates the first lateral generator in preorder and rewrites it in place.
/// Rewriting in place is observably the same as commuting the dependency
/// adjacent, rewriting, and undoing the commutation: untouched generators
/// keep their original relative order.
struct Stepper {
  const Signature& sig;
  FreshSupply& fresh;
  bool done = false;

  TermPtr rewrite_generator(const TermPtr& src, const std::vector<ScopeEntry>& scope) {
    std::set<std::string> fv = free_vars(src);
    const ScopeEntry* hit = nullptr;
    for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
      if (fv.count(it->var)) {
        hit = &*it;
        break;
      }
    }
    if (!hit) return nullptr;
    // Domain must be a set; deduplicate bag-typed sources.
    TermPtr dom = hit->source_type.is_set() ? hit->source : mk::dedup(hit->source);
    const std::string& x = hit->var;
    auto xv = mk::var(x);
    if (src->kind == TermKind::Promote) {
      TermPtr g = mk::graph_abs_set({{x, dom}}, src->args[0]);
      return mk::graph_app(mk::promote(g), {xv});
    }
    if (src->kind == TermKind::BagDiff) {
      TermPtr g1 = mk::graph_abs_bag({{x, dom}}, src->args[0]);
      TermPtr g2 = mk::graph_abs_bag({{x, dom}}, src->args[1]);
      return mk::graph_app(mk::bag_diff(g1, g2), {xv});
    }
    // dedup(bag difference)
    const TermPtr& diff = src->args[0];
    TermPtr g1 = mk::graph_abs_bag({{x, dom}}, diff->args[0]);
    TermPtr g2 = mk::graph_abs_bag({{x, dom}}, diff->args[1]);
    return mk::graph_app(mk::dedup(mk::bag_diff(g1, g2)), {xv});
  }

  TermPtr walk(const TermPtr& t, std::vector<ScopeEntry>& scope, TypeEnv& ctx) {
    if (done) return t;
    switch (t->kind) {
      case TermKind::SetComp:
      case TermKind::BagComp: {
        size_t base = scope.size();
        GeneratorList gens = t->gens;
        TermPtr head = t->args[0];
        TypeEnv saved_ctx = ctx;
        for (size_t i = 0; i < gens.size() && !done; ++i) {
          if (is_candidate_shape(gens[i].source)) {
            if (TermPtr r = rewrite_generator(gens[i].source, scope)) {
              gens[i].source = r;
              done = true;
              break;
            }
          }
          gens[i].source = walk(gens[i].source, scope, ctx);
          if (done) break;
          Type st = typecheck(ctx, gens[i].source, sig);
          scope.push_back({gens[i].var, gens[i].source, st});
          ctx[gens[i].var] = st.elem();
        }
        if (!done) head = walk(head, scope, ctx);
        scope.resize(base);
        ctx = saved_ctx;
        if (head == t->args[0]) {
          bool same = true;
          for (size_t i = 0; i < gens.size(); ++i)
            if (gens[i].source != t->gens[i].source) same = false;
          if (same) return t;
        }
        return t->kind == TermKind::SetComp ? mk::set_comp(head, std::move(gens))
                                            : mk::bag_comp(head, std::move(gens));
      }
      default: {
        if (t->args.empty()) return t;
        std::vector<TermPtr> args = t->args;
        bool changed = false;
        for (size_t i = 0; i < args.size() && !done; ++i) {
          TermPtr na = walk(args[i], scope, ctx);
          if (na != args[i]) changed = true;
          args[i] = na;
        }
        if (!changed) return t;
        auto r = std::make_shared<Term>(*t);
        r->args = std::move(args);
        return r;
      }
    }
  }
};

/// Fields of the flattened pair record for a graph with the given domain
/// variables/types and output element type.
struct PairLayout {
  // (label, projection path) per column; path is empty for a whole value.
  std::vector<std::pair<std::string, std::string>> in_cols;  // per flattened column
  bool out_flat_record = false;
  std::vector<std::string> out_fields;  // labels of out when flat record
};

struct GraphEliminator {
  const Signature& sig;
  FreshSupply& fresh;

  TermPtr pair_record(const GeneratorList& gens, const std::vector<Type>& dom_types,
                      const std::string& yvar, const Type& out_elem) {
    std::vector<std::pair<std::string, TermPtr>> fields;
    for (size_t i = 0; i < gens.size(); ++i) {
      std::string lbl = graph_in_label(i, gens.size());
      auto xv = mk::var(gens[i].var);
      if (dom_types[i].is_record()) {
        for (const auto& [f, ft] : dom_types[i].fields())
          fields.emplace_back(lbl + "_" + f, mk::project(xv, f));
      } else {
        fields.emplace_back(lbl, xv);
      }
    }
    auto yv = mk::var(yvar);
    if (is_flat_record(out_elem)) {
      for (const auto& [f, ft] : out_elem.fields())
        fields.emplace_back("out_" + f, mk::project(yv, f));
    } else {
      fields.emplace_back("out", yv);
    }
    return mk::record(std::move(fields));
  }

  TermPtr eliminate(const TermPtr& t, TypeEnv& ctx) {
    switch (t->kind) {
      case TermKind::GraphAbsSet:
      case TermKind::GraphAbsBag: {
        bool set_kind = t->kind == TermKind::GraphAbsSet;
        std::vector<Type> dom_types;
        GeneratorList gens;
        TypeEnv inner = ctx;
        for (const auto& g : t->gens) {
          TermPtr src = eliminate(g.source, inner);
          Type st = typecheck(inner, src, sig);
          dom_types.push_back(st.elem());
          gens.push_back({g.var, src});
          inner[g.var] = st.elem();
        }
        TermPtr body = eliminate(t->args[0], inner);
        Type bt = typecheck(inner, body, sig);
        std::string y = fresh.fresh("y");
        TermPtr pair = pair_record(gens, dom_types, y, bt.elem());
        if (set_kind) {
          gens.push_back({y, body});
          return mk::set_comp(mk::set_singleton(pair), std::move(gens));
        }
        for (auto& g : gens) g.source = mk::promote(g.source);
        gens.push_back({y, body});
        return mk::bag_comp(mk::bag_singleton(pair), std::move(gens));
      }
      case TermKind::GraphApp: {
        Type gt = typecheck(ctx, t->args[0], sig);
        TermPtr coll = eliminate(t->args[0], ctx);
        std::vector<TermPtr> args;
        for (size_t i = 1; i < t->args.size(); ++i) args.push_back(eliminate(t->args[i], ctx));
        const auto& dom_types = gt.graph_args();
        const Type& out = gt.graph_out();
        bool set_kind = out.is_set();
        std::string p = fresh.fresh("p");
        auto pv = mk::var(p);
        std::vector<TermPtr> guards;
        for (size_t i = 0; i < args.size(); ++i) {
          std::string lbl = graph_in_label(i, args.size());
          if (dom_types[i].is_record()) {
            for (const auto& [f, ft] : dom_types[i].fields())
              guards.push_back(mk::eq(mk::project(pv, lbl + "_" + f),
                                      mk::project(args[i], f)));
          } else {
            guards.push_back(mk::eq(mk::project(pv, lbl), args[i]));
          }
        }
        TermPtr out_val;
        if (is_flat_record(out.elem())) {
          std::vector<std::pair<std::string, TermPtr>> fs;
          for (const auto& [f, ft] : out.elem().fields())
            fs.emplace_back(f, mk::project(pv, "out_" + f));
          out_val = mk::record(std::move(fs));
        } else {
          out_val = mk::project(pv, "out");
        }
        TermPtr head = set_kind ? mk::set_singleton(out_val) : mk::bag_singleton(out_val);
        if (!guards.empty()) {
          TermPtr g = mk::conj(std::move(guards));
          head = set_kind ? mk::where_set(head, g) : mk::where_bag(head, g);
        }
        GeneratorList gens{{p, coll}};
        return set_kind ? mk::set_comp(head, std::move(gens))
                        : mk::bag_comp(head, std::move(gens));
      }
      case TermKind::SetComp:
      case TermKind::BagComp: {
        GeneratorList gens;
        TypeEnv inner = ctx;
        for (const auto& g : t->gens) {
          TermPtr src = eliminate(g.source, inner);
          gens.push_back({g.var, src});
          inner[g.var] = typecheck(inner, src, sig).elem();
        }
        TermPtr head = eliminate(t->args[0], inner);
        return t->kind == TermKind::SetComp ? mk::set_comp(head, std::move(gens))
                                            : mk::bag_comp(head, std::move(gens));
      }
      case TermKind::Lam: {
        TypeEnv inner = ctx;
        inner[t->name] = t->annot;
        TermPtr body = eliminate(t->args[0], inner);
        if (body == t->args[0]) return t;
        return mk::lam(t->name, t->annot, body);
      }
      default: {
        if (t->args.empty()) return t;
        std::vector<TermPtr> args;
        bool changed = false;
        for (const auto& a : t->args) {
          TermPtr na = eliminate(a, ctx);
          changed |= na != a;
          args.push_back(na);
        }
        if (!changed) return t;
        auto r = std::make_shared<Term>(*t);
        r->args = std::move(args);
        return r;
      }
    }
  }
};

}  // namespace

TermPtr delateralize_step(const TermPtr& term, const Signature& sig, FreshSupply& fresh) {
  if (lateral_metric(term) == 0)
    throw DelateralizeError("delateralize_step: metric is already zero");
  Stepper st{sig, fresh};
  std::vector<ScopeEntry> scope;
  TypeEnv ctx;
  TermPtr out = st.walk(term, scope, ctx);
  if (!st.done)
    throw DelateralizeError(
        "delateralize_step: positive metric but no lateral generator found");
  return out;
}

TermPtr eliminate_graphs(const TermPtr& term, const Signature& sig, FreshSupply& fresh,
                         const TypeEnv& ctx) {
  GraphEliminator ge{sig, fresh};
  TypeEnv env = ctx;
  return ge.eliminate(term, env);
}

TermPtr delateralize(const TermPtr& term, const Signature& sig, FreshSupply& fresh,
                     std::size_t budget) {
  if (!free_vars(term).empty())
    throw DelateralizeError("delateralize: input must be closed");
  TermPtr cur = term;
  std::uint64_t m = lateral_metric(cur);
  while (m > 0) {
    TermPtr g = delateralize_step(cur, sig, fresh);
    cur = normalize(eliminate_graphs(g, sig, fresh), sig, fresh, budget);
    std::uint64_t m2 = lateral_metric(cur);
    if (m2 >= m)
      throw DelateralizeError("delateralize: metric did not decrease (" +
                              std::to_string(m) + " -> " + std::to_string(m2) + ")");
    m = m2;
  }
  return cur;
}

}  // namespace nrcq
