#include "nrcq/term.hpp"

#include <cassert>
#include <map>
#include <sstream>
#include <stdexcept>

namespace nrcq {

namespace {
TermPtr node(TermKind k) {
  auto t = std::make_shared<Term>();
  const_cast<Term&>(*t).kind = k;
  return t;
}
Term& mut(const TermPtr& t) { return const_cast<Term&>(*t); }
}  // namespace

namespace mk {

TermPtr var(std::string name) {
  auto t = node(TermKind::Var);
  mut(t).name = std::move(name);
  return t;
}

TermPtr table(std::string name) {
  auto t = node(TermKind::TableRef);
  mut(t).name = std::move(name);
  return t;
}

TermPtr prim(std::string name, std::vector<TermPtr> args) {
  auto t = node(TermKind::PrimApp);
  mut(t).name = std::move(name);
  mut(t).args = std::move(args);
  return t;
}

TermPtr record(std::vector<std::pair<std::string, TermPtr>> fields) {
  auto t = node(TermKind::RecordLit);
  for (auto& [l, v] : fields) {
    mut(t).labels.push_back(l);
    mut(t).args.push_back(std::move(v));
  }
  return t;
}

TermPtr project(TermPtr rec, std::string label) {
  auto t = node(TermKind::Project);
  mut(t).name = std::move(label);
  mut(t).args = {std::move(rec)};
  return t;
}

TermPtr lam(std::string var, Type annot, TermPtr body) {
  auto t = node(TermKind::Lam);
  mut(t).name = std::move(var);
  mut(t).annot = std::move(annot);
  mut(t).args = {std::move(body)};
  return t;
}

TermPtr app(TermPtr fn, TermPtr arg) {
  auto t = node(TermKind::App);
  mut(t).args = {std::move(fn), std::move(arg)};
  return t;
}

TermPtr empty_set(Type elem) {
  auto t = node(TermKind::EmptySet);
  mut(t).annot = std::move(elem);
  return t;
}

TermPtr set_singleton(TermPtr elem) {
  auto t = node(TermKind::SetSingleton);
  mut(t).args = {std::move(elem)};
  return t;
}

TermPtr set_union(TermPtr a, TermPtr b) {
  auto t = node(TermKind::SetUnion);
  mut(t).args = {std::move(a), std::move(b)};
  return t;
}

TermPtr set_comp(TermPtr head, GeneratorList gens) {
  auto t = node(TermKind::SetComp);
  mut(t).args = {std::move(head)};
  mut(t).gens = std::move(gens);
  return t;
}

TermPtr empty_bag(Type elem) {
  auto t = node(TermKind::EmptyBag);
  mut(t).annot = std::move(elem);
  return t;
}

TermPtr bag_singleton(TermPtr elem) {
  auto t = node(TermKind::BagSingleton);
  mut(t).args = {std::move(elem)};
  return t;
}

TermPtr bag_union(TermPtr a, TermPtr b) {
  auto t = node(TermKind::BagUnion);
  mut(t).args = {std::move(a), std::move(b)};
  return t;
}

TermPtr bag_diff(TermPtr a, TermPtr b) {
  auto t = node(TermKind::BagDiff);
  mut(t).args = {std::move(a), std::move(b)};
  return t;
}

TermPtr bag_comp(TermPtr head, GeneratorList gens) {
  auto t = node(TermKind::BagComp);
  mut(t).args = {std::move(head)};
  mut(t).gens = std::move(gens);
  return t;
}

TermPtr dedup(TermPtr m) {
  auto t = node(TermKind::Dedup);
  mut(t).args = {std::move(m)};
  return t;
}

TermPtr promote(TermPtr m) {
  auto t = node(TermKind::Promote);
  mut(t).args = {std::move(m)};
  return t;
}

TermPtr where_set(TermPtr coll, TermPtr cond) {
  auto t = node(TermKind::WhereSet);
  mut(t).args = {std::move(coll), std::move(cond)};
  return t;
}

TermPtr where_bag(TermPtr coll, TermPtr cond) {
  auto t = node(TermKind::WhereBag);
  mut(t).args = {std::move(coll), std::move(cond)};
  return t;
}

TermPtr empty_set_test(TermPtr m) {
  auto t = node(TermKind::EmptySetTest);
  mut(t).args = {std::move(m)};
  return t;
}

TermPtr empty_bag_test(TermPtr m) {
  auto t = node(TermKind::EmptyBagTest);
  mut(t).args = {std::move(m)};
  return t;
}

TermPtr graph_abs_set(GeneratorList gens, TermPtr body) {
  auto t = node(TermKind::GraphAbsSet);
  mut(t).gens = std::move(gens);
  mut(t).args = {std::move(body)};
  return t;
}

TermPtr graph_abs_bag(GeneratorList gens, TermPtr body) {
  auto t = node(TermKind::GraphAbsBag);
  mut(t).gens = std::move(gens);
  mut(t).args = {std::move(body)};
  return t;
}

TermPtr graph_app(TermPtr graph, std::vector<TermPtr> args) {
  auto t = node(TermKind::GraphApp);
  mut(t).args = {std::move(graph)};
  for (auto& a : args) mut(t).args.push_back(std::move(a));
  return t;
}

TermPtr int_lit(std::int64_t v) { return prim(std::to_string(v), {}); }
TermPtr bool_lit(bool v) { return prim(v ? "true" : "false", {}); }
TermPtr string_lit(const std::string& v) { return prim("\"" + v + "\"", {}); }

TermPtr eq(TermPtr a, TermPtr b) { return prim("==", {std::move(a), std::move(b)}); }
TermPtr land(TermPtr a, TermPtr b) { return prim("&&", {std::move(a), std::move(b)}); }
TermPtr lor(TermPtr a, TermPtr b) { return prim("||", {std::move(a), std::move(b)}); }
TermPtr lnot(TermPtr a) { return prim("!", {std::move(a)}); }

TermPtr conj(std::vector<TermPtr> cs) {
  if (cs.empty()) return bool_lit(true);
  TermPtr acc = cs[0];
  for (size_t i = 1; i < cs.size(); ++i) acc = land(acc, cs[i]);
  return acc;
}

}  // namespace mk

bool is_true_lit(const TermPtr& t) {
  return t->kind == TermKind::PrimApp && t->name == "true" && t->args.empty();
}
bool is_false_lit(const TermPtr& t) {
  return t->kind == TermKind::PrimApp && t->name == "false" && t->args.empty();
}

LitKind lit_kind(const std::string& n) {
  if (n.empty()) return LitKind::None;
  if (n == "true" || n == "false") return LitKind::Bool;
  if (n.front() == '"') return LitKind::String;
  size_t i = (n[0] == '-') ? 1 : 0;
  if (i >= n.size()) return LitKind::None;
  for (; i < n.size(); ++i)
    if (!isdigit(static_cast<unsigned char>(n[i]))) return LitKind::None;
  return LitKind::Int;
}

std::int64_t lit_int(const std::string& n) { return std::stoll(n); }

std::string lit_string(const std::string& n) {
  assert(n.size() >= 2 && n.front() == '"' && n.back() == '"');
  return n.substr(1, n.size() - 2);
}

TermPtr with_children(const TermPtr& t, std::vector<TermPtr> args,
                      std::vector<TermPtr> gen_sources) {
  assert(args.size() == t->args.size());
  assert(gen_sources.size() == t->gens.size());
  auto r = std::make_shared<Term>(*t);
  r->args = std::move(args);
  for (size_t i = 0; i < gen_sources.size(); ++i)
    r->gens[i].source = std::move(gen_sources[i]);
  return r;
}

namespace {

void free_vars_into(const TermPtr& t, std::set<std::string>& bound,
                    std::set<std::string>& out) {
  switch (t->kind) {
    case TermKind::Var:
      if (!bound.count(t->name)) out.insert(t->name);
      return;
    case TermKind::Lam: {
      bool was = bound.count(t->name) > 0;
      bound.insert(t->name);
      free_vars_into(t->args[0], bound, out);
      if (!was) bound.erase(t->name);
      return;
    }
    case TermKind::SetComp:
    case TermKind::BagComp:
    case TermKind::GraphAbsSet:
    case TermKind::GraphAbsBag: {
      std::vector<std::string> added;
      for (const auto& g : t->gens) {
        free_vars_into(g.source, bound, out);
        if (!bound.count(g.var)) {
          bound.insert(g.var);
          added.push_back(g.var);
        }
      }
      for (const auto& a : t->args) free_vars_into(a, bound, out);
      for (const auto& v : added) bound.erase(v);
      return;
    }
    default:
      for (const auto& a : t->args) free_vars_into(a, bound, out);
      return;
  }
}

}  // namespace

std::set<std::string> free_vars(const TermPtr& t) {
  std::set<std::string> bound, out;
  free_vars_into(t, bound, out);
  return out;
}

std::vector<std::string> dom(const GeneratorList& gens) {
  std::vector<std::string> vs;
  vs.reserve(gens.size());
  for (const auto& g : gens) vs.push_back(g.var);
  return vs;
}

std::string FreshSupply::fresh(const std::string& base) {
  return base + "_g" + std::to_string(counter_++);
}

namespace {

TermPtr subst_rec(const TermPtr& t, const std::string& x, const TermPtr& val,
                  const std::set<std::string>& val_fv, FreshSupply& fresh);

/// Substitute through a binder: renames `var` when it would capture val_fv.
std::pair<std::string, TermPtr> subst_binder(const std::string& var, TermPtr body,
                                             const std::string& x, const TermPtr& val,
                                             const std::set<std::string>& val_fv,
                                             FreshSupply& fresh) {
  if (var == x) return {var, body};  // shadowed
  std::string v = var;
  if (val_fv.count(var) && free_vars(body).count(x)) {
    v = fresh.fresh(var);
    auto renamed = subst_rec(body, var, mk::var(v), {v}, fresh);
    body = renamed;
  }
  return {v, subst_rec(body, x, val, val_fv, fresh)};
}

TermPtr subst_comp(const TermPtr& t, const std::string& x, const TermPtr& val,
                   const std::set<std::string>& val_fv, FreshSupply& fresh) {
  GeneratorList gens = t->gens;
  std::vector<TermPtr> bodies = t->args;
  // Walk the telescope; stop substituting once x is shadowed, but keep
  // renaming binders that would capture val's free variables.
  bool shadowed = false;
  for (size_t i = 0; i < gens.size(); ++i) {
    if (!shadowed) gens[i].source = subst_rec(gens[i].source, x, val, val_fv, fresh);
    if (gens[i].var == x) shadowed = true;
    if (!shadowed && val_fv.count(gens[i].var)) {
      // Rename this binder in the rest of the telescope and the bodies.
      std::string nv = fresh.fresh(gens[i].var);
      auto vrep = mk::var(nv);
      std::set<std::string> nvfv{nv};
      for (size_t j = i + 1; j < gens.size(); ++j)
        gens[j].source = subst_rec(gens[j].source, gens[i].var, vrep, nvfv, fresh);
      for (auto& b : bodies) b = subst_rec(b, gens[i].var, vrep, nvfv, fresh);
      gens[i].var = nv;
    }
  }
  if (!shadowed)
    for (auto& b : bodies) b = subst_rec(b, x, val, val_fv, fresh);
  auto r = std::make_shared<Term>(*t);
  r->gens = std::move(gens);
  r->args = std::move(bodies);
  return r;
}

TermPtr subst_rec(const TermPtr& t, const std::string& x, const TermPtr& val,
                  const std::set<std::string>& val_fv, FreshSupply& fresh) {
  switch (t->kind) {
    case TermKind::Var:
      return t->name == x ? val : t;
    case TermKind::Lam: {
      auto [v, body] = subst_binder(t->name, t->args[0], x, val, val_fv, fresh);
      if (v == t->name && body == t->args[0]) return t;
      return mk::lam(v, t->annot, body);
    }
    case TermKind::SetComp:
    case TermKind::BagComp:
    case TermKind::GraphAbsSet:
    case TermKind::GraphAbsBag:
      return subst_comp(t, x, val, val_fv, fresh);
    default: {
      if (t->args.empty()) return t;
      std::vector<TermPtr> args;
      args.reserve(t->args.size());
      bool changed = false;
      for (const auto& a : t->args) {
        auto na = subst_rec(a, x, val, val_fv, fresh);
        changed |= (na != a);
        args.push_back(std::move(na));
      }
      if (!changed) return t;
      auto r = std::make_shared<Term>(*t);
      r->args = std::move(args);
      return r;
    }
  }
}

}  // namespace

TermPtr subst(const TermPtr& t, const std::string& x, const TermPtr& val,
              FreshSupply& fresh) {
  return subst_rec(t, x, val, free_vars(val), fresh);
}

TermPtr expand_equality(const TermPtr& a, const TermPtr& b, const Type& ty) {
  if (ty.is_base()) return mk::eq(a, b);
  if (ty.is_record()) {
    std::vector<TermPtr> cs;
    for (const auto& [l, ft] : ty.fields())
      cs.push_back(expand_equality(mk::project(a, l), mk::project(b, l), ft));
    return mk::conj(std::move(cs));
  }
  throw std::invalid_argument("equality unsupported at type " + ty.show());
}

TermPtr make_membership(const TermPtr& elem, const TermPtr& coll, const Type& elem_type,
                        FreshSupply& fresh) {
  std::string x = fresh.fresh("m");
  auto xv = mk::var(x);
  auto guard = expand_equality(xv, elem, elem_type);
  auto comp = mk::set_comp(mk::where_set(mk::set_singleton(xv), guard), {{x, coll}});
  return mk::lnot(mk::empty_set_test(comp));
}

int term_compare(const TermPtr& a, const TermPtr& b) {
  if (a == b) return 0;
  if (static_cast<int>(a->kind) != static_cast<int>(b->kind))
    return static_cast<int>(a->kind) < static_cast<int>(b->kind) ? -1 : 1;
  if (a->name != b->name) return a->name < b->name ? -1 : 1;
  if (a->labels != b->labels) return a->labels < b->labels ? -1 : 1;
  if (a->gens.size() != b->gens.size()) return a->gens.size() < b->gens.size() ? -1 : 1;
  for (size_t i = 0; i < a->gens.size(); ++i) {
    if (a->gens[i].var != b->gens[i].var)
      return a->gens[i].var < b->gens[i].var ? -1 : 1;
    if (int c = term_compare(a->gens[i].source, b->gens[i].source)) return c;
  }
  if (a->args.size() != b->args.size()) return a->args.size() < b->args.size() ? -1 : 1;
  for (size_t i = 0; i < a->args.size(); ++i)
    if (int c = term_compare(a->args[i], b->args[i])) return c;
  if (a->annot.defined() != b->annot.defined()) return a->annot.defined() ? 1 : -1;
  if (a->annot.defined() && !(a->annot == b->annot))
    return a->annot.show() < b->annot.show() ? -1 : 1;
  return 0;
}

bool term_equal(const TermPtr& a, const TermPtr& b) { return term_compare(a, b) == 0; }

namespace {

bool alpha_rec(const TermPtr& a, const TermPtr& b,
               std::map<std::string, std::string>& m,
               std::map<std::string, std::string>& rm) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case TermKind::Var: {
      auto it = m.find(a->name);
      if (it != m.end()) return it->second == b->name;
      // Free variable: must match exactly and not collide with a binding.
      return a->name == b->name && !rm.count(b->name);
    }
    case TermKind::Lam: {
      auto save_m = m, save_rm = rm;
      m[a->name] = b->name;
      rm[b->name] = a->name;
      bool ok = a->annot == b->annot && alpha_rec(a->args[0], b->args[0], m, rm);
      m = save_m;
      rm = save_rm;
      return ok;
    }
    case TermKind::SetComp:
    case TermKind::BagComp:
    case TermKind::GraphAbsSet:
    case TermKind::GraphAbsBag: {
      if (a->gens.size() != b->gens.size()) return false;
      auto save_m = m, save_rm = rm;
      bool ok = true;
      for (size_t i = 0; ok && i < a->gens.size(); ++i) {
        ok = alpha_rec(a->gens[i].source, b->gens[i].source, m, rm);
        m[a->gens[i].var] = b->gens[i].var;
        rm[b->gens[i].var] = a->gens[i].var;
      }
      for (size_t i = 0; ok && i < a->args.size(); ++i)
        ok = alpha_rec(a->args[i], b->args[i], m, rm);
      m = save_m;
      rm = save_rm;
      return ok;
    }
    default: {
      if (a->name != b->name || a->labels != b->labels ||
          a->args.size() != b->args.size())
        return false;
      if (a->annot.defined() != b->annot.defined()) return false;
      if (a->annot.defined() && !(a->annot == b->annot)) return false;
      for (size_t i = 0; i < a->args.size(); ++i)
        if (!alpha_rec(a->args[i], b->args[i], m, rm)) return false;
      return true;
    }
  }
}

}  // namespace

bool alpha_equal(const TermPtr& a, const TermPtr& b) {
  std::map<std::string, std::string> m, rm;
  return alpha_rec(a, b, m, rm);
}

namespace {

bool is_infix(const std::string& n) {
  return n == "==" || n == "!=" || n == "<" || n == "<=" || n == ">" ||
         n == ">=" || n == "&&" || n == "||";
}

void show_rec(const TermPtr& t, std::ostringstream& os);

void show_gens(const GeneratorList& gens, std::ostringstream& os) {
  bool first = true;
  for (const auto& g : gens) {
    if (!first) os << ", ";
    first = false;
    os << g.var << " <- ";
    show_rec(g.source, os);
  }
}

void show_comp(const TermPtr& t, bool is_set, std::ostringstream& os) {
  // Heads guarded by where print with comprehension-level `where`.
  TermPtr head = t->args[0];
  TermPtr guard;
  TermKind wk = is_set ? TermKind::WhereSet : TermKind::WhereBag;
  if (head->kind == wk) {
    guard = head->args[1];
    head = head->args[0];
  }
  os << "for (";
  show_gens(t->gens, os);
  os << ")";
  if (guard) {
    os << " where (";
    show_rec(guard, os);
    os << ")";
  }
  os << " ";
  if (head->kind == (is_set ? TermKind::SetSingleton : TermKind::BagSingleton)) {
    os << (is_set ? "{" : "[");
    show_rec(head->args[0], os);
    os << (is_set ? "}" : "]");
  } else {
    os << "(";
    show_rec(head, os);
    os << ")";
  }
}

void show_rec(const TermPtr& t, std::ostringstream& os) {
  switch (t->kind) {
    case TermKind::Var:
    case TermKind::TableRef:
      os << t->name;
      return;
    case TermKind::PrimApp:
      if (t->args.empty()) {
        os << t->name;
      } else if (t->name == "!" && t->args.size() == 1) {
        os << "!(";
        show_rec(t->args[0], os);
        os << ")";
      } else if (is_infix(t->name) && t->args.size() == 2) {
        os << "(";
        show_rec(t->args[0], os);
        os << " " << t->name << " ";
        show_rec(t->args[1], os);
        os << ")";
      } else {
        os << t->name << "(";
        for (size_t i = 0; i < t->args.size(); ++i) {
          if (i) os << ", ";
          show_rec(t->args[i], os);
        }
        os << ")";
      }
      return;
    case TermKind::RecordLit:
      os << "(";
      for (size_t i = 0; i < t->args.size(); ++i) {
        if (i) os << ", ";
        os << t->labels[i] << "=";
        show_rec(t->args[i], os);
      }
      os << ")";
      return;
    case TermKind::Project:
      show_rec(t->args[0], os);
      os << "." << t->name;
      return;
    case TermKind::Lam:
      os << "fun (" << t->name << ":" << t->annot.show() << ") -> ";
      show_rec(t->args[0], os);
      return;
    case TermKind::App:
      os << "(";
      show_rec(t->args[0], os);
      os << ")(";
      show_rec(t->args[1], os);
      os << ")";
      return;
    case TermKind::EmptySet:
      os << "[]set : {" << t->annot.show() << "}";
      return;
    case TermKind::EmptyBag:
      os << "[]bag : [" << t->annot.show() << "]";
      return;
    case TermKind::SetSingleton:
      os << "{";
      show_rec(t->args[0], os);
      os << "}";
      return;
    case TermKind::BagSingleton:
      os << "[";
      show_rec(t->args[0], os);
      os << "]";
      return;
    case TermKind::SetUnion:
      os << "(";
      show_rec(t->args[0], os);
      os << " union ";
      show_rec(t->args[1], os);
      os << ")";
      return;
    case TermKind::BagUnion:
      os << "(";
      show_rec(t->args[0], os);
      os << " ++ ";
      show_rec(t->args[1], os);
      os << ")";
      return;
    case TermKind::BagDiff:
      os << "(";
      show_rec(t->args[0], os);
      os << " -- ";
      show_rec(t->args[1], os);
      os << ")";
      return;
    case TermKind::SetComp:
      show_comp(t, true, os);
      return;
    case TermKind::BagComp:
      show_comp(t, false, os);
      return;
    case TermKind::Dedup:
      os << "dedup(";
      show_rec(t->args[0], os);
      os << ")";
      return;
    case TermKind::Promote:
      os << "promote(";
      show_rec(t->args[0], os);
      os << ")";
      return;
    case TermKind::WhereSet:
      os << "whereset(";
      show_rec(t->args[0], os);
      os << ", ";
      show_rec(t->args[1], os);
      os << ")";
      return;
    case TermKind::WhereBag:
      os << "wherebag(";
      show_rec(t->args[0], os);
      os << ", ";
      show_rec(t->args[1], os);
      os << ")";
      return;
    case TermKind::EmptySetTest:
    case TermKind::EmptyBagTest:
      os << "empty(";
      show_rec(t->args[0], os);
      os << ")";
      return;
    case TermKind::GraphAbsSet:
    case TermKind::GraphAbsBag:
      os << (t->kind == TermKind::GraphAbsSet ? "graphset (" : "graphbag (");
      show_gens(t->gens, os);
      os << ") (";
      show_rec(t->args[0], os);
      os << ")";
      return;
    case TermKind::GraphApp:
      os << "(";
      show_rec(t->args[0], os);
      os << ") @ (";
      for (size_t i = 1; i < t->args.size(); ++i) {
        if (i > 1) os << ", ";
        show_rec(t->args[i], os);
      }
      os << ")";
      return;
  }
}

}  // namespace

std::string show(const TermPtr& t) {
  std::ostringstream os;
  show_rec(t, os);
  return os.str();
}

}  // namespace nrcq
