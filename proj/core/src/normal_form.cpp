#include "nrcq/normal_form.hpp"

namespace nrcq {

namespace {

/// Recognizer for Figure-style normal forms. Carries the typing context so
/// flatness of starred positions can be checked.
struct Recognizer {
  const Signature& sig;
  NFFailure fail;
  bool failed = false;

  bool reject(const std::string& pos, const std::string& why, const TermPtr& t) {
    if (!failed) {
      fail = {pos, why, t};
      failed = true;
    }
    return false;
  }

  Type type_of(const TypeEnv& ctx, const TermPtr& t) { return typecheck(ctx, t, sig); }

  // X ::= x.l | c(X...) | empty_set(Q*) | empty_bag(R*); bare base-typed
  // variables are accepted for open terms.
  bool is_x(const TypeEnv& ctx, const TermPtr& t, const std::string& pos) {
    switch (t->kind) {
      case TermKind::Var:
        return true;
      case TermKind::Project:
        if (t->args[0]->kind != TermKind::Var)
          return reject(pos, "projection of a non-variable in a base term", t);
        return true;
      case TermKind::PrimApp: {
        for (size_t i = 0; i < t->args.size(); ++i)
          if (!is_x(ctx, t->args[i], pos + ".arg" + std::to_string(i)))
            return false;
        return true;
      }
      case TermKind::EmptySetTest:
      case TermKind::EmptyBagTest: {
        Type at = type_of(ctx, t->args[0]);
        if (!is_flat_elem(at.elem()))
          return reject(pos, "emptiness test over a non-flat collection", t);
        return is_collection_nf(ctx, t->args[0], pos + ".emptyarg");
      }
      default:
        return reject(pos, "not a base-term form", t);
    }
  }

  bool is_m(const TypeEnv& ctx, const TermPtr& t, const std::string& pos) {
    Type ty = type_of(ctx, t);
    if (ty.is_base()) return is_x(ctx, t, pos);
    if (ty.is_record()) {
      if (t->kind == TermKind::Var) return true;  // flat record variable
      if (t->kind != TermKind::RecordLit)
        return reject(pos, "record-typed term is neither a variable nor a literal", t);
      for (size_t i = 0; i < t->args.size(); ++i)
        if (!is_m(ctx, t->args[i], pos + "." + t->labels[i])) return false;
      return true;
    }
    if (ty.is_collection()) return is_collection_nf(ctx, t, pos);
    return reject(pos, "term type outside the nested relational grammar", t);
  }

  // F ::= dedup(t) | dedup(R* - R*)
  bool is_f(const TypeEnv& ctx, const TermPtr& t, const std::string& pos) {
    if (t->kind == TermKind::Dedup) {
      const TermPtr& a = t->args[0];
      if (a->kind == TermKind::TableRef) return true;
      if (a->kind == TermKind::BagDiff)
        return is_starred_bag(ctx, a->args[0], pos + ".left") &&
               is_starred_bag(ctx, a->args[1], pos + ".right");
      return reject(pos, "dedup generator must wrap a table or a bag difference", t);
    }
    return reject(pos, "set generator outside the F grammar", t);
  }

  // G ::= t | promote(Q*) | R* - R*
  bool is_g(const TypeEnv& ctx, const TermPtr& t, const std::string& pos) {
    switch (t->kind) {
      case TermKind::TableRef:
        return true;
      case TermKind::Promote:
        return is_starred_set(ctx, t->args[0], pos + ".arg");
      case TermKind::BagDiff:
        return is_starred_bag(ctx, t->args[0], pos + ".left") &&
               is_starred_bag(ctx, t->args[1], pos + ".right");
      default:
        return reject(pos, "bag generator outside the G grammar", t);
    }
  }

  bool is_starred_set(const TypeEnv& ctx, const TermPtr& t, const std::string& pos) {
    Type ty = type_of(ctx, t);
    if (!ty.is_set() || !is_flat_elem(ty.elem()))
      return reject(pos, "starred position requires a flat set", t);
    return is_set_nf(ctx, t, pos);
  }

  bool is_starred_bag(const TypeEnv& ctx, const TermPtr& t, const std::string& pos) {
    Type ty = type_of(ctx, t);
    if (!ty.is_bag() || !is_flat_elem(ty.elem()))
      return reject(pos, "starred position requires a flat bag", t);
    return is_bag_nf(ctx, t, pos);
  }

  bool is_comp_c(const TypeEnv& ctx, const TermPtr& t, const std::string& pos) {
    if (t->kind != TermKind::SetComp)
      return reject(pos, "expected a set comprehension", t);
    TypeEnv inner = ctx;
    for (size_t i = 0; i < t->gens.size(); ++i) {
      const auto& g = t->gens[i];
      if (!is_f(inner, g.source, pos + ".gen" + std::to_string(i))) return false;
      inner[g.var] = type_of(inner, g.source).elem();
    }
    TermPtr head = t->args[0];
    if (head->kind == TermKind::WhereSet) {
      if (!is_x(inner, head->args[1], pos + ".guard")) return false;
      head = head->args[0];
    }
    if (head->kind != TermKind::SetSingleton)
      return reject(pos, "set comprehension head must be a singleton", head);
    return is_m(inner, head->args[0], pos + ".head");
  }

  bool is_comp_d(const TypeEnv& ctx, const TermPtr& t, const std::string& pos) {
    if (t->kind != TermKind::BagComp)
      return reject(pos, "expected a bag comprehension", t);
    TypeEnv inner = ctx;
    for (size_t i = 0; i < t->gens.size(); ++i) {
      const auto& g = t->gens[i];
      if (!is_g(inner, g.source, pos + ".gen" + std::to_string(i))) return false;
      inner[g.var] = type_of(inner, g.source).elem();
    }
    TermPtr head = t->args[0];
    if (head->kind == TermKind::WhereBag) {
      if (!is_x(inner, head->args[1], pos + ".guard")) return false;
      head = head->args[0];
    }
    if (head->kind != TermKind::BagSingleton)
      return reject(pos, "bag comprehension head must be a singleton", head);
    return is_m(inner, head->args[0], pos + ".head");
  }

  // Q ::= union of C branches, plus standardized spellings and bare F forms.
  bool is_set_nf(const TypeEnv& ctx, const TermPtr& t, const std::string& pos) {
    switch (t->kind) {
      case TermKind::EmptySet:
        return true;  // zero-branch union
      case TermKind::SetUnion:
        return is_set_nf(ctx, t->args[0], pos + ".left") &&
               is_set_nf(ctx, t->args[1], pos + ".right");
      case TermKind::SetSingleton:
        return is_m(ctx, t->args[0], pos + ".elem");  // trivial comprehension
      case TermKind::SetComp:
        return is_comp_c(ctx, t, pos);
      case TermKind::Dedup:
        return is_f(ctx, t, pos);
      default:
        return reject(pos, "set term outside the normal-form grammar", t);
    }
  }

  bool is_bag_nf(const TypeEnv& ctx, const TermPtr& t, const std::string& pos) {
    switch (t->kind) {
      case TermKind::EmptyBag:
        return true;
      case TermKind::BagUnion:
        return is_bag_nf(ctx, t->args[0], pos + ".left") &&
               is_bag_nf(ctx, t->args[1], pos + ".right");
      case TermKind::BagSingleton:
        return is_m(ctx, t->args[0], pos + ".elem");
      case TermKind::BagComp:
        return is_comp_d(ctx, t, pos);
      case TermKind::TableRef:
      case TermKind::Promote:
      case TermKind::BagDiff:
        return is_g(ctx, t, pos);
      default:
        return reject(pos, "bag term outside the normal-form grammar", t);
    }
  }

  bool is_collection_nf(const TypeEnv& ctx, const TermPtr& t, const std::string& pos) {
    Type ty = type_of(ctx, t);
    return ty.is_set() ? is_set_nf(ctx, t, pos) : is_bag_nf(ctx, t, pos);
  }
};

}  // namespace

std::optional<NormalForm> is_normal_form(const TermPtr& term, const Signature& sig,
                                         const TypeEnv& ctx, NFFailure* failure) {
  Recognizer rec{sig};
  Type ty = typecheck(ctx, term, sig);
  if (!is_nested_relational(ty)) {
    if (failure) *failure = {"", "type is not nested relational: " + ty.show(), term};
    return std::nullopt;
  }
  bool ok;
  NFTag tag;
  if (ty.is_base()) {
    ok = rec.is_x(ctx, term, "");
    tag = NFTag::BaseX;
  } else if (ty.is_record()) {
    ok = rec.is_m(ctx, term, "");
    tag = NFTag::RecordM;
  } else if (ty.is_set()) {
    ok = rec.is_set_nf(ctx, term, "");
    tag = term->kind == TermKind::Dedup ? NFTag::GenF : NFTag::SetQ;
  } else {
    ok = rec.is_bag_nf(ctx, term, "");
    tag = (term->kind == TermKind::TableRef || term->kind == TermKind::Promote ||
           term->kind == TermKind::BagDiff)
              ? NFTag::GenG
              : NFTag::BagR;
  }
  if (!ok) {
    if (failure) *failure = rec.fail;
    return std::nullopt;
  }
  return NormalForm{tag, term};
}

std::string show(NFTag tag) {
  switch (tag) {
    case NFTag::BaseX: return "BaseX";
    case NFTag::RecordM: return "RecordM";
    case NFTag::SetQ: return "SetQ";
    case NFTag::BagR: return "BagR";
    case NFTag::ComprC: return "ComprC";
    case NFTag::ComprD: return "ComprD";
    case NFTag::GenF: return "GenF";
    case NFTag::GenG: return "GenG";
    case NFTag::StarredFlat: return "StarredFlat";
  }
  return "?";
}

}  // namespace nrcq
