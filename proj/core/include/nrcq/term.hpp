#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nrcq/type.hpp"

namespace nrcq {

struct Term;
using TermPtr = std::shared_ptr<const Term>;

enum class TermKind {
  Var,
  TableRef,
  PrimApp,
  RecordLit,
  Project,
  Lam,
  App,
  EmptySet,
  SetSingleton,
  SetUnion,
  SetComp,
  EmptyBag,
  BagSingleton,
  BagUnion,
  BagDiff,
  BagComp,
  Dedup,
  Promote,
  WhereSet,
  WhereBag,
  EmptySetTest,
  EmptyBagTest,
  GraphAbsSet,
  GraphAbsBag,
  GraphApp,
};

struct Generator {
  std::string var;
  TermPtr source;
};

using GeneratorList = std::vector<Generator>;

/// One immutable node; which fields are meaningful depends on `kind`.
/// Sharing subterms is fine, cycles are not.
struct Term {
  TermKind kind;
  std::string name;                // Var/TableRef/PrimApp name, Project label, Lam binder
  std::vector<std::string> labels; // RecordLit field labels
  std::vector<TermPtr> args;       // subterms (see constructors for layout)
  GeneratorList gens;              // SetComp/BagComp/GraphAbs*
  Type annot;                      // Lam parameter, EmptySet/EmptyBag element type
};

// Constructors. These are the only way code builds terms, so layout
// invariants live here.
namespace mk {
TermPtr var(std::string name);
TermPtr table(std::string name);
TermPtr prim(std::string name, std::vector<TermPtr> args);
TermPtr record(std::vector<std::pair<std::string, TermPtr>> fields);
TermPtr project(TermPtr rec, std::string label);
TermPtr lam(std::string var, Type annot, TermPtr body);
TermPtr app(TermPtr fn, TermPtr arg);
TermPtr empty_set(Type elem);
TermPtr set_singleton(TermPtr elem);
TermPtr set_union(TermPtr a, TermPtr b);
TermPtr set_comp(TermPtr head, GeneratorList gens);
TermPtr empty_bag(Type elem);
TermPtr bag_singleton(TermPtr elem);
TermPtr bag_union(TermPtr a, TermPtr b);
TermPtr bag_diff(TermPtr a, TermPtr b);
TermPtr bag_comp(TermPtr head, GeneratorList gens);
TermPtr dedup(TermPtr m);
TermPtr promote(TermPtr m);
TermPtr where_set(TermPtr coll, TermPtr cond);
TermPtr where_bag(TermPtr coll, TermPtr cond);
TermPtr empty_set_test(TermPtr m);
TermPtr empty_bag_test(TermPtr m);
TermPtr graph_abs_set(GeneratorList gens, TermPtr body);
TermPtr graph_abs_bag(GeneratorList gens, TermPtr body);
TermPtr graph_app(TermPtr graph, std::vector<TermPtr> args);

// Literal shorthands (literals are nullary prims).
TermPtr int_lit(std::int64_t v);
TermPtr bool_lit(bool v);
TermPtr string_lit(const std::string& v);

// Boolean/equality helpers over base-typed operands.
TermPtr eq(TermPtr a, TermPtr b);
TermPtr land(TermPtr a, TermPtr b);
TermPtr lor(TermPtr a, TermPtr b);
TermPtr lnot(TermPtr a);

/// Conjunction of a list, `true` when empty.
TermPtr conj(std::vector<TermPtr> cs);
}  // namespace mk

bool is_true_lit(const TermPtr& t);
bool is_false_lit(const TermPtr& t);

/// Literal classification for nullary prims.
enum class LitKind { None, Int, Bool, String };
LitKind lit_kind(const std::string& prim_name);
std::int64_t lit_int(const std::string& prim_name);
std::string lit_string(const std::string& prim_name);

/// Rebuild `t` with new children; takes args/gens-sources in traversal order.
TermPtr with_children(const TermPtr& t, std::vector<TermPtr> args,
                      std::vector<TermPtr> gen_sources);

std::set<std::string> free_vars(const TermPtr& t);

/// Names of a generator telescope, in order.
std::vector<std::string> dom(const GeneratorList& gens);

/// Deterministic fresh-name source; one instance per compilation pipeline.
class FreshSupply {
 public:
  std::string fresh(const std::string& base);

 private:
  std::uint64_t counter_ = 0;
};

/// Capture-avoiding substitution of `val` for free occurrences of `x`.
TermPtr subst(const TermPtr& t, const std::string& x, const TermPtr& val,
              FreshSupply& fresh);

/// Fieldwise equality of two terms at a base or record type.
TermPtr expand_equality(const TermPtr& a, const TermPtr& b, const Type& ty);

/// Membership as its definable form !empty({x | x <- coll, x == elem});
/// the evaluator recognizes the base-typed shape and shortcuts it.
TermPtr make_membership(const TermPtr& elem, const TermPtr& coll, const Type& elem_type,
                        FreshSupply& fresh);

/// Exact structural comparison (names included). Total order.
int term_compare(const TermPtr& a, const TermPtr& b);
bool term_equal(const TermPtr& a, const TermPtr& b);

bool alpha_equal(const TermPtr& a, const TermPtr& b);

/// Surface-syntax rendering; reparses to an alpha-equal term for
/// lambda/graph-free queries and for graph forms via the extended grammar.
std::string show(const TermPtr& t);

}  // namespace nrcq
