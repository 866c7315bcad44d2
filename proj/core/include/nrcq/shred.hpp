#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nrcq/eval.hpp"
#include "nrcq/signature.hpp"
#include "nrcq/term.hpp"
#include "nrcq/typecheck.hpp"

namespace nrcq {

struct ShredError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Ordered map from graph variables to graph-calculus terms; every entry
/// references only graph variables defined to its left.
class ShreddingEnv {
 public:
  struct Entry {
    std::string var;
    TermPtr graph;
  };

  const std::vector<Entry>& entries() const { return entries_; }
  const TermPtr* lookup(const std::string& var) const;
  bool contains(const std::string& var) const { return lookup(var) != nullptr; }
  void append(std::string var, TermPtr graph);
  void remove(const std::vector<std::string>& vars);

 private:
  std::vector<Entry> entries_;
};

/// Fresh graph-variable names phi1, phi2, ... in traversal order, skipping
/// names already used by the query.
class GraphVarSupply {
 public:
  explicit GraphVarSupply(const std::set<std::string>& avoid = {}) : avoid_(avoid) {}
  std::string next();

 private:
  std::set<std::string> avoid_;
  std::uint64_t n_ = 0;
};

struct ShredResult {
  TermPtr term;        // the shredded skeleton
  ShreddingEnv env;
};

/// The shredding judgment: lifts every nested-collection subquery of a
/// normal form to a graph abstracted over the enclosing comprehension
/// telescope. `gens` is the (set-typed) telescope built so far.
ShredResult shred(const ShreddingEnv& env_in, const GeneratorList& gens,
                  const TermPtr& term, const Signature& sig, GraphVarSupply& phis);

/// Typing of shredding environments: each entry must be graph-typed under
/// its predecessors. Returns graph variable -> type.
TypeEnv typecheck_env(const ShreddingEnv& env, const Signature& sig);

/// Flattening embedding: graph applications become index records of the
/// flat index type (tag = quoted graph variable, key = captured argument
/// tuple); graphs become collections of (input, output) pairs.
TermPtr flatten_shredded(const TermPtr& term, const Signature& sig);

/// Flat token standing for a graph application.
struct IndexValue {
  std::string graph_var;
  KValue key;  // tuple record of the captured arguments
};

std::optional<IndexValue> parse_index(const KValue& v);

/// Evaluated flat results per graph variable: collections of records with
/// fields `key` (argument tuple) and `out`.
struct ShreddedValueSet {
  std::map<std::string, KValue> graphs;
};

enum class ExecEngine { Eval, SqlExec };

/// flatten -> flatten_records -> normalize -> delateralize -> evaluate, per
/// environment entry.
ShreddedValueSet build_value_set(const ShreddingEnv& env, const TableStore& store,
                                 const Signature& sig, FreshSupply& fresh,
                                 ExecEngine engine);

/// Rebuilds the nested value from the flattened skeleton and the shredded
/// value set, guided by the requested result type.
KValue stitch(const ShreddedValueSet& xi, const TermPtr& flattened_term, const Type& ty,
              const TableStore& store);

KValue stitch_value(const ShreddedValueSet& xi, const KValue& v, const Type& ty);

/// normalize -> shred -> flatten -> build value set -> stitch; equals eval.
KValue shred_pipeline(const TermPtr& term, const TableStore& store, const Signature& sig,
                      FreshSupply& fresh, ExecEngine engine,
                      ShredResult* out_shred = nullptr, ShreddedValueSet* out_xi = nullptr);

/// Substitutes every graph variable by its (recursively substituted)
/// definition; used to state shredding correctness executably.
TermPtr env_substitute(const TermPtr& term, const ShreddingEnv& env, FreshSupply& fresh);

}  // namespace nrcq
