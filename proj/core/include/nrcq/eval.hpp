#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "nrcq/kvalue.hpp"
#include "nrcq/signature.hpp"
#include "nrcq/term.hpp"
#include "nrcq/typecheck.hpp"

namespace nrcq {

/// Table name -> bag of flat-record rows.
using TableStore = std::map<std::string, KValue>;

struct Env {
  std::map<std::string, KValue> vars;
  const TableStore* store = nullptr;
};

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Reference denotational evaluator over K-relations. Pure given an
/// immutable environment; exists to be obviously correct, not fast.
KValue eval(const TermPtr& term, const Env& env);

/// True iff `env` assigns every generator variable an element that its
/// source collection contains with nonzero multiplicity.
bool models(const Env& env, const GeneratorList& gens);

/// Exact semantic comparison of two terms of the same type.
bool equiv(const TermPtr& t1, const TermPtr& t2, const Env& env, const Signature& sig,
           const TypeEnv& ctx = {});

}  // namespace nrcq
