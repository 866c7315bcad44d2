#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "nrcq/signature.hpp"
#include "nrcq/term.hpp"
#include "nrcq/type.hpp"

namespace nrcq {

enum class TypeErrorCode {
  UnboundVariable,
  UnknownTable,
  UnknownPrim,
  LabelNotFound,
  OperandMismatch,
  NonFlatArgument,     // delta/iota/bag difference over non-flat collections
  GraphOutputNotCollection,
  PrimArityMismatch,
};

struct TypeError : std::runtime_error {
  TypeError(TypeErrorCode code, std::string msg)
      : std::runtime_error(std::move(msg)), code(code) {}
  TypeErrorCode code;
};

using TypeEnv = std::map<std::string, Type>;

/// Church-style checker: returns the unique type of `term` under `ctx`,
/// throws TypeError otherwise. Enforces the flatness restriction on the
/// arguments of dedup, promote and bag difference.
Type typecheck(const TypeEnv& ctx, const TermPtr& term, const Signature& sig);

inline Type typecheck(const TermPtr& term, const Signature& sig) {
  return typecheck(TypeEnv{}, term, sig);
}

}  // namespace nrcq
