#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nrcq/type.hpp"

namespace nrcq {

struct PrimSig {
  std::vector<BaseType> args;
  BaseType result;
};

/// Fixed signature: primitive constants/operators plus table schemas.
/// Table types are flat records of base fields.
class Signature {
 public:
  /// Boolean constants and connectives, equality at every base type,
  /// integer comparison. Always present.
  Signature();

  void add_table(const std::string& name, Type row_type);
  void add_prim(const std::string& name, PrimSig sig);

  const Type* table(const std::string& name) const;
  const PrimSig* prim(const std::string& name) const;

  const std::map<std::string, Type>& tables() const { return tables_; }
  const std::map<std::string, PrimSig>& prims() const { return prims_; }

 private:
  std::map<std::string, Type> tables_;
  std::map<std::string, PrimSig> prims_;
};

}  // namespace nrcq
