#include "nrcq/signature.hpp"

#include <stdexcept>

namespace nrcq {

Signature::Signature() {
  add_prim("true", {{}, BaseType::Bool});
  add_prim("false", {{}, BaseType::Bool});
  add_prim("&&", {{BaseType::Bool, BaseType::Bool}, BaseType::Bool});
  add_prim("||", {{BaseType::Bool, BaseType::Bool}, BaseType::Bool});
  add_prim("!", {{BaseType::Bool}, BaseType::Bool});
  // Equality and disequality are checked polymorphically over equal base
  // types; comparison is fixed on Int.
  add_prim("<", {{BaseType::Int, BaseType::Int}, BaseType::Bool});
  add_prim("<=", {{BaseType::Int, BaseType::Int}, BaseType::Bool});
  add_prim(">", {{BaseType::Int, BaseType::Int}, BaseType::Bool});
  add_prim(">=", {{BaseType::Int, BaseType::Int}, BaseType::Bool});
}

void Signature::add_table(const std::string& name, Type row_type) {
  if (!is_flat_record(row_type))
    throw std::invalid_argument("table " + name + " must have a flat record type");
  tables_[name] = std::move(row_type);
}

void Signature::add_prim(const std::string& name, PrimSig sig) {
  prims_[name] = std::move(sig);
}

const Type* Signature::table(const std::string& name) const {
  auto it = tables_.find(name);
  return it == tables_.end() ? nullptr : &it->second;
}

const PrimSig* Signature::prim(const std::string& name) const {
  auto it = prims_.find(name);
  return it == prims_.end() ? nullptr : &it->second;
}

}  // namespace nrcq
