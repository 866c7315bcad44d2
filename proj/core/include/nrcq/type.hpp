#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace nrcq {

enum class BaseType { Int, Bool, String };

enum class TypeKind { Base, Record, Set, Bag, Fun, Graph };

/// Value-semantic type expression. Record fields keep their declared order
/// for display and column layout; equality ignores field order.
class Type {
 public:
  Type() = default;

  static Type base(BaseType b);
  static Type integer() { return base(BaseType::Int); }
  static Type boolean() { return base(BaseType::Bool); }
  static Type string() { return base(BaseType::String); }
  static Type record(std::vector<std::pair<std::string, Type>> fields);
  static Type set(Type elem);
  static Type bag(Type elem);
  static Type fun(Type arg, Type res);
  /// Tabular function type; `out` must be a set or bag type.
  static Type graph(std::vector<Type> args, Type out);

  bool defined() const { return node_ != nullptr; }
  TypeKind kind() const;
  BaseType base_type() const;
  const std::vector<std::pair<std::string, Type>>& fields() const;
  const Type& elem() const;      // Set/Bag
  const Type& fun_arg() const;   // Fun
  const Type& fun_res() const;   // Fun
  const std::vector<Type>& graph_args() const;
  const Type& graph_out() const;

  bool is_base() const { return defined() && kind() == TypeKind::Base; }
  bool is_record() const { return defined() && kind() == TypeKind::Record; }
  bool is_set() const { return defined() && kind() == TypeKind::Set; }
  bool is_bag() const { return defined() && kind() == TypeKind::Bag; }
  bool is_collection() const { return is_set() || is_bag(); }
  bool is_fun() const { return defined() && kind() == TypeKind::Fun; }
  bool is_graph() const { return defined() && kind() == TypeKind::Graph; }

  /// Same collection kind, other element type.
  Type with_elem(Type elem) const;

  const Type* field(const std::string& label) const;

  friend bool operator==(const Type& a, const Type& b);
  friend bool operator!=(const Type& a, const Type& b) { return !(a == b); }

  std::string show() const;

 private:
  struct Node;
  explicit Type(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Record whose fields are all base types (the paper's flat record).
bool is_flat_record(const Type& t);

/// Element type acceptable in SQL-facing collections: a flat record or a
/// bare base type (the running examples deduplicate bags of strings).
bool is_flat_elem(const Type& t);

/// Set or bag of a flat element.
bool is_flat_collection(const Type& t);

/// Nested relational grammar: b | record | set | bag, recursively.
bool is_nested_relational(const Type& t);

/// True when the type mentions a set or bag anywhere inside.
bool contains_collection(const Type& t);

std::string show(BaseType b);

}  // namespace nrcq
