#include "nrcq/type.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace nrcq {

struct Type::Node {
  TypeKind kind;
  BaseType base{};
  std::vector<std::pair<std::string, Type>> fields;  // Record
  std::vector<Type> args;                            // Set/Bag elem, Fun arg/res, Graph args
  Type out;                                          // Graph output
};

Type Type::base(BaseType b) {
  auto n = std::make_shared<Node>();
  n->kind = TypeKind::Base;
  n->base = b;
  return Type(std::move(n));
}

Type Type::record(std::vector<std::pair<std::string, Type>> fields) {
  for (size_t i = 0; i < fields.size(); ++i)
    for (size_t j = i + 1; j < fields.size(); ++j)
      if (fields[i].first == fields[j].first)
        throw std::invalid_argument("duplicate record label: " + fields[i].first);
  auto n = std::make_shared<Node>();
  n->kind = TypeKind::Record;
  n->fields = std::move(fields);
  return Type(std::move(n));
}

Type Type::set(Type elem) {
  auto n = std::make_shared<Node>();
  n->kind = TypeKind::Set;
  n->args = {std::move(elem)};
  return Type(std::move(n));
}

Type Type::bag(Type elem) {
  auto n = std::make_shared<Node>();
  n->kind = TypeKind::Bag;
  n->args = {std::move(elem)};
  return Type(std::move(n));
}

Type Type::fun(Type arg, Type res) {
  auto n = std::make_shared<Node>();
  n->kind = TypeKind::Fun;
  n->args = {std::move(arg), std::move(res)};
  return Type(std::move(n));
}

Type Type::graph(std::vector<Type> args, Type out) {
  if (!out.is_collection())
    throw std::invalid_argument("graph output type must be a collection type");
  auto n = std::make_shared<Node>();
  n->kind = TypeKind::Graph;
  n->args = std::move(args);
  n->out = std::move(out);
  return Type(std::move(n));
}

TypeKind Type::kind() const { return node_->kind; }
BaseType Type::base_type() const { return node_->base; }
const std::vector<std::pair<std::string, Type>>& Type::fields() const { return node_->fields; }
const Type& Type::elem() const { return node_->args[0]; }
const Type& Type::fun_arg() const { return node_->args[0]; }
const Type& Type::fun_res() const { return node_->args[1]; }
const std::vector<Type>& Type::graph_args() const { return node_->args; }
const Type& Type::graph_out() const { return node_->out; }

Type Type::with_elem(Type elem) const {
  return is_set() ? Type::set(std::move(elem)) : Type::bag(std::move(elem));
}

const Type* Type::field(const std::string& label) const {
  for (const auto& [l, t] : fields())
    if (l == label) return &t;
  return nullptr;
}

bool operator==(const Type& a, const Type& b) {
  if (a.node_ == b.node_) return true;
  if (!a.defined() || !b.defined()) return a.defined() == b.defined();
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case TypeKind::Base:
      return a.base_type() == b.base_type();
    case TypeKind::Record: {
      if (a.fields().size() != b.fields().size()) return false;
      // Label order is presentation only.
      std::map<std::string, const Type*> bm;
      for (const auto& [l, t] : b.fields()) bm[l] = &t;
      for (const auto& [l, t] : a.fields()) {
        auto it = bm.find(l);
        if (it == bm.end() || !(*it->second == t)) return false;
      }
      return true;
    }
    case TypeKind::Set:
    case TypeKind::Bag:
      return a.elem() == b.elem();
    case TypeKind::Fun:
      return a.fun_arg() == b.fun_arg() && a.fun_res() == b.fun_res();
    case TypeKind::Graph:
      return a.graph_args() == b.graph_args() && a.graph_out() == b.graph_out();
  }
  return false;
}

std::string show(BaseType b) {
  switch (b) {
    case BaseType::Int: return "Int";
    case BaseType::Bool: return "Bool";
    case BaseType::String: return "String";
  }
  return "?";
}

std::string Type::show() const {
  if (!defined()) return "<undef>";
  std::ostringstream os;
  switch (kind()) {
    case TypeKind::Base:
      os << nrcq::show(base_type());
      break;
    case TypeKind::Record: {
      os << "(";
      bool first = true;
      for (const auto& [l, t] : fields()) {
        if (!first) os << ", ";
        first = false;
        os << l << ":" << t.show();
      }
      os << ")";
      break;
    }
    case TypeKind::Set:
      os << "{" << elem().show() << "}";
      break;
    case TypeKind::Bag:
      os << "[" << elem().show() << "]";
      break;
    case TypeKind::Fun:
      os << "(" << fun_arg().show() << " -> " << fun_res().show() << ")";
      break;
    case TypeKind::Graph: {
      os << "(";
      bool first = true;
      for (const auto& t : graph_args()) {
        if (!first) os << ", ";
        first = false;
        os << t.show();
      }
      os << ") ~> " << graph_out().show();
      break;
    }
  }
  return os.str();
}

bool is_flat_record(const Type& t) {
  if (!t.is_record()) return false;
  return std::all_of(t.fields().begin(), t.fields().end(),
                     [](const auto& f) { return f.second.is_base(); });
}

bool is_flat_elem(const Type& t) { return t.is_base() || is_flat_record(t); }

bool is_flat_collection(const Type& t) {
  return t.is_collection() && is_flat_elem(t.elem());
}

bool is_nested_relational(const Type& t) {
  if (!t.defined()) return false;
  switch (t.kind()) {
    case TypeKind::Base:
      return true;
    case TypeKind::Record:
      return std::all_of(t.fields().begin(), t.fields().end(),
                         [](const auto& f) { return is_nested_relational(f.second); });
    case TypeKind::Set:
    case TypeKind::Bag:
      return is_nested_relational(t.elem());
    default:
      return false;
  }
}

bool contains_collection(const Type& t) {
  if (!t.defined()) return false;
  switch (t.kind()) {
    case TypeKind::Base:
      return false;
    case TypeKind::Record:
      return std::any_of(t.fields().begin(), t.fields().end(),
                         [](const auto& f) { return contains_collection(f.second); });
    default:
      return true;
  }
}

}  // namespace nrcq
