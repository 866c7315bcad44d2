#include "nrcq/kvalue.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace nrcq {

struct KValue::Node {
  Kind kind;
  BaseKind base_kind{};
  std::int64_t i = 0;
  bool b = false;
  std::string s;
  std::vector<std::pair<std::string, KValue>> fields;
  std::vector<Entry> entries;
  bool graph_is_set = false;
  std::size_t arity = 0;
  std::vector<GraphEntry> graph_entries;
  std::map<std::string, KValue> env;
  std::string var;
  Type annot;
  TermPtr body;
};

KValue KValue::integer(std::int64_t v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Base;
  n->base_kind = BaseKind::Int;
  n->i = v;
  return KValue(std::move(n));
}

KValue KValue::boolean(bool v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Base;
  n->base_kind = BaseKind::Bool;
  n->b = v;
  return KValue(std::move(n));
}

KValue KValue::string(std::string v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Base;
  n->base_kind = BaseKind::String;
  n->s = std::move(v);
  return KValue(std::move(n));
}

KValue KValue::record(std::vector<std::pair<std::string, KValue>> fields) {
  std::sort(fields.begin(), fields.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  auto n = std::make_shared<Node>();
  n->kind = Kind::Record;
  n->fields = std::move(fields);
  return KValue(std::move(n));
}

namespace {
void normalize_entries(std::vector<KValue::Entry>& es, bool clamp) {
  std::map<KValue, std::uint64_t> acc;
  for (auto& [v, m] : es)
    if (m) acc[v] += m;
  es.clear();
  for (auto& [v, m] : acc) es.emplace_back(v, clamp ? 1 : m);
}
}  // namespace

KValue KValue::set(std::vector<Entry> entries) {
  normalize_entries(entries, /*clamp=*/true);
  auto n = std::make_shared<Node>();
  n->kind = Kind::Set;
  n->entries = std::move(entries);
  return KValue(std::move(n));
}

KValue KValue::bag(std::vector<Entry> entries) {
  normalize_entries(entries, /*clamp=*/false);
  auto n = std::make_shared<Node>();
  n->kind = Kind::Bag;
  n->entries = std::move(entries);
  return KValue(std::move(n));
}

KValue KValue::graph(bool set_kind, std::size_t arity, std::vector<GraphEntry> entries) {
  std::map<std::pair<std::vector<KValue>, KValue>, std::uint64_t> acc;
  for (auto& [k, m] : entries)
    if (m) acc[k] += m;
  std::vector<GraphEntry> es;
  for (auto& [k, m] : acc) es.emplace_back(k, set_kind ? 1 : m);
  auto n = std::make_shared<Node>();
  n->kind = Kind::Graph;
  n->graph_is_set = set_kind;
  n->arity = arity;
  n->graph_entries = std::move(es);
  return KValue(std::move(n));
}

KValue KValue::closure(std::map<std::string, KValue> env, std::string var, Type annot,
                       TermPtr body) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Closure;
  n->env = std::move(env);
  n->var = std::move(var);
  n->annot = std::move(annot);
  n->body = std::move(body);
  return KValue(std::move(n));
}

KValue::Kind KValue::kind() const { return node_->kind; }
KValue::BaseKind KValue::base_kind() const { return node_->base_kind; }
std::int64_t KValue::as_int() const { return node_->i; }
bool KValue::as_bool() const { return node_->b; }
const std::string& KValue::as_string() const { return node_->s; }
const std::vector<std::pair<std::string, KValue>>& KValue::fields() const {
  return node_->fields;
}

const KValue* KValue::field(const std::string& label) const {
  for (const auto& [l, v] : fields())
    if (l == label) return &v;
  return nullptr;
}

const std::vector<KValue::Entry>& KValue::entries() const { return node_->entries; }

std::uint64_t KValue::multiplicity(const KValue& elem) const {
  auto it = std::lower_bound(
      node_->entries.begin(), node_->entries.end(), elem,
      [](const Entry& e, const KValue& v) { return compare(e.first, v) < 0; });
  if (it != node_->entries.end() && it->first == elem) return it->second;
  return 0;
}

bool KValue::graph_set_kind() const { return node_->graph_is_set; }
std::size_t KValue::graph_arity() const { return node_->arity; }
const std::vector<KValue::GraphEntry>& KValue::graph_entries() const {
  return node_->graph_entries;
}

std::uint64_t KValue::graph_multiplicity(const std::vector<KValue>& args,
                                         const KValue& out) const {
  for (const auto& [k, m] : node_->graph_entries)
    if (k.second == out && k.first == args) return m;
  return 0;
}

const std::map<std::string, KValue>& KValue::closure_env() const { return node_->env; }
const std::string& KValue::closure_var() const { return node_->var; }
const Type& KValue::closure_annot() const { return node_->annot; }
const TermPtr& KValue::closure_body() const { return node_->body; }

int compare(const KValue& a, const KValue& b) {
  if (a.node_ == b.node_) return 0;
  if (!a.defined() || !b.defined()) return a.defined() ? 1 : (b.defined() ? -1 : 0);
  auto rank = [](KValue::Kind k) { return static_cast<int>(k); };
  if (rank(a.kind()) != rank(b.kind())) return rank(a.kind()) < rank(b.kind()) ? -1 : 1;
  switch (a.kind()) {
    case KValue::Kind::Base: {
      auto brank = [](KValue::BaseKind k) { return static_cast<int>(k); };
      if (brank(a.base_kind()) != brank(b.base_kind()))
        return brank(a.base_kind()) < brank(b.base_kind()) ? -1 : 1;
      switch (a.base_kind()) {
        case KValue::BaseKind::Bool:
          return a.as_bool() == b.as_bool() ? 0 : (a.as_bool() < b.as_bool() ? -1 : 1);
        case KValue::BaseKind::Int:
          return a.as_int() == b.as_int() ? 0 : (a.as_int() < b.as_int() ? -1 : 1);
        case KValue::BaseKind::String:
          return a.as_string().compare(b.as_string()) < 0
                     ? -1
                     : (a.as_string() == b.as_string() ? 0 : 1);
      }
      return 0;
    }
    case KValue::Kind::Record: {
      if (a.fields().size() != b.fields().size())
        return a.fields().size() < b.fields().size() ? -1 : 1;
      for (size_t i = 0; i < a.fields().size(); ++i) {
        if (a.fields()[i].first != b.fields()[i].first)
          return a.fields()[i].first < b.fields()[i].first ? -1 : 1;
        if (int c = compare(a.fields()[i].second, b.fields()[i].second)) return c;
      }
      return 0;
    }
    case KValue::Kind::Set:
    case KValue::Kind::Bag: {
      if (a.entries().size() != b.entries().size())
        return a.entries().size() < b.entries().size() ? -1 : 1;
      for (size_t i = 0; i < a.entries().size(); ++i) {
        if (int c = compare(a.entries()[i].first, b.entries()[i].first)) return c;
        if (a.entries()[i].second != b.entries()[i].second)
          return a.entries()[i].second < b.entries()[i].second ? -1 : 1;
      }
      return 0;
    }
    case KValue::Kind::Graph: {
      if (a.graph_set_kind() != b.graph_set_kind()) return a.graph_set_kind() ? -1 : 1;
      if (a.graph_arity() != b.graph_arity())
        return a.graph_arity() < b.graph_arity() ? -1 : 1;
      const auto& ea = a.graph_entries();
      const auto& eb = b.graph_entries();
      if (ea.size() != eb.size()) return ea.size() < eb.size() ? -1 : 1;
      for (size_t i = 0; i < ea.size(); ++i) {
        if (ea[i].first.first.size() != eb[i].first.first.size())
          return ea[i].first.first.size() < eb[i].first.first.size() ? -1 : 1;
        for (size_t j = 0; j < ea[i].first.first.size(); ++j)
          if (int c = compare(ea[i].first.first[j], eb[i].first.first[j])) return c;
        if (int c = compare(ea[i].first.second, eb[i].first.second)) return c;
        if (ea[i].second != eb[i].second) return ea[i].second < eb[i].second ? -1 : 1;
      }
      return 0;
    }
    case KValue::Kind::Closure: {
      if (a.closure_var() != b.closure_var())
        return a.closure_var() < b.closure_var() ? -1 : 1;
      if (int c = term_compare(a.closure_body(), b.closure_body())) return c;
      auto ita = a.closure_env().begin();
      auto itb = b.closure_env().begin();
      for (; ita != a.closure_env().end() && itb != b.closure_env().end(); ++ita, ++itb) {
        if (ita->first != itb->first) return ita->first < itb->first ? -1 : 1;
        if (int c = compare(ita->second, itb->second)) return c;
      }
      if (ita != a.closure_env().end()) return 1;
      if (itb != b.closure_env().end()) return -1;
      return 0;
    }
  }
  return 0;
}

std::string KValue::show() const {
  if (!defined()) return "<undef>";
  std::ostringstream os;
  switch (kind()) {
    case Kind::Base:
      switch (base_kind()) {
        case BaseKind::Bool: os << (as_bool() ? "true" : "false"); break;
        case BaseKind::Int: os << as_int(); break;
        case BaseKind::String: os << '"' << as_string() << '"'; break;
      }
      break;
    case Kind::Record: {
      os << "(";
      bool first = true;
      for (const auto& [l, v] : fields()) {
        if (!first) os << ", ";
        first = false;
        os << l << "=" << v.show();
      }
      os << ")";
      break;
    }
    case Kind::Set:
    case Kind::Bag: {
      os << (kind() == Kind::Set ? "{" : "[");
      bool first = true;
      for (const auto& [v, m] : entries()) {
        if (!first) os << ", ";
        first = false;
        os << v.show();
        if (m != 1) os << "*" << m;
      }
      os << (kind() == Kind::Set ? "}" : "]");
      break;
    }
    case Kind::Graph: {
      os << (graph_set_kind() ? "graph_set{" : "graph_bag{");
      bool first = true;
      for (const auto& [k, m] : graph_entries()) {
        if (!first) os << ", ";
        first = false;
        os << "(";
        for (size_t i = 0; i < k.first.size(); ++i) {
          if (i) os << ", ";
          os << k.first[i].show();
        }
        os << ") -> " << k.second.show();
        if (m != 1) os << "*" << m;
      }
      os << "}";
      break;
    }
    case Kind::Closure:
      os << "<closure " << closure_var() << ">";
      break;
  }
  return os.str();
}

void CollectionBuilder::add(const KValue& v, std::uint64_t mult) {
  if (mult) acc_[v] += mult;
}

KValue CollectionBuilder::finish_set() && {
  std::vector<KValue::Entry> es(acc_.begin(), acc_.end());
  return KValue::set(std::move(es));
}

KValue CollectionBuilder::finish_bag() && {
  std::vector<KValue::Entry> es(acc_.begin(), acc_.end());
  return KValue::bag(std::move(es));
}

}  // namespace nrcq
