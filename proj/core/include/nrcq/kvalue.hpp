#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "nrcq/term.hpp"
#include "nrcq/type.hpp"

namespace nrcq {

/// Canonical semantic values. Collections are finitely supported maps from
/// values to multiplicities: {0,1} for sets, positive naturals for bags.
/// Values admit a total order (base < record < set < bag < graph < closure)
/// so they can serve as map keys; collections store their support sorted.
class KValue {
 public:
  enum class Kind { Base, Record, Set, Bag, Graph, Closure };
  enum class BaseKind { Bool, Int, String };

  using Entry = std::pair<KValue, std::uint64_t>;
  using GraphEntry = std::pair<std::pair<std::vector<KValue>, KValue>, std::uint64_t>;

  KValue() = default;

  static KValue integer(std::int64_t v);
  static KValue boolean(bool v);
  static KValue string(std::string v);
  /// Fields are sorted canonically by label.
  static KValue record(std::vector<std::pair<std::string, KValue>> fields);
  /// Entries with zero multiplicity are dropped; set multiplicities clamp to 1.
  static KValue set(std::vector<Entry> entries);
  static KValue bag(std::vector<Entry> entries);
  static KValue graph(bool set_kind, std::size_t arity, std::vector<GraphEntry> entries);
  static KValue closure(std::map<std::string, KValue> env, std::string var, Type annot,
                        TermPtr body);

  bool defined() const { return node_ != nullptr; }
  Kind kind() const;
  BaseKind base_kind() const;
  std::int64_t as_int() const;
  bool as_bool() const;
  const std::string& as_string() const;
  const std::vector<std::pair<std::string, KValue>>& fields() const;
  const KValue* field(const std::string& label) const;
  const std::vector<Entry>& entries() const;          // Set/Bag
  std::uint64_t multiplicity(const KValue& elem) const;
  bool graph_set_kind() const;
  std::size_t graph_arity() const;
  const std::vector<GraphEntry>& graph_entries() const;
  std::uint64_t graph_multiplicity(const std::vector<KValue>& args, const KValue& out) const;
  const std::map<std::string, KValue>& closure_env() const;
  const std::string& closure_var() const;
  const Type& closure_annot() const;
  const TermPtr& closure_body() const;

  bool is_collection() const {
    return defined() && (kind() == Kind::Set || kind() == Kind::Bag);
  }

  std::string show() const;

  friend int compare(const KValue& a, const KValue& b);
  friend bool operator==(const KValue& a, const KValue& b) { return compare(a, b) == 0; }
  friend bool operator!=(const KValue& a, const KValue& b) { return compare(a, b) != 0; }
  friend bool operator<(const KValue& a, const KValue& b) { return compare(a, b) < 0; }

 private:
  struct Node;
  explicit KValue(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Accumulates (value, multiplicity) pairs; `finish_set` collapses to 0/1.
class CollectionBuilder {
 public:
  void add(const KValue& v, std::uint64_t mult);
  KValue finish_set() &&;
  KValue finish_bag() &&;

 private:
  std::map<KValue, std::uint64_t> acc_;
};

/// Truncated subtraction on multiplicities.
inline std::uint64_t monus(std::uint64_t m, std::uint64_t n) { return m > n ? m - n : 0; }

}  // namespace nrcq
