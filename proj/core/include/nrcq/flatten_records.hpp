#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nrcq/kvalue.hpp"
#include "nrcq/signature.hpp"
#include "nrcq/term.hpp"

namespace nrcq {

struct FlattenError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Value isomorphism witnessing the flattening of a nested-record element
/// type: forward direction is baked into the rewritten query, the inverse
/// regroups flat rows.
struct RecordFlattening {
  Type original_elem;
  bool identity = false;
  // flat column label <- projection path into the original element
  std::vector<std::pair<std::string, std::vector<std::string>>> columns;

  /// Rebuilds one nested element from a flat row (or passes a base value
  /// through under the identity descriptor).
  KValue unflatten_elem(const KValue& flat) const;

  /// Applies unflatten_elem across a collection, preserving multiplicities.
  KValue unflatten(const KValue& rows, bool set_kind) const;
};

/// Rewrites a query whose element type is a nested record of base types
/// (records in records, no collections) into one producing flat rows with
/// path-joined column labels, plus the descriptor for the inverse. Flat
/// inputs come back unchanged under an identity descriptor. An element type
/// containing a collection is an error: such queries must be shredded.
std::pair<TermPtr, RecordFlattening> flatten_records(const TermPtr& term,
                                                     const Signature& sig,
                                                     FreshSupply& fresh);

}  // namespace nrcq
