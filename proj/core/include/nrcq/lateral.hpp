#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nrcq/normal_form.hpp"
#include "nrcq/signature.hpp"
#include "nrcq/term.hpp"

namespace nrcq {

struct LateralOccurrence {
  std::string position;   // path to the offending promote/difference region
  std::string binder;     // latest-bound generator variable occurring in it
  TermPtr subterm;
};

struct LateralReport {
  std::vector<LateralOccurrence> occurrences;
  std::uint64_t metric = 0;
};

/// Delateralization metric: every promote or bag-difference region adds the
/// number of its free variables. Emptiness-test arguments are traversed so
/// correlated subqueries inside guards count too (they would otherwise still
/// force LATERAL in the emitted SQL).
std::uint64_t lateral_metric(const TermPtr& term);

/// Scans a normal form for promote/difference regions that reference
/// generator-bound variables. metric == 0 iff no occurrences on closed
/// normal forms.
LateralReport lateral_report(const TermPtr& term, const Signature& sig);

}  // namespace nrcq
