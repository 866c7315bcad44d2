#pragma once

#include <optional>
#include <string>

#include "nrcq/signature.hpp"
#include "nrcq/term.hpp"
#include "nrcq/typecheck.hpp"

namespace nrcq {

enum class NFTag { BaseX, RecordM, SetQ, BagR, ComprC, ComprD, GenF, GenG, StarredFlat };

struct NormalForm {
  NFTag tag;
  TermPtr term;
};

struct NFFailure {
  std::string position;  // path to the first offending subterm
  std::string reason;
  TermPtr subterm;
};

/// Classifies `term` against the normal-form grammar for nested relational
/// types, reading standardized spellings both ways: the empty collection is
/// the zero-branch union, a guardless comprehension carries a true guard,
/// bare singletons and bare generator forms (tables, dedup'd tables,
/// promotions, bag differences) are trivial comprehensions.
std::optional<NormalForm> is_normal_form(const TermPtr& term, const Signature& sig,
                                         const TypeEnv& ctx = {},
                                         NFFailure* failure = nullptr);

std::string show(NFTag tag);

}  // namespace nrcq
