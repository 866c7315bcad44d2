#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nrcq/eval.hpp"
#include "nrcq/signature.hpp"
#include "nrcq/term.hpp"

namespace nrcq {

struct CorpusSpec {
  std::uint64_t seed = 0;
  int max_depth = 5;
  int max_rows = 3;
  int domain_size = 4;  // distinct base constants per type
  int count = 100;
  bool flat_only = false;       // restrict to flat-collection result types
  bool require_nested = false;  // require a nested collection in the result
};

/// Fixed schema the generated corpus runs against.
Signature corpus_signature();

/// Deterministic-by-seed store for corpus_signature tables.
TableStore generate_store(std::uint64_t seed, int max_rows, int domain_size);

/// Deterministic stream of closed well-typed nested-relational queries
/// covering the term constructors, biased toward dedup/promote/difference
/// and nested collection heads. Every term is re-typechecked before emission.
std::vector<TermPtr> generate_corpus(const CorpusSpec& spec);

/// Greedy sub-term replacement by typed empty collections and constants,
/// keeping the failure alive.
TermPtr shrink_counterexample(const TermPtr& term, const Signature& sig,
                              const std::function<bool(const TermPtr&)>& still_fails);

struct PropertyFailure {
  TermPtr term;
  std::string what;
};

// Executable statements of the paper-level properties; empty result = holds.
std::optional<std::string> check_normalize_soundness(const TermPtr& term,
                                                     const TableStore& store,
                                                     const Signature& sig);
std::optional<std::string> check_delateralize_theorem(const TermPtr& term,
                                                      const TableStore& store,
                                                      const Signature& sig);
std::optional<std::string> check_sql_oracle_agreement(const TermPtr& term,
                                                      const TableStore& store,
                                                      const Signature& sig);
std::optional<std::string> check_shred_roundtrip(const TermPtr& term,
                                                 const TableStore& store,
                                                 const Signature& sig);

}  // namespace nrcq
