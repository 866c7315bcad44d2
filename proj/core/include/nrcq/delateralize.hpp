#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "nrcq/lateral.hpp"
#include "nrcq/normalize.hpp"
#include "nrcq/signature.hpp"
#include "nrcq/term.hpp"

namespace nrcq {

struct DelateralizeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One rewrite: picks the first (preorder) promote/difference generator with
/// a generator-bound free variable, abstracts the latest such variable into
/// a graph over its deduplicated source and applies the graph pointwise.
/// Result is a graph-calculus term. Requires metric > 0.
TermPtr delateralize_step(const TermPtr& term, const Signature& sig, FreshSupply& fresh);

/// Translates graph abstraction/application back to the plain calculus:
/// graphs become collections of column-flattened (input, output) pairs,
/// applications become comprehensions filtering on the input columns.
TermPtr eliminate_graphs(const TermPtr& term, const Signature& sig, FreshSupply& fresh,
                         const TypeEnv& ctx = {});

/// Runs step / eliminate / renormalize until the metric is zero. Each
/// iteration must strictly decrease the metric.
TermPtr delateralize(const TermPtr& term, const Signature& sig, FreshSupply& fresh,
                     std::size_t budget = kDefaultStepBudget);

/// Column labels for the flattened pair encoding of an n-ary graph.
std::string graph_in_label(std::size_t index, std::size_t arity);

}  // namespace nrcq
