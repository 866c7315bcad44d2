#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nrcq/signature.hpp"
#include "nrcq/term.hpp"
#include "nrcq/typecheck.hpp"

namespace nrcq {

struct RewriteStep {
  std::string rule;
  TermPtr result;
};

struct NormalizeBudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultStepBudget = 100000;

/// Fires exactly one rule at the leftmost-outermost redex (rules tried at a
/// node before its children; generators before the head). Returns nothing
/// when the term is already in normal form.
std::optional<RewriteStep> rewrite_step(const TermPtr& term, const Signature& sig,
                                        FreshSupply& fresh, const TypeEnv& ctx = {});

/// Fixpoint of rewrite_step. The budget is a loud safety valve, not a tuning
/// knob: hitting it means a rule bug.
TermPtr normalize(const TermPtr& term, const Signature& sig, FreshSupply& fresh,
                  std::size_t budget = kDefaultStepBudget,
                  std::vector<RewriteStep>* trace = nullptr, const TypeEnv& ctx = {});

}  // namespace nrcq
