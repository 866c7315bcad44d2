#pragma once

#include <stdexcept>
#include <string>

#include "nrcq/signature.hpp"
#include "nrcq/term.hpp"

namespace nrcq {

struct ParseError : std::runtime_error {
  ParseError(int line, int col, const std::string& msg)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) +
                           ": " + msg),
        line(line),
        col(col) {}
  int line;
  int col;
};

/// Parse a query in the surface grammar (docs/grammar.md) and elaborate it
/// against `sig`: names resolve to binders, tables or primitives; `empty`
/// picks its set/bag form from the operand type; set-typed generators of a
/// bag comprehension get an implicit promote; equality on records expands
/// fieldwise. Multi-generator `for` desugars to one comprehension with a
/// generator list, `where` to a guard on the head.
TermPtr parse(const std::string& source, const Signature& sig);

/// Parse a type expression, e.g. `{(a:Int, b:String)}`.
Type parse_type(const std::string& source);

}  // namespace nrcq
