#pragma once

#include <string>
#include <string_view>

#include "hypsearch/ast.hpp"

namespace hypsearch {

// Parses the three-section component text:
//
//   component <activation|preprocessor|regularizer> "<name>"
//   param <ident> = <decimal>        (zero or more)
//   expr <expression>
//
// `#` starts a comment that runs to end of line. Identifiers that match a
// declared param become parameter nodes; anything else becomes a variable
// node and must be legal for the declared kind.
//
// Throws Error with code SyntaxError, UnknownFunction, IllegalVariable,
// DuplicateParam, or MissingDefault; position() is the byte offset into
// `text`.
HypothesisProgram parse(const std::string& text);

namespace detail {
// Syntax-only parse: variable nodes are not checked against the declared
// kind (the validator re-checks them against the requested kind).
HypothesisProgram parse_lenient(const std::string& text);
}  // namespace detail

}  // namespace hypsearch
