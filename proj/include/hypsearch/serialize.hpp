#pragma once

#include <string>

#include "hypsearch/ast.hpp"

namespace hypsearch {

// Shortest decimal string that round-trips through parsing. Infinities are
// rendered as the overflowing literals "1e999" / "-1e999"; NaN is not
// representable in the DSL.
std::string format_double(double value);

std::string serialize_expr(const Expr& expr);

// Canonical text: component line, param lines ordered by first use in the
// serialized expression (unused params keep declaration order at the end),
// one expr line, trailing newline. parse(serialize(p)) is structurally
// identical to p.
std::string serialize(const HypothesisProgram& prog);

}  // namespace hypsearch
