#pragma once

#include "hypsearch/ast.hpp"
#include "hypsearch/rng.hpp"

namespace hypsearch {

// Samples a program from the DSL grammar: tree depth ≤ max_depth, constants
// ~U(-2, 2), 0–2 parameters with defaults in [0.1, 2], variables drawn from
// the kind's legal set. Every sample serializes to parsable text; validity
// beyond grammaticality (finiteness, non-constancy) is not guaranteed.
HypothesisProgram random_program(Rng& rng, ComponentKind kind, int max_depth = 6);

}  // namespace hypsearch
