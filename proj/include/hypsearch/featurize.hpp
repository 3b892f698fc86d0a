#pragma once

#include <cstddef>
#include <vector>

#include "hypsearch/ast.hpp"

namespace hypsearch {

// Probe grid shared by featurization and the validator: 41 points, -5 to 5
// in steps of 0.25.
inline constexpr size_t kProbeCount = 41;
inline double probe_point(size_t i) { return (static_cast<double>(i) - 20.0) * 0.25; }

// Layout: 18 operator counts (10 unary, 7 binary, where), depth, node
// count, parameter node count, constant node count, constant mean,
// constant population std, 41 probe values, non-finite flag.
inline constexpr size_t kFeatureCount = 18 + 6 + kProbeCount + 1;

// Probe values clamp to [-10, 10]; NaN and +inf map to 10, -inf to -10,
// any of those sets the trailing flag. Parameters take their defaults and
// preprocessor probes fix (mu, sigma, lo, hi) = (0, 1, -1, 1). Requires a
// program whose variables are legal for its kind.
std::vector<double> featurize(const HypothesisProgram& prog);

// Bindings a probe sweep uses for the non-probe variables of `kind`.
std::vector<std::pair<std::string, double>> probe_bindings(ComponentKind kind);

}  // namespace hypsearch
