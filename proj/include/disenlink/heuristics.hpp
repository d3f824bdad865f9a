#pragma once

#include <cstdint>

#include "disenlink/graph.hpp"

namespace disenlink {

/// |N(u) ∩ N(v)| over the given (training) graph.
int64_t common_neighbors(const AttributedGraph& graph, int32_t u, int32_t v);

/// Σ over shared neighbors w of 1/ln(deg(w)); a shared neighbor always has
/// degree >= 2, so the logarithm is positive.
double adamic_adar(const AttributedGraph& graph, int32_t u, int32_t v);

}  // namespace disenlink
