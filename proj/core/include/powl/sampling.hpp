#pragma once

#include <cstdint>

#include "powl/event_log.hpp"
#include "powl/model.hpp"

namespace powl2 {

struct SamplingOptions {
  std::size_t traces = 100;
  std::uint64_t seed = 0;
  // Probability of one more redo round in a loop; redo counts are geometric.
  double p_redo = 0.3;
};

// Random-walk log generator. Choice-graph successors are picked uniformly,
// partial-order interleavings are drawn uniformly among all interleavings of
// the sampled child traces. Deterministic for a fixed seed. Every trace is in
// the model's language.
EventLog sample_traces(const Node& model, const SamplingOptions& options);

}  // namespace powl2
