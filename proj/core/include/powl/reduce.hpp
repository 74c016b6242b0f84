#pragma once

#include "powl/model.hpp"

namespace powl2 {

// Language-preserving rewrites applied bottom-up until nothing changes:
//  - a choice graph that is a single Start -> ... -> End chain through every
//    child becomes a totally ordered partial order (or the child itself);
//  - choice-graph children sharing predecessor and successor sets are grouped
//    into one nested exclusive-choice child;
//  - a child partial order that is ordered against all of its siblings is
//    flattened into its parent.
NodePtr reduce_model(const NodePtr& model);

}  // namespace powl2
