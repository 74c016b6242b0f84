#pragma once

#include <string>
#include <string_view>

#include "powl/model.hpp"

namespace powl2 {

// Canonical JSON (sorted keys, two-space indent, closed partial orders, sorted
// pairs and edges). Edge endpoints are "start", "end", or a child index.
std::string serialize_model(const Node& model, const ActivityTable& activities);

// Unknown node kinds and shape mismatches raise SchemaError naming the JSON
// path; malformed JSON raises ParseError. New labels are interned.
NodePtr deserialize_model(std::string_view json, ActivityTable& activities);

// Graphviz rendering: partial-order arcs solid black, choice-graph arcs dashed
// blue, start/end as small markers. No coordinates are emitted.
std::string export_model_dot(const Node& model, const ActivityTable& activities);

}  // namespace powl2
