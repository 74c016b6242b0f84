#pragma once

#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "powl/event_log.hpp"
#include "powl/model.hpp"

namespace powl2 {

using Part = std::set<ActivityId>;

// Disjoint, nonempty parts covering an alphabet, ordered by smallest member.
struct Partition {
  std::vector<Part> parts;

  std::size_t size() const { return parts.size(); }
  // Index of the part containing a; size() if none does.
  std::size_t part_of(ActivityId a) const;
  friend bool operator==(const Partition&, const Partition&) = default;
};

// Edge endpoints index into partition.parts.
struct ChoiceGraphCut {
  Partition partition;
  std::set<ChoiceEdge> edges;
};

struct LoopCut {
  Part body;
  Part redo;
};

// order is a strict partial order over partition indices.
struct PartialOrderCut {
  Partition partition;
  Relation order;
};

struct BaseCase {
  NodePtr node;
};

enum class FallThroughKind { kEmptyTraces, kActivityOncePerTrace, kStrictTauLoop, kFlower };

struct FallThrough {
  FallThroughKind kind;
};

using Cut = std::variant<ChoiceGraphCut, LoopCut, PartialOrderCut, BaseCase, FallThrough>;

struct DiscoveryConfig {
  double noise_threshold = 0.0;
  bool apply_reductions = true;
  // Sibling sub-logs near the root are mined concurrently when > 1. The result
  // does not depend on this value.
  unsigned threads = 1;
};

// Recursive mining. With noise_threshold == 0 every trace of log is in the
// language of the result. An empty log is an InputError.
NodePtr discover(const EventLog& log, const DiscoveryConfig& config = {});

// Silent when every trace is empty; the activity when every trace is exactly
// that one activity.
std::optional<NodePtr> find_base_case(const LogStats& stats, const EventLog& log);

// Strongly connected components of the DFG.
Partition mine_choice_partition(const LogStats& stats);

// The unique edge set forced by the partition, or nothing for fewer than two
// parts. A part off every Start -> End path is an InternalError on raw stats;
// on noise-filtered stats the cut is rejected instead.
std::optional<ChoiceGraphCut> build_choice_graph_cut(const LogStats& stats, const Partition& partition);

std::optional<LoopCut> find_loop_cut(const LogStats& stats);

std::optional<PartialOrderCut> find_partial_order_cut(const LogStats& stats);

struct SubLog {
  EventLog log;
  // Part index for choice-graph and partial-order cuts; 0 = do, 1 = redo for loops.
  std::size_t slot;
};

// Projects a log along a cut. With tolerate_deviations, loop traces that start
// or end outside the body get an empty body segment instead of an error.
std::vector<SubLog> split_by_cut(const EventLog& log, const Cut& cut, bool tolerate_deviations = false);

// First applicable of: empty traces, activity once per trace, strict tau loop,
// flower. Sub-logs are mined with discover's pipeline (no reduction).
NodePtr fall_through(const EventLog& log, const LogStats& stats, const DiscoveryConfig& config);

// Which fall-through fall_through would apply.
FallThroughKind select_fall_through(const EventLog& log, const LogStats& stats);

}  // namespace powl2
