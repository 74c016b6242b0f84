#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace powl2 {

// Index into an ActivityTable. The silent step is never an activity.
struct ActivityId {
  std::uint32_t value{};
  friend constexpr auto operator<=>(ActivityId, ActivityId) = default;
};

}  // namespace powl2

template <>
struct std::hash<powl2::ActivityId> {
  std::size_t operator()(powl2::ActivityId id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};

namespace powl2 {

// Bijective interning of activity labels. One table is the label context for
// a log and every model checked against it.
class ActivityTable {
 public:
  ActivityId intern(std::string_view label);
  std::optional<ActivityId> find(std::string_view label) const;
  const std::string& label(ActivityId id) const;
  std::size_t size() const { return labels_.size(); }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, ActivityId> ids_;
};

using Trace = std::vector<ActivityId>;
using Count = std::uint64_t;
using Edge = std::pair<ActivityId, ActivityId>;

// Multiset of traces. Variants are kept ordered so iteration is deterministic.
class EventLog {
 public:
  using Variants = std::map<Trace, Count>;

  EventLog() = default;
  EventLog(std::initializer_list<std::pair<Trace, Count>> variants);

  // count must be positive; zero is ignored.
  void add(Trace trace, Count count = 1);

  const Variants& variants() const { return variants_; }
  Count total() const { return total_; }
  std::size_t variant_count() const { return variants_.size(); }
  bool empty() const { return variants_.empty(); }
  Count count(const Trace& trace) const;
  Count event_count() const;

  friend bool operator==(const EventLog&, const EventLog&) = default;

 private:
  Variants variants_;
  Count total_ = 0;
};

// Behavioral abstraction of a log consumed by cut detection.
struct LogStats {
  std::set<ActivityId> alphabet;
  std::set<ActivityId> starts;
  std::set<ActivityId> ends;
  std::map<Edge, Count> dfg;
  // Eventually-follows, never filtered.
  std::set<Edge> ef;
  Count empty_traces = 0;
  Count total_traces = 0;
  std::map<ActivityId, Count> start_freq;
  std::map<ActivityId, Count> end_freq;
  // Set by filter_noise with a positive threshold; relaxes some invariant checks downstream.
  bool noise_filtered = false;

  bool has_dfg_edge(ActivityId from, ActivityId to) const { return dfg.contains({from, to}); }
};

LogStats log_stats(const EventLog& log);

// Relative-to-max filtering of outgoing DFG edges, start and end activities.
// threshold must lie in [0,1]; the per-group maximum always survives.
LogStats filter_noise(const LogStats& stats, double threshold);

// Projects every trace onto keep. Empty projections are retained only when
// keep_empty is set.
EventLog project(const EventLog& log, const std::set<ActivityId>& keep, bool keep_empty);

std::set<ActivityId> alphabet_of(const EventLog& log);

}  // namespace powl2
