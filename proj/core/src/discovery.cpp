#include "powl/discovery.hpp"

#include <algorithm>
#include <future>
#include <map>

#include "powl/error.hpp"
#include "powl/reduce.hpp"

namespace powl2 {

namespace {

// Sub-logs are mined concurrently only this close to the root.
constexpr int kParallelDepth = 2;

class Miner {
 public:
  explicit Miner(const DiscoveryConfig& config) : config_(config) {}

  NodePtr mine(const EventLog& log, int depth) {
    const LogStats raw = log_stats(log);
    if (auto base = find_base_case(raw, log)) return *base;
    const LogStats stats = filter_noise(raw, config_.noise_threshold);
    const bool lenient = stats.noise_filtered;

    Partition partition = mine_choice_partition(stats);
    if (auto cut = build_choice_graph_cut(stats, partition)) {
      auto children = mine_all(split_by_cut(log, *cut, lenient), depth);
      return make_choice_graph(std::move(children), cut->edges);
    }

    if (raw.empty_traces > 0) return empty_traces_fall_through(log, depth);

    if (auto cut = find_loop_cut(stats)) {
      auto children = mine_all(split_by_cut(log, *cut, lenient), depth);
      return make_loop(children[0], children[1]);
    }

    if (auto cut = find_partial_order_cut(raw)) {
      auto children = mine_all(split_by_cut(log, *cut, lenient), depth);
      return make_partial_order(std::move(children), cut->order);
    }

    return fall_through_after_cuts(log, stats, depth);
  }

  NodePtr fall_through(const EventLog& log, const LogStats& stats, int depth) {
    if (stats.empty_traces > 0) return empty_traces_fall_through(log, depth);
    return fall_through_after_cuts(log, stats, depth);
  }

 private:
  DiscoveryConfig config_;

  std::vector<NodePtr> mine_all(const std::vector<SubLog>& subs, int depth) {
    std::vector<NodePtr> out(subs.size());
    if (config_.threads > 1 && depth < kParallelDepth && subs.size() > 1) {
      std::vector<std::future<NodePtr>> pending;
      for (const auto& sub : subs) {
        pending.push_back(std::async(std::launch::async, [this, &sub, depth] { return mine_checked(sub.log, depth + 1); }));
      }
      for (std::size_t i = 0; i < subs.size(); ++i) out[subs[i].slot] = pending[i].get();
    } else {
      for (const auto& sub : subs) out[sub.slot] = mine_checked(sub.log, depth + 1);
    }
    return out;
  }

  NodePtr mine_checked(const EventLog& log, int depth) {
    if (log.empty()) return make_silent();
    return mine(log, depth);
  }

  NodePtr empty_traces_fall_through(const EventLog& log, int depth) {
    EventLog rest;
    for (const auto& [trace, count] : log.variants())
      if (!trace.empty()) rest.add(trace, count);
    return make_exclusive_choice({make_silent(), mine_checked(rest, depth + 1)});
  }

  NodePtr fall_through_after_cuts(const EventLog& log, const LogStats& stats, int depth) {
    switch (select_fall_through(log, stats)) {
      case FallThroughKind::kEmptyTraces:
        return empty_traces_fall_through(log, depth);
      case FallThroughKind::kActivityOncePerTrace: {
        ActivityId a = *once_per_trace(log, stats);
        Part rest = stats.alphabet;
        rest.erase(a);
        NodePtr others = mine_checked(project(log, rest, true), depth + 1);
        return make_partial_order({make_activity(a), std::move(others)}, std::vector<Relation::Pair>{});
      }
      case FallThroughKind::kStrictTauLoop:
        return make_loop(mine_checked(split_strict_tau_loop(log, stats), depth + 1), make_silent());
      case FallThroughKind::kFlower:
        break;
    }
    std::vector<NodePtr> activities;
    for (ActivityId a : stats.alphabet) activities.push_back(make_activity(a));
    if (activities.size() == 1) return make_loop(make_silent(), activities.front());
    return make_loop(make_silent(), make_exclusive_choice(std::move(activities)));
  }

 public:
  static std::optional<ActivityId> once_per_trace(const EventLog& log, const LogStats& stats) {
    for (ActivityId a : stats.alphabet) {
      bool once = true;
      for (const auto& [trace, count] : log.variants()) {
        if (std::count(trace.begin(), trace.end(), a) != 1) {
          once = false;
          break;
        }
      }
      if (once) return a;
    }
    return std::nullopt;
  }

  static EventLog split_strict_tau_loop(const EventLog& log, const LogStats& stats) {
    EventLog out;
    for (const auto& [trace, count] : log.variants()) {
      Trace segment;
      for (std::size_t i = 0; i < trace.size(); ++i) {
        segment.push_back(trace[i]);
        if (i + 1 < trace.size() && stats.ends.contains(trace[i]) && stats.starts.contains(trace[i + 1])) {
          out.add(std::move(segment), count);
          segment.clear();
        }
      }
      out.add(std::move(segment), count);
    }
    return out;
  }
};

}  // namespace

FallThroughKind select_fall_through(const EventLog& log, const LogStats& stats) {
  if (stats.empty_traces > 0) return FallThroughKind::kEmptyTraces;
  if (stats.alphabet.size() > 1 && Miner::once_per_trace(log, stats)) return FallThroughKind::kActivityOncePerTrace;
  if (Miner::split_strict_tau_loop(log, stats) != log) return FallThroughKind::kStrictTauLoop;
  return FallThroughKind::kFlower;
}

NodePtr fall_through(const EventLog& log, const LogStats& stats, const DiscoveryConfig& config) {
  return Miner(config).fall_through(log, stats, 0);
}

NodePtr discover(const EventLog& log, const DiscoveryConfig& config) {
  if (log.empty()) throw InputError("cannot discover a model from an empty log");
  if (!(config.noise_threshold >= 0.0 && config.noise_threshold <= 1.0)) {
    throw ContractError("noise threshold must lie in [0,1]");
  }
  NodePtr model = Miner(config).mine(log, 0);
  return config.apply_reductions ? reduce_model(model) : model;
}

}  // namespace powl2
