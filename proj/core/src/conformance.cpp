#include "powl/conformance.hpp"

#include <algorithm>
#include <future>
#include <map>

#include "json.hpp"
#include "powl/error.hpp"
#include "powl/language.hpp"

namespace powl2 {

std::vector<TraceFit> trace_fitness(const EventLog& log, const Node& model, unsigned threads) {
  std::vector<TraceFit> out;
  out.reserve(log.variant_count());
  for (const auto& [trace, count] : log.variants()) out.push_back({trace, count, false});

  auto check_range = [&model, &out](std::size_t begin, std::size_t end) {
    MembershipChecker checker(model);
    for (std::size_t i = begin; i < end; ++i) out[i].fits = checker.accepts(out[i].trace);
  };
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(out.size(), 1));
  if (workers == 1) {
    check_range(0, out.size());
    return out;
  }
  std::vector<std::future<void>> pending;
  const std::size_t chunk = (out.size() + workers - 1) / workers;
  for (std::size_t begin = 0; begin < out.size(); begin += chunk) {
    pending.push_back(std::async(std::launch::async, check_range, begin, std::min(out.size(), begin + chunk)));
  }
  for (auto& f : pending) f.get();
  return out;
}

namespace {

double weighted_fitness(const std::vector<TraceFit>& fits) {
  Count fitting = 0, total = 0;
  for (const auto& f : fits) {
    total += f.count;
    if (f.fits) fitting += f.count;
  }
  if (total == 0) throw InputError("fitness of an empty log is undefined");
  return static_cast<double>(fitting) / static_cast<double>(total);
}

struct PrefixNode {
  Count weight = 0;
  std::map<ActivityId, std::size_t> next;
};

}  // namespace

double fitness(const EventLog& log, const Node& model, unsigned threads) {
  return weighted_fitness(trace_fitness(log, model, threads));
}

PrecisionResult precision(const EventLog& log, const WfNet& net, const NetLimits& limits) {
  std::vector<PrefixNode> trie(1);
  for (const auto& [trace, count] : log.variants()) {
    std::size_t at = 0;
    trie[at].weight += count;
    for (ActivityId a : trace) {
      auto it = trie[at].next.find(a);
      if (it == trie[at].next.end()) {
        trie.emplace_back();
        it = trie[at].next.emplace(a, trie.size() - 1).first;
      }
      at = it->second;
      trie[at].weight += count;
    }
  }

  NetReplayer replayer(net, limits);
  PrecisionResult result;
  double escaping = 0.0, enabled_total = 0.0;

  // Depth-first over the trie; a prefix that fails to replay takes its subtree with it.
  std::vector<std::pair<std::size_t, NetReplayer::States>> stack;
  stack.emplace_back(0, replayer.initial());
  auto subtree_size = [&trie](std::size_t root) {
    std::size_t n = 0;
    std::vector<std::size_t> todo{root};
    while (!todo.empty()) {
      auto v = todo.back();
      todo.pop_back();
      ++n;
      for (const auto& [a, w] : trie[v].next) todo.push_back(w);
    }
    return n;
  };
  while (!stack.empty()) {
    auto [node, states] = std::move(stack.back());
    stack.pop_back();
    const auto model_enabled = replayer.enabled_labels(states);
    const double w = static_cast<double>(trie[node].weight);
    std::size_t escapes = 0;
    for (ActivityId a : model_enabled)
      if (!trie[node].next.contains(a)) ++escapes;
    escaping += w * static_cast<double>(escapes);
    enabled_total += w * static_cast<double>(model_enabled.size());
    for (const auto& [a, child] : trie[node].next) {
      auto next = replayer.step(states, a);
      if (next.empty()) {
        result.skipped_prefixes += subtree_size(child);
        continue;
      }
      stack.emplace_back(child, std::move(next));
    }
  }
  result.limit_hit = replayer.limit_hit();
  if (enabled_total == 0.0) throw UndefinedMetricError("precision is undefined: no replayable prefix enables an activity");
  result.value = 1.0 - escaping / enabled_total;
  return result;
}

double f_score(double fitness, double precision) {
  auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!in_unit(fitness) || !in_unit(precision)) throw ContractError("f_score arguments must lie in [0,1]");
  if (fitness + precision == 0.0) return 0.0;
  return 2.0 * fitness * precision / (fitness + precision);
}

ConformanceReport evaluate(const EventLog& log, const Node& model, const NetLimits& limits, unsigned threads) {
  ConformanceReport report;
  report.per_trace = trace_fitness(log, model, threads);
  report.fitness = weighted_fitness(report.per_trace);
  const WfNet net = powl_to_wfnet(model);
  try {
    auto p = precision(log, net, limits);
    report.precision = p.value;
    report.f_score = f_score(report.fitness, p.value);
    report.skipped_prefixes = p.skipped_prefixes;
    report.limit_hit = p.limit_hit;
  } catch (const UndefinedMetricError&) {
  }
  return report;
}

std::string report_to_json(const ConformanceReport& report, const ActivityTable& activities) {
  nlohmann::ordered_json j;
  j["fitness"] = report.fitness;
  j["precision"] = report.precision ? nlohmann::ordered_json(*report.precision) : nlohmann::ordered_json();
  j["f_score"] = report.f_score ? nlohmann::ordered_json(*report.f_score) : nlohmann::ordered_json();
  j["skipped_prefixes"] = report.skipped_prefixes;
  j["limit_hit"] = report.limit_hit;
  auto& traces = j["per_trace"] = nlohmann::ordered_json::array();
  for (const auto& fit : report.per_trace) {
    nlohmann::ordered_json labels = nlohmann::ordered_json::array();
    for (ActivityId a : fit.trace) labels.push_back(activities.label(a));
    traces.push_back({{"trace", labels}, {"count", fit.count}, {"fits", fit.fits}});
  }
  return j.dump(2) + "\n";
}

}  // namespace powl2
