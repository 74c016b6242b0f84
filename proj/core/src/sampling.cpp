#include "powl/sampling.hpp"

#include <map>
#include <random>

#include "powl/error.hpp"

namespace powl2 {

namespace {

constexpr double kMaxInterleavingStates = 200000;
constexpr std::size_t kMaxWalkSteps = 1'000'000;

class Sampler {
 public:
  Sampler(std::uint64_t seed, double p_redo) : rng_(seed), p_redo_(p_redo) {}

  void run(const Node& node, Trace& out) {
    if (auto a = node.as<Activity>()) {
      out.push_back(a->label);
    } else if (node.is<Silent>()) {
      return;
    } else if (auto loop = node.as<Loop>()) {
      std::geometric_distribution<std::size_t> redos(1.0 - p_redo_);
      std::size_t rounds = redos(rng_);
      run(*loop->body, out);
      for (std::size_t r = 0; r < rounds; ++r) {
        run(*loop->redo, out);
        run(*loop->body, out);
      }
    } else if (auto po = node.as<PartialOrder>()) {
      interleave(*po, out);
    } else {
      walk(*node.as<ChoiceGraph>(), out);
    }
  }

 private:
  std::mt19937_64 rng_;
  double p_redo_;

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

  void walk(const ChoiceGraph& graph, Trace& out) {
    std::map<NodeRef, std::vector<NodeRef>> next;
    for (const auto& [from, to] : graph.edges) next[from].push_back(to);
    NodeRef at = NodeRef::start();
    for (std::size_t step = 0; step < kMaxWalkSteps; ++step) {
      const auto& options = next[at];
      if (options.empty()) throw ContractError("choice graph has a vertex without successors");
      at = options[pick(options.size())];
      if (at.is_end()) return;
      run(*graph.children[at.index()], out);
    }
    throw ContractError("choice graph walk did not reach End");
  }

  static bool enabled(const PartialOrder& po, const std::vector<Trace>& parts, const std::vector<std::size_t>& pos,
                      std::size_t i) {
    if (pos[i] == parts[i].size()) return false;
    for (std::size_t p = 0; p < parts.size(); ++p) {
      if (po.order.contains(p, i) && pos[p] != parts[p].size()) return false;
    }
    return true;
  }

  // Number of interleavings completing the given position vector.
  double completions(const PartialOrder& po, const std::vector<Trace>& parts, std::vector<std::size_t>& pos,
                     std::map<std::vector<std::size_t>, double>& memo) {
    if (auto it = memo.find(pos); it != memo.end()) return it->second;
    double total = 0;
    bool finished = true;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (pos[i] != parts[i].size()) finished = false;
      if (!enabled(po, parts, pos, i)) continue;
      ++pos[i];
      total += completions(po, parts, pos, memo);
      --pos[i];
    }
    if (finished) total = 1;
    memo.emplace(pos, total);
    return total;
  }

  void interleave(const PartialOrder& po, Trace& out) {
    const std::size_t n = po.children.size();
    std::vector<Trace> parts(n);
    for (std::size_t i = 0; i < n; ++i) run(*po.children[i], parts[i]);

    double states = 1;
    for (const auto& p : parts) states *= static_cast<double>(p.size() + 1);
    const bool exact = states <= kMaxInterleavingStates;

    std::map<std::vector<std::size_t>, double> memo;
    std::vector<std::size_t> pos(n, 0);
    std::vector<std::size_t> candidates;
    std::vector<double> weights;
    while (true) {
      candidates.clear();
      weights.clear();
      for (std::size_t i = 0; i < n; ++i) {
        if (!enabled(po, parts, pos, i)) continue;
        candidates.push_back(i);
        if (exact) {
          ++pos[i];
          weights.push_back(completions(po, parts, pos, memo));
          --pos[i];
        } else {
          weights.push_back(1.0);
        }
      }
      if (candidates.empty()) break;
      std::discrete_distribution<std::size_t> choose(weights.begin(), weights.end());
      std::size_t i = candidates[choose(rng_)];
      out.push_back(parts[i][pos[i]++]);
    }
  }
};

}  // namespace

EventLog sample_traces(const Node& model, const SamplingOptions& options) {
  if (!(options.p_redo >= 0.0 && options.p_redo < 1.0)) throw ContractError("p_redo must lie in [0,1)");
  Sampler sampler(options.seed, options.p_redo);
  EventLog log;
  for (std::size_t i = 0; i < options.traces; ++i) {
    Trace t;
    sampler.run(model, t);
    log.add(std::move(t));
  }
  return log;
}

}  // namespace powl2
