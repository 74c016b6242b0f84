#include "powl/wfnet.hpp"

#include <deque>
#include <map>
#include <unordered_map>

#include "powl/error.hpp"

namespace powl2 {

PlaceId WfNet::add_place(std::string name) {
  places_.push_back({std::move(name)});
  return static_cast<PlaceId>(places_.size() - 1);
}

TransitionId WfNet::add_transition(std::string name, std::optional<ActivityId> label, std::vector<PlaceId> inputs,
                                   std::vector<PlaceId> outputs) {
  for (const auto* side : {&inputs, &outputs}) {
    for (PlaceId p : *side) {
      if (p >= places_.size()) throw ContractError("transition references unknown place " + std::to_string(p));
    }
  }
  transitions_.push_back({std::move(name), label, std::move(inputs), std::move(outputs)});
  return static_cast<TransitionId>(transitions_.size() - 1);
}

std::size_t WfNet::arc_count() const {
  std::size_t n = 0;
  for (const auto& t : transitions_) n += t.inputs.size() + t.outputs.size();
  return n;
}

std::size_t MarkingHash::operator()(const Marking& m) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (auto v : m.tokens) {
    h ^= v;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Marking initial_marking(const WfNet& net) {
  Marking m{std::vector<std::uint32_t>(net.places().size(), 0)};
  m.tokens[net.source()] = 1;
  return m;
}

Marking final_marking(const WfNet& net) {
  Marking m{std::vector<std::uint32_t>(net.places().size(), 0)};
  m.tokens[net.sink()] = 1;
  return m;
}

bool is_enabled(const Transition& t, const Marking& m) {
  // Inputs may repeat a place; count demand per place.
  for (std::size_t i = 0; i < t.inputs.size(); ++i) {
    std::uint32_t need = 0;
    for (PlaceId q : t.inputs)
      if (q == t.inputs[i]) ++need;
    if (m.tokens[t.inputs[i]] < need) return false;
  }
  return true;
}

Marking fire(const Transition& t, const Marking& m) {
  Marking out = m;
  for (PlaceId p : t.inputs) --out.tokens[p];
  for (PlaceId p : t.outputs) ++out.tokens[p];
  return out;
}

// ---------------------------------------------------------------------------
// Conversion

namespace {

class NetBuilder {
 public:
  WfNet net;

  // Leaves become one transition from all inputs to all outputs; operators get
  // a single entry and exit place, joined or split silently when needed.
  void build(const Node& node, const std::vector<PlaceId>& inputs, const std::vector<PlaceId>& outputs) {
    if (auto a = node.as<Activity>()) {
      net.add_transition(fresh_transition(), a->label, inputs, outputs);
      return;
    }
    if (node.is<Silent>()) {
      silent(inputs, outputs);
      return;
    }
    PlaceId in = inputs.size() == 1 ? inputs[0] : place();
    if (inputs.size() != 1) silent(inputs, {in});
    PlaceId out = outputs.size() == 1 ? outputs[0] : place();
    if (outputs.size() != 1) silent({out}, outputs);

    if (auto loop = node.as<Loop>()) {
      // The body entry gets its own place: in may be shared with alternatives.
      PlaceId body_in = place(), body_out = place();
      silent({in}, {body_in});
      silent({body_out}, {out});
      build(*loop->body, {body_in}, {body_out});
      build(*loop->redo, {body_out}, {body_in});
    } else if (auto graph = node.as<ChoiceGraph>()) {
      build_choice_graph(*graph, in, out);
    } else {
      build_partial_order(*node.as<PartialOrder>(), in, out);
    }
  }

  PlaceId place() { return net.add_place("p" + std::to_string(net.places().size())); }

 private:
  std::size_t transitions_ = 0;

  std::string fresh_transition() { return "t" + std::to_string(transitions_++); }

  void silent(std::vector<PlaceId> inputs, std::vector<PlaceId> outputs) {
    net.add_transition(fresh_transition(), std::nullopt, std::move(inputs), std::move(outputs));
  }

  // A state machine with one place after each vertex. Leaves consume straight
  // from their predecessors' places; a child whose only successor is End
  // ends in out.
  void build_choice_graph(const ChoiceGraph& graph, PlaceId in, PlaceId out) {
    const std::size_t n = graph.children.size();
    std::vector<std::vector<NodeRef>> preds(n);
    std::vector<bool> only_to_end(n, true);
    for (const auto& [from, to] : graph.edges) {
      if (!to.is_end()) preds[to.index()].push_back(from);
      if (!from.is_start() && !to.is_end()) only_to_end[from.index()] = false;
    }
    std::vector<PlaceId> after(n);
    for (std::size_t i = 0; i < n; ++i) after[i] = only_to_end[i] ? out : place();
    auto place_of = [&](NodeRef v) { return v.is_start() ? in : after[v.index()]; };

    for (const auto& [from, to] : graph.edges) {
      if (to.is_end() && place_of(from) != out) silent({place_of(from)}, {out});
    }
    for (std::size_t i = 0; i < n; ++i) {
      const Node& child = *graph.children[i];
      if (child.is<Activity>() || child.is<Silent>()) {
        for (NodeRef u : preds[i]) build(child, {place_of(u)}, {after[i]});
      } else if (preds[i].size() == 1) {
        build(child, {place_of(preds[i][0])}, {after[i]});
      } else {
        PlaceId entry = place();
        for (NodeRef u : preds[i]) silent({place_of(u)}, {entry});
        build(child, {entry}, {after[i]});
      }
    }
  }

  // One place per child without predecessors, per covering pair and per child
  // without successors; children consume and produce these directly.
  void build_partial_order(const PartialOrder& po, PlaceId in, PlaceId out) {
    const std::size_t n = po.children.size();
    std::vector<std::vector<PlaceId>> child_in(n), child_out(n);
    for (auto [i, j] : po.order.reduction().pairs()) {
      PlaceId p = place();
      child_out[i].push_back(p);
      child_in[j].push_back(p);
    }
    std::vector<PlaceId> first, last;
    for (std::size_t i = 0; i < n; ++i) {
      if (child_in[i].empty()) {
        child_in[i].push_back(place());
        first.push_back(child_in[i].back());
      }
      if (child_out[i].empty()) {
        child_out[i].push_back(place());
        last.push_back(child_out[i].back());
      }
    }
    silent({in}, first);
    silent(last, {out});
    for (std::size_t i = 0; i < n; ++i) build(*po.children[i], child_in[i], child_out[i]);
  }
};

}  // namespace

WfNet powl_to_wfnet(const Node& model) {
  auto violations = validate_model(model);
  if (!violations.empty()) {
    throw ContractError("cannot convert an invalid model: " + violations.front().path + ": " + violations.front().message);
  }
  NetBuilder builder;
  PlaceId source = builder.net.add_place("source");
  PlaceId sink = builder.net.add_place("sink");
  builder.net.set_source(source);
  builder.net.set_sink(sink);
  builder.build(model, {source}, {sink});
  return std::move(builder.net);
}

// ---------------------------------------------------------------------------
// Structure

std::vector<Violation> validate_wfnet(const WfNet& net) {
  std::vector<Violation> out;
  const std::size_t np = net.places().size(), nt = net.transitions().size();
  if (np == 0) {
    out.push_back({"net", "net has no places"});
    return out;
  }
  std::vector<std::size_t> in_degree(np, 0), out_degree(np, 0);
  for (const auto& t : net.transitions()) {
    for (PlaceId p : t.inputs) ++out_degree[p];
    for (PlaceId p : t.outputs) ++in_degree[p];
  }
  std::size_t sources = 0, sinks = 0;
  for (std::size_t p = 0; p < np; ++p) {
    if (in_degree[p] == 0) ++sources;
    if (out_degree[p] == 0) ++sinks;
  }
  if (in_degree[net.source()] != 0) out.push_back({net.places()[net.source()].name, "source place has incoming arcs"});
  if (out_degree[net.sink()] != 0) out.push_back({net.places()[net.sink()].name, "sink place has outgoing arcs"});
  if (sources != 1 || in_degree[net.source()] != 0) out.push_back({"net", "source not unique"});
  if (sinks != 1 || out_degree[net.sink()] != 0) out.push_back({"net", "sink not unique"});

  // Vertices: places 0..np-1, transitions np..np+nt-1.
  std::vector<std::vector<std::size_t>> fwd(np + nt), bwd(np + nt);
  for (std::size_t t = 0; t < nt; ++t) {
    for (PlaceId p : net.transitions()[t].inputs) {
      fwd[p].push_back(np + t);
      bwd[np + t].push_back(p);
    }
    for (PlaceId p : net.transitions()[t].outputs) {
      fwd[np + t].push_back(p);
      bwd[p].push_back(np + t);
    }
  }
  auto reach = [](const std::vector<std::vector<std::size_t>>& adj, std::size_t from) {
    std::vector<bool> seen(adj.size(), false);
    std::deque<std::size_t> queue{from};
    seen[from] = true;
    while (!queue.empty()) {
      auto v = queue.front();
      queue.pop_front();
      for (auto w : adj[v])
        if (!seen[w]) {
          seen[w] = true;
          queue.push_back(w);
        }
    }
    return seen;
  };
  auto from_source = reach(fwd, net.source());
  auto to_sink = reach(bwd, net.sink());
  for (std::size_t v = 0; v < np + nt; ++v) {
    if (from_source[v] && to_sink[v]) continue;
    std::string name = v < np ? net.places()[v].name : net.transitions()[v - np].name;
    out.push_back({name, "not on source-sink path"});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Behaviour

namespace {

class Deadline {
 public:
  explicit Deadline(std::chrono::milliseconds budget) : end_(std::chrono::steady_clock::now() + budget) {}
  bool passed() const { return std::chrono::steady_clock::now() > end_; }

 private:
  std::chrono::steady_clock::time_point end_;
};

std::string describe(const WfNet& net, const Marking& m) {
  std::string out = "[";
  bool first = true;
  for (std::size_t p = 0; p < m.tokens.size(); ++p) {
    if (m.tokens[p] == 0) continue;
    if (!first) out += ",";
    first = false;
    out += net.places()[p].name;
    if (m.tokens[p] > 1) out += "^" + std::to_string(m.tokens[p]);
  }
  return out + "]";
}

}  // namespace

SoundnessVerdict check_soundness(const WfNet& net, const NetLimits& limits) {
  SoundnessVerdict verdict;
  auto violations = validate_wfnet(net);
  if (!violations.empty()) {
    verdict.status = SoundnessVerdict::Status::kUnsound;
    verdict.reason = "not a workflow net: " + violations.front().path + " " + violations.front().message;
    return verdict;
  }

  Deadline deadline(limits.max_time);
  std::unordered_map<Marking, std::size_t, MarkingHash> index;
  std::vector<Marking> markings;
  std::vector<std::vector<std::size_t>> predecessors;
  std::vector<bool> fired(net.transitions().size(), false);

  auto intern = [&](Marking m) -> std::pair<std::size_t, bool> {
    auto [it, inserted] = index.try_emplace(m, markings.size());
    if (inserted) {
      markings.push_back(std::move(m));
      predecessors.emplace_back();
    }
    return {it->second, inserted};
  };

  std::deque<std::size_t> queue{intern(initial_marking(net)).first};
  while (!queue.empty()) {
    if (markings.size() > limits.max_markings || deadline.passed()) {
      verdict.status = SoundnessVerdict::Status::kInconclusive;
      verdict.reason = "state-space limits reached";
      verdict.markings = markings.size();
      return verdict;
    }
    std::size_t at = queue.front();
    queue.pop_front();
    for (std::size_t t = 0; t < net.transitions().size(); ++t) {
      const auto& tr = net.transitions()[t];
      if (!is_enabled(tr, markings[at])) continue;
      fired[t] = true;
      auto [next, inserted] = intern(fire(tr, markings[at]));
      predecessors[next].push_back(at);
      if (inserted) queue.push_back(next);
    }
  }
  verdict.markings = markings.size();

  const Marking done = final_marking(net);
  for (const auto& m : markings) {
    if (m.tokens[net.sink()] > 0 && m != done) {
      verdict.status = SoundnessVerdict::Status::kUnsound;
      verdict.reason = "improper completion at marking " + describe(net, m);
      return verdict;
    }
  }
  auto final_it = index.find(done);
  if (final_it == index.end()) {
    verdict.status = SoundnessVerdict::Status::kUnsound;
    verdict.reason = "final marking unreachable";
    return verdict;
  }
  std::vector<bool> can_finish(markings.size(), false);
  std::deque<std::size_t> back{final_it->second};
  can_finish[final_it->second] = true;
  while (!back.empty()) {
    auto v = back.front();
    back.pop_front();
    for (auto u : predecessors[v])
      if (!can_finish[u]) {
        can_finish[u] = true;
        back.push_back(u);
      }
  }
  for (std::size_t i = 0; i < markings.size(); ++i) {
    if (!can_finish[i]) {
      verdict.status = SoundnessVerdict::Status::kUnsound;
      verdict.reason = "no option to complete from marking " + describe(net, markings[i]);
      return verdict;
    }
  }
  for (std::size_t t = 0; t < fired.size(); ++t) {
    if (!fired[t]) {
      verdict.status = SoundnessVerdict::Status::kUnsound;
      verdict.reason = "dead transition " + net.transitions()[t].name;
      return verdict;
    }
  }
  verdict.status = SoundnessVerdict::Status::kSound;
  return verdict;
}

NetReplayer::NetReplayer(const WfNet& net, const NetLimits& limits) : net_(net), limits_(limits) {}

NetReplayer::States NetReplayer::close(States states) {
  std::deque<Marking> queue(states.begin(), states.end());
  while (!queue.empty()) {
    if (states.size() > limits_.max_markings) {
      limit_hit_ = true;
      break;
    }
    Marking m = std::move(queue.front());
    queue.pop_front();
    for (const auto& t : net_.transitions()) {
      if (!t.silent() || !is_enabled(t, m)) continue;
      Marking next = fire(t, m);
      if (states.insert(next).second) queue.push_back(std::move(next));
    }
  }
  return states;
}

NetReplayer::States NetReplayer::initial() { return close({initial_marking(net_)}); }

NetReplayer::States NetReplayer::step(const States& from, ActivityId label) {
  States next;
  for (const auto& m : from) {
    for (const auto& t : net_.transitions()) {
      if (t.label == label && is_enabled(t, m)) next.insert(fire(t, m));
    }
  }
  return close(std::move(next));
}

std::set<ActivityId> NetReplayer::enabled_labels(const States& at) const {
  std::set<ActivityId> out;
  for (const auto& m : at)
    for (const auto& t : net_.transitions())
      if (t.label && is_enabled(t, m)) out.insert(*t.label);
  return out;
}

TraceSet net_language(const WfNet& net, std::size_t max_len, const NetLimits& limits) {
  TraceSet out;
  Deadline deadline(limits.max_time);
  NetReplayer replayer(net, limits);
  const Marking done = final_marking(net);
  std::size_t explored = 0;

  std::deque<std::pair<Trace, NetReplayer::States>> queue;
  queue.emplace_back(Trace{}, replayer.initial());
  while (!queue.empty()) {
    if (explored > limits.max_markings || deadline.passed()) {
      out.truncated = true;
      break;
    }
    auto [prefix, states] = std::move(queue.front());
    queue.pop_front();
    explored += states.size();
    if (states.contains(done)) out.traces.insert(prefix);
    auto labels = replayer.enabled_labels(states);
    if (labels.empty()) continue;
    if (prefix.size() == max_len) {
      out.truncated = true;
      continue;
    }
    for (ActivityId a : labels) {
      auto next = replayer.step(states, a);
      if (next.empty()) continue;
      Trace longer = prefix;
      longer.push_back(a);
      queue.emplace_back(std::move(longer), std::move(next));
    }
  }
  out.truncated |= replayer.limit_hit();
  return out;
}

}  // namespace powl2
