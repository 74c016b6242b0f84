#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>

#include "powl/discovery.hpp"
#include "powl/error.hpp"

namespace powl2 {

std::size_t Partition::part_of(ActivityId a) const {
  for (std::size_t i = 0; i < parts.size(); ++i)
    if (parts[i].contains(a)) return i;
  return parts.size();
}

namespace {

void sort_parts(std::vector<Part>& parts) {
  std::sort(parts.begin(), parts.end(), [](const Part& x, const Part& y) { return *x.begin() < *y.begin(); });
}

// Union-find over dense indices.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[std::max(a, b)] = std::min(a, b);
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

std::vector<Part> group(const std::vector<Part>& parts, DisjointSets& sets) {
  std::map<std::size_t, Part> merged;
  for (std::size_t i = 0; i < parts.size(); ++i) merged[sets.find(i)].insert(parts[i].begin(), parts[i].end());
  std::vector<Part> out;
  for (auto& [root, part] : merged) out.push_back(std::move(part));
  sort_parts(out);
  return out;
}

}  // namespace

std::optional<NodePtr> find_base_case(const LogStats& stats, const EventLog& log) {
  if (log.empty()) return make_silent();
  if (stats.empty_traces == log.total()) return make_silent();
  if (stats.alphabet.size() != 1) return std::nullopt;
  ActivityId a = *stats.alphabet.begin();
  for (const auto& [trace, count] : log.variants()) {
    if (trace.size() != 1) return std::nullopt;
  }
  return make_activity(a);
}

Partition mine_choice_partition(const LogStats& stats) {
  // Tarjan's algorithm over the DFG restricted to the alphabet.
  std::vector<ActivityId> nodes(stats.alphabet.begin(), stats.alphabet.end());
  std::map<ActivityId, std::size_t> index_of;
  for (std::size_t i = 0; i < nodes.size(); ++i) index_of[nodes[i]] = i;
  std::vector<std::vector<std::size_t>> adj(nodes.size());
  for (const auto& [edge, count] : stats.dfg) {
    auto from = index_of.find(edge.first), to = index_of.find(edge.second);
    if (from != index_of.end() && to != index_of.end()) adj[from->second].push_back(to->second);
  }

  const std::size_t unvisited = nodes.size();
  std::vector<std::size_t> index(nodes.size(), unvisited), low(nodes.size(), 0);
  std::vector<bool> on_stack(nodes.size(), false);
  std::vector<std::size_t> stack;
  std::size_t counter = 0;
  Partition out;

  std::function<void(std::size_t)> connect = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (std::size_t w : adj[v]) {
      if (index[w] == unvisited) {
        connect(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      Part component;
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        component.insert(nodes[w]);
      } while (w != v);
      out.parts.push_back(std::move(component));
    }
  };
  for (std::size_t v = 0; v < nodes.size(); ++v)
    if (index[v] == unvisited) connect(v);
  sort_parts(out.parts);
  return out;
}

std::optional<ChoiceGraphCut> build_choice_graph_cut(const LogStats& stats, const Partition& partition) {
  const std::size_t n = partition.size();
  if (n < 2) return std::nullopt;

  std::map<ActivityId, std::size_t> part;
  for (std::size_t i = 0; i < n; ++i)
    for (ActivityId a : partition.parts[i]) part[a] = i;

  ChoiceGraphCut cut{partition, {}};
  for (const auto& [edge, count] : stats.dfg) {
    std::size_t i = part.at(edge.first), j = part.at(edge.second);
    if (i != j) cut.edges.insert({NodeRef::child(i), NodeRef::child(j)});
  }
  for (ActivityId a : stats.starts) cut.edges.insert({NodeRef::start(), NodeRef::child(part.at(a))});
  for (ActivityId a : stats.ends) cut.edges.insert({NodeRef::child(part.at(a)), NodeRef::end()});
  if (stats.empty_traces > 0) cut.edges.insert({NodeRef::start(), NodeRef::end()});

  // Every part must lie on a Start -> End path.
  std::vector<std::vector<std::size_t>> fwd(n + 2), bwd(n + 2);
  auto vertex = [n](NodeRef r) -> std::size_t { return r.is_start() ? 0 : r.is_end() ? n + 1 : r.index() + 1; };
  for (const auto& [from, to] : cut.edges) {
    fwd[vertex(from)].push_back(vertex(to));
    bwd[vertex(to)].push_back(vertex(from));
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
  auto from_start = reach(fwd, 0);
  auto to_end = reach(bwd, n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (from_start[i + 1] && to_end[i + 1]) continue;
    if (stats.noise_filtered) return std::nullopt;
    throw InternalError("choice graph cut leaves part " + std::to_string(i) + " off every Start-End path");
  }
  return cut;
}

std::optional<LoopCut> find_loop_cut(const LogStats& stats) {
  Part body;
  body.insert(stats.starts.begin(), stats.starts.end());
  body.insert(stats.ends.begin(), stats.ends.end());
  if (body.empty() || body.size() >= stats.alphabet.size()) return std::nullopt;

  // Connected components of the DFG (undirected) outside the body.
  std::vector<ActivityId> rest;
  for (ActivityId a : stats.alphabet)
    if (!body.contains(a)) rest.push_back(a);
  std::map<ActivityId, std::size_t> index_of;
  for (std::size_t i = 0; i < rest.size(); ++i) index_of[rest[i]] = i;
  DisjointSets sets(rest.size());
  for (const auto& [edge, count] : stats.dfg) {
    auto a = index_of.find(edge.first), b = index_of.find(edge.second);
    if (a != index_of.end() && b != index_of.end()) sets.unite(a->second, b->second);
  }
  std::vector<Part> singletons;
  for (ActivityId a : rest) singletons.push_back({a});
  std::vector<Part> components = group(singletons, sets);

  auto violates = [&](const Part& component) {
    for (const auto& [edge, count] : stats.dfg) {
      auto [from, to] = edge;
      // Body to redo only from end activities; redo to body only into start activities.
      if (body.contains(from) && component.contains(to) && !stats.ends.contains(from)) return true;
      if (component.contains(from) && body.contains(to) && !stats.starts.contains(to)) return true;
    }
    for (ActivityId r : component) {
      bool to_some_start = false, to_all_starts = true;
      for (ActivityId s : stats.starts) {
        bool has = stats.has_dfg_edge(r, s);
        to_some_start |= has;
        to_all_starts &= has;
      }
      if (to_some_start && !to_all_starts) return true;
      bool from_some_end = false, from_all_ends = true;
      for (ActivityId e : stats.ends) {
        bool has = stats.has_dfg_edge(e, r);
        from_some_end |= has;
        from_all_ends &= has;
      }
      if (from_some_end && !from_all_ends) return true;
    }
    return false;
  };

  bool merged = true;
  while (merged) {
    merged = false;
    for (auto it = components.begin(); it != components.end();) {
      if (violates(*it)) {
        body.insert(it->begin(), it->end());
        it = components.erase(it);
        merged = true;
      } else {
        ++it;
      }
    }
  }
  if (components.empty()) return std::nullopt;
  LoopCut cut;
  cut.body = std::move(body);
  for (const auto& c : components) cut.redo.insert(c.begin(), c.end());
  return cut;
}

std::optional<PartialOrderCut> find_partial_order_cut(const LogStats& stats) {
  std::vector<Part> parts;
  for (ActivityId a : stats.alphabet) parts.push_back({a});

  auto follows = [&](const Part& p, const Part& q) {
    for (ActivityId a : p)
      for (ActivityId b : q)
        if (stats.ef.contains({a, b})) return true;
    return false;
  };

  Relation order;
  while (true) {
    const std::size_t n = parts.size();
    if (n < 2) return std::nullopt;
    std::vector<std::vector<bool>> fwd(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) fwd[i][j] = follows(parts[i], parts[j]);

    DisjointSets sets(n);
    bool merged = false;
    // Never observed together in either order: a choice, which a partial
    // order cannot express.
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (!fwd[i][j] && !fwd[j][i]) merged |= sets.unite(i, j);
    if (merged) {
      parts = group(parts, sets);
      continue;
    }

    Relation direct(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (fwd[i][j] && !fwd[j][i]) direct.add(i, j);
    Relation closed = direct.closure();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j || !closed.contains(i, j)) continue;
        bool cycle = closed.contains(j, i);
        bool concurrent = fwd[i][j] && fwd[j][i];
        if (cycle || concurrent) merged |= sets.unite(i, j);
      }
    }
    if (merged) {
      parts = group(parts, sets);
      continue;
    }
    order = std::move(closed);
    break;
  }

  // Every event of an earlier part precedes every event of a later part in
  // every trace; this is what keeps the cut fitting.
  for (std::size_t i = 0; i < parts.size(); ++i) {
    for (std::size_t j = 0; j < parts.size(); ++j) {
      if (order.contains(i, j) && follows(parts[j], parts[i])) {
        throw InternalError("partial order cut orders parts that interleave in the log");
      }
    }
  }
  return PartialOrderCut{Partition{std::move(parts)}, std::move(order)};
}

std::vector<SubLog> split_by_cut(const EventLog& log, const Cut& cut, bool tolerate_deviations) {
  std::vector<SubLog> out;
  if (const auto* cg = std::get_if<ChoiceGraphCut>(&cut)) {
    for (std::size_t i = 0; i < cg->partition.size(); ++i) {
      out.push_back({project(log, cg->partition.parts[i], false), i});
    }
    return out;
  }
  if (const auto* po = std::get_if<PartialOrderCut>(&cut)) {
    for (std::size_t i = 0; i < po->partition.size(); ++i) {
      out.push_back({project(log, po->partition.parts[i], true), i});
    }
    return out;
  }
  if (const auto* loop = std::get_if<LoopCut>(&cut)) {
    EventLog body, redo;
    for (const auto& [trace, count] : log.variants()) {
      if (trace.empty()) {
        if (!tolerate_deviations) throw InternalError("loop cut applied to a log with empty traces");
        body.add({}, count);
        continue;
      }
      bool in_body = loop->body.contains(trace.front());
      if (!in_body) {
        if (!tolerate_deviations) throw InternalError("trace does not start in the loop body");
        body.add({}, count);
      }
      Trace segment;
      for (ActivityId a : trace) {
        bool a_in_body = loop->body.contains(a);
        if (a_in_body != in_body) {
          (in_body ? body : redo).add(std::move(segment), count);
          segment.clear();
          in_body = a_in_body;
        }
        segment.push_back(a);
      }
      (in_body ? body : redo).add(std::move(segment), count);
      if (!in_body) {
        if (!tolerate_deviations) throw InternalError("trace does not end in the loop body");
        body.add({}, count);
      }
    }
    out.push_back({std::move(body), 0});
    out.push_back({std::move(redo), 1});
    return out;
  }
  throw ContractError("split_by_cut needs a choice-graph, loop, or partial-order cut");
}

}  // namespace powl2
