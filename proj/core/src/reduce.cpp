#include "powl/reduce.hpp"

#include <map>
#include <optional>

namespace powl2 {

namespace {

using RefSet = std::set<NodeRef>;

// Chain Start -> c1 -> ... -> cn -> End through every child exactly once.
std::optional<std::vector<std::size_t>> as_chain(const ChoiceGraph& graph) {
  const std::size_t n = graph.children.size();
  if (graph.edges.size() != n + 1) return std::nullopt;
  std::map<NodeRef, NodeRef> next;
  for (const auto& [from, to] : graph.edges) {
    if (!next.emplace(from, to).second) return std::nullopt;
  }
  std::vector<std::size_t> chain;
  std::vector<bool> seen(n, false);
  NodeRef at = NodeRef::start();
  while (true) {
    auto it = next.find(at);
    if (it == next.end()) return std::nullopt;
    at = it->second;
    if (at.is_end()) break;
    if (!at.is_child() || seen[at.index()]) return std::nullopt;
    seen[at.index()] = true;
    chain.push_back(at.index());
  }
  if (chain.size() != n) return std::nullopt;
  return chain;
}

NodePtr chain_to_partial_order(const ChoiceGraph& graph, const std::vector<std::size_t>& chain) {
  if (chain.size() == 1) return graph.children[chain.front()];
  std::vector<NodePtr> children;
  std::vector<Relation::Pair> order;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    children.push_back(graph.children[chain[i]]);
    if (i + 1 < chain.size()) order.emplace_back(i, i + 1);
  }
  return make_partial_order(std::move(children), order);
}

NodePtr group_siblings(const ChoiceGraph& graph) {
  const std::size_t n = graph.children.size();
  std::vector<RefSet> preds(n), succs(n);
  for (const auto& [from, to] : graph.edges) {
    if (to.is_child()) preds[to.index()].insert(from);
    if (from.is_child()) succs[from.index()].insert(to);
  }
  for (std::size_t first = 0; first < n; ++first) {
    std::vector<std::size_t> group{first};
    for (std::size_t j = first + 1; j < n; ++j) {
      if (preds[j] == preds[first] && succs[j] == succs[first]) group.push_back(j);
    }
    if (group.size() < 2 || group.size() == n) continue;
    bool touches_itself = false;
    for (std::size_t g : group) {
      touches_itself |= preds[first].contains(NodeRef::child(g)) || succs[first].contains(NodeRef::child(g));
    }
    if (touches_itself) continue;

    std::vector<bool> grouped(n, false);
    std::vector<NodePtr> members;
    for (std::size_t g : group) {
      grouped[g] = true;
      members.push_back(graph.children[g]);
    }
    // The group takes the slot of its first member.
    std::vector<NodePtr> children;
    std::vector<std::size_t> remap(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (grouped[i] && i != first) {
        remap[i] = remap[first];
        continue;
      }
      remap[i] = children.size();
      children.push_back(i == first ? make_exclusive_choice(std::move(members)) : graph.children[i]);
    }
    auto map_ref = [&](NodeRef r) { return r.is_child() ? NodeRef::child(remap[r.index()]) : r; };
    std::set<ChoiceEdge> edges;
    for (const auto& [from, to] : graph.edges) edges.insert({map_ref(from), map_ref(to)});
    return make_choice_graph(std::move(children), std::move(edges));
  }
  return nullptr;
}

NodePtr flatten_nested(const PartialOrder& po) {
  const std::size_t n = po.children.size();
  for (std::size_t k = 0; k < n; ++k) {
    const auto* inner = po.children[k]->as<PartialOrder>();
    if (!inner) continue;
    bool comparable = true;
    for (std::size_t s = 0; s < n && comparable; ++s) {
      comparable = s == k || po.order.contains(s, k) || po.order.contains(k, s);
    }
    if (!comparable) continue;

    // Index layout: siblings before k, then k's children, then siblings after k.
    const std::size_t m = inner->children.size();
    auto outer_index = [&](std::size_t s) { return s < k ? s : s + m - 1; };
    std::vector<NodePtr> children;
    for (std::size_t s = 0; s < k; ++s) children.push_back(po.children[s]);
    for (const auto& g : inner->children) children.push_back(g);
    for (std::size_t s = k + 1; s < n; ++s) children.push_back(po.children[s]);

    std::vector<Relation::Pair> order;
    for (auto [a, b] : po.order.pairs()) {
      if (a != k && b != k) order.emplace_back(outer_index(a), outer_index(b));
    }
    for (auto [a, b] : inner->order.pairs()) order.emplace_back(k + a, k + b);
    for (std::size_t s = 0; s < n; ++s) {
      if (s == k) continue;
      for (std::size_t g = 0; g < m; ++g) {
        if (po.order.contains(s, k)) order.emplace_back(outer_index(s), k + g);
        if (po.order.contains(k, s)) order.emplace_back(k + g, outer_index(s));
      }
    }
    return make_partial_order(std::move(children), order);
  }
  return nullptr;
}

// One bottom-up pass. Returns nullptr when nothing changed.
NodePtr reduce_pass(const NodePtr& node) {
  if (const auto* loop = node->as<Loop>()) {
    auto body = reduce_pass(loop->body);
    auto redo = reduce_pass(loop->redo);
    if (!body && !redo) return nullptr;
    return make_loop(body ? body : loop->body, redo ? redo : loop->redo);
  }

  if (const auto* po = node->as<PartialOrder>()) {
    bool changed = false;
    std::vector<NodePtr> children;
    for (const auto& child : po->children) {
      auto reduced = reduce_pass(child);
      changed |= reduced != nullptr;
      children.push_back(reduced ? reduced : child);
    }
    PartialOrder current{std::move(children), po->order};
    if (auto flat = flatten_nested(current)) return flat;
    if (!changed) return nullptr;
    return make_partial_order_unchecked(std::move(current.children), std::move(current.order));
  }

  if (const auto* graph = node->as<ChoiceGraph>()) {
    bool changed = false;
    std::vector<NodePtr> children;
    for (const auto& child : graph->children) {
      auto reduced = reduce_pass(child);
      changed |= reduced != nullptr;
      children.push_back(reduced ? reduced : child);
    }
    ChoiceGraph current{std::move(children), graph->edges};
    if (auto chain = as_chain(current)) return chain_to_partial_order(current, *chain);
    if (auto grouped = group_siblings(current)) return grouped;
    if (!changed) return nullptr;
    return make_choice_graph(std::move(current.children), std::move(current.edges));
  }

  return nullptr;
}

}  // namespace

NodePtr reduce_model(const NodePtr& model) {
  NodePtr current = model;
  while (auto next = reduce_pass(current)) current = std::move(next);
  return current;
}

}  // namespace powl2
