#include "powl/model.hpp"

#include <algorithm>
#include <deque>

#include "powl/error.hpp"

namespace powl2 {

// ---------------------------------------------------------------------------
// Relation

Relation::Relation(std::size_t n, const std::vector<Pair>& pairs) : Relation(n) {
  for (auto [from, to] : pairs) {
    if (from >= n || to >= n) {
      throw ContractError("order pair (" + std::to_string(from) + "," + std::to_string(to) + ") out of range for " +
                          std::to_string(n) + " children");
    }
    add(from, to);
  }
}

bool Relation::empty() const { return std::none_of(bits_.begin(), bits_.end(), [](char b) { return b != 0; }); }

Relation Relation::closure() const {
  Relation out = *this;
  for (std::size_t k = 0; k < n_; ++k)
    for (std::size_t i = 0; i < n_; ++i)
      if (out.contains(i, k))
        for (std::size_t j = 0; j < n_; ++j)
          if (out.contains(k, j)) out.add(i, j);
  return out;
}

Relation Relation::reduction() const {
  Relation closed = closure();
  Relation out(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      if (i == j || !closed.contains(i, j)) continue;
      bool implied = false;
      for (std::size_t k = 0; k < n_ && !implied; ++k) {
        implied = k != i && k != j && closed.contains(i, k) && closed.contains(k, j);
      }
      if (!implied) out.add(i, j);
    }
  }
  return out;
}

bool Relation::irreflexive() const {
  for (std::size_t i = 0; i < n_; ++i)
    if (contains(i, i)) return false;
  return true;
}

bool Relation::asymmetric() const {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      if (contains(i, j) && contains(j, i)) return false;
  return true;
}

bool Relation::transitive() const { return closure() == *this; }

bool Relation::total() const {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      if (!contains(i, j) && !contains(j, i)) return false;
  return true;
}

std::vector<Relation::Pair> Relation::pairs() const {
  std::vector<Pair> out;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      if (contains(i, j)) out.emplace_back(i, j);
  return out;
}

std::vector<std::size_t> Relation::predecessors(std::size_t i) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < n_; ++j)
    if (contains(j, i)) out.push_back(j);
  return out;
}

std::vector<std::size_t> Relation::successors(std::size_t i) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < n_; ++j)
    if (contains(i, j)) out.push_back(j);
  return out;
}

// ---------------------------------------------------------------------------
// Node

namespace {

void merge_alphabet(std::vector<ActivityId>& into, const std::vector<ActivityId>& from) {
  std::vector<ActivityId> merged;
  merged.reserve(into.size() + from.size());
  std::set_union(into.begin(), into.end(), from.begin(), from.end(), std::back_inserter(merged));
  into = std::move(merged);
}

void require_child(const NodePtr& child) {
  if (!child) throw ContractError("model child must not be null");
}

}  // namespace

Node::Node(Kind kind) : kind_(std::move(kind)) {
  auto absorb = [this](const NodePtr& child) {
    merge_alphabet(alphabet_, child->alphabet());
    size_ += child->size();
  };
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Activity>) {
          alphabet_.push_back(k.label);
        } else if constexpr (std::is_same_v<T, Loop>) {
          absorb(k.body);
          absorb(k.redo);
        } else if constexpr (std::is_same_v<T, PartialOrder> || std::is_same_v<T, ChoiceGraph>) {
          for (const auto& child : k.children) absorb(child);
        }
      },
      kind_);
}

bool Node::uses(ActivityId a) const { return std::binary_search(alphabet_.begin(), alphabet_.end(), a); }

namespace {

bool same_children(const std::vector<NodePtr>& a, const std::vector<NodePtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same_model(a[i], b[i])) return false;
  return true;
}

}  // namespace

bool same_model(const NodePtr& a, const NodePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

bool operator==(const Node& a, const Node& b) {
  if (&a == &b) return true;
  if (a.kind().index() != b.kind().index() || a.size() != b.size()) return false;
  if (auto x = a.as<Activity>()) return x->label == b.as<Activity>()->label;
  if (a.is<Silent>()) return true;
  if (auto x = a.as<Loop>()) {
    auto y = b.as<Loop>();
    return same_model(x->body, y->body) && same_model(x->redo, y->redo);
  }
  if (auto x = a.as<PartialOrder>()) {
    auto y = b.as<PartialOrder>();
    return x->order == y->order && same_children(x->children, y->children);
  }
  auto x = a.as<ChoiceGraph>();
  auto y = b.as<ChoiceGraph>();
  return x->edges == y->edges && same_children(x->children, y->children);
}

NodePtr make_activity(ActivityId label) { return std::make_shared<const Node>(Activity{label}); }

NodePtr make_silent() { return std::make_shared<const Node>(Silent{}); }

NodePtr make_loop(NodePtr body, NodePtr redo) {
  require_child(body);
  require_child(redo);
  return std::make_shared<const Node>(Loop{std::move(body), std::move(redo)});
}

NodePtr make_partial_order(std::vector<NodePtr> children, const std::vector<Relation::Pair>& order) {
  Relation relation(children.size(), order);
  return make_partial_order(std::move(children), relation);
}

NodePtr make_partial_order(std::vector<NodePtr> children, const Relation& order) {
  if (order.size() != children.size()) throw ContractError("partial order size does not match child count");
  Relation closed = order.closure();
  if (!closed.irreflexive()) throw ContractError("partial order contains a cycle");
  return make_partial_order_unchecked(std::move(children), std::move(closed));
}

NodePtr make_partial_order_unchecked(std::vector<NodePtr> children, Relation order) {
  for (const auto& child : children) require_child(child);
  if (order.size() != children.size()) throw ContractError("partial order size does not match child count");
  return std::make_shared<const Node>(PartialOrder{std::move(children), std::move(order)});
}

NodePtr make_choice_graph(std::vector<NodePtr> children, std::set<ChoiceEdge> edges) {
  for (const auto& child : children) require_child(child);
  for (const auto& [from, to] : edges) {
    for (NodeRef ref : {from, to}) {
      if (ref.is_child() && ref.index() >= children.size()) {
        throw ContractError("choice graph edge references missing child " + std::to_string(ref.index()));
      }
    }
  }
  return std::make_shared<const Node>(ChoiceGraph{std::move(children), std::move(edges)});
}

NodePtr make_exclusive_choice(std::vector<NodePtr> children) {
  std::set<ChoiceEdge> edges;
  for (std::size_t i = 0; i < children.size(); ++i) {
    edges.insert({NodeRef::start(), NodeRef::child(i)});
    edges.insert({NodeRef::child(i), NodeRef::end()});
  }
  return make_choice_graph(std::move(children), std::move(edges));
}

// ---------------------------------------------------------------------------
// Validation

namespace {

class Validator {
 public:
  std::vector<Violation> out;

  void visit(const Node& node, const std::string& path) {
    if (auto loop = node.as<Loop>()) {
      check_child(loop->body, path + "/do");
      check_child(loop->redo, path + "/redo");
    } else if (auto po = node.as<PartialOrder>()) {
      visit_partial_order(*po, path);
    } else if (auto graph = node.as<ChoiceGraph>()) {
      visit_choice_graph(*graph, path);
    }
  }

 private:
  void report(const std::string& path, std::string message) { out.push_back({path, std::move(message)}); }

  void check_child(const NodePtr& child, const std::string& path) {
    if (!child) {
      report(path, "missing child");
      return;
    }
    visit(*child, path);
  }

  void visit_partial_order(const PartialOrder& po, const std::string& path) {
    if (po.children.size() < 2) report(path, "partial order needs at least 2 children");
    if (po.order.size() != po.children.size()) {
      report(path, "order size does not match child count");
    } else {
      if (!po.order.irreflexive()) report(path, "order not irreflexive");
      if (!po.order.asymmetric()) report(path, "order not asymmetric");
      if (!po.order.transitive()) report(path, "order not transitively closed");
    }
    for (std::size_t i = 0; i < po.children.size(); ++i) {
      check_child(po.children[i], path + "/children/" + std::to_string(i));
    }
  }

  void visit_choice_graph(const ChoiceGraph& graph, const std::string& path) {
    const std::size_t n = graph.children.size();
    if (n < 2) report(path, "choice graph needs at least 2 children");

    bool start_out = false, end_in = false;
    std::vector<std::vector<std::size_t>> fwd(n + 2), bwd(n + 2);
    // Vertex numbering: 0 = start, 1..n = children, n+1 = end.
    auto vertex = [n](NodeRef r) -> std::size_t { return r.is_start() ? 0 : r.is_end() ? n + 1 : r.index() + 1; };
    bool ranges_ok = true;
    for (const auto& [from, to] : graph.edges) {
      if ((from.is_child() && from.index() >= n) || (to.is_child() && to.index() >= n)) {
        report(path, "edge references missing child");
        ranges_ok = false;
        continue;
      }
      if (to.is_start()) report(path, "Start has an incoming edge");
      if (from.is_end()) report(path, "End has an outgoing edge");
      start_out |= from.is_start();
      end_in |= to.is_end();
      fwd[vertex(from)].push_back(vertex(to));
      bwd[vertex(to)].push_back(vertex(from));
    }
    if (!start_out) report(path, "Start has no outgoing edge");
    if (!end_in) report(path, "End has no incoming edge");

    if (ranges_ok) {
      auto from_start = reach(fwd, 0);
      auto to_end = reach(bwd, n + 1);
      for (std::size_t i = 0; i < n; ++i) {
        std::string child_path = path + "/children/" + std::to_string(i);
        if (!from_start[i + 1]) report(child_path, "unreachable from Start");
        if (!to_end[i + 1]) report(child_path, "cannot reach End");
      }
    }
    for (std::size_t i = 0; i < n; ++i) check_child(graph.children[i], path + "/children/" + std::to_string(i));
  }

  static std::vector<bool> reach(const std::vector<std::vector<std::size_t>>& adj, std::size_t from) {
    std::vector<bool> seen(adj.size(), false);
    std::deque<std::size_t> queue{from};
    seen[from] = true;
    while (!queue.empty()) {
      auto v = queue.front();
      queue.pop_front();
      for (auto w : adj[v]) {
        if (!seen[w]) {
          seen[w] = true;
          queue.push_back(w);
        }
      }
    }
    return seen;
  }
};

}  // namespace

std::vector<Violation> validate_model(const Node& model) {
  Validator v;
  v.visit(model, "");
  for (auto& violation : v.out)
    if (violation.path.empty()) violation.path = "/";
  return std::move(v.out);
}

}  // namespace powl2
