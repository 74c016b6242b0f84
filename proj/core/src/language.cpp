#include "powl/language.hpp"

#include <algorithm>
#include <deque>
#include <functional>

#include "powl/error.hpp"

namespace powl2 {

// ---------------------------------------------------------------------------
// Shuffle

namespace {

void shuffle_rec(const std::vector<Trace>& traces, const Relation& order, std::vector<std::size_t>& pos,
                 Trace& current, std::set<Trace>& out) {
  bool done = true;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    if (pos[i] == traces[i].size()) continue;
    done = false;
    bool enabled = true;
    for (std::size_t p = 0; p < traces.size() && enabled; ++p) {
      enabled = !order.contains(p, i) || pos[p] == traces[p].size();
    }
    if (!enabled) continue;
    current.push_back(traces[i][pos[i]]);
    ++pos[i];
    shuffle_rec(traces, order, pos, current, out);
    --pos[i];
    current.pop_back();
  }
  if (done) out.insert(current);
}

}  // namespace

std::set<Trace> shuffle(const std::vector<Trace>& traces, const Relation& order) {
  if (order.size() != traces.size()) throw ContractError("shuffle order size does not match trace count");
  if (!order.strict_partial_order()) throw ContractError("shuffle order is not a strict partial order");
  std::set<Trace> out;
  std::vector<std::size_t> pos(traces.size(), 0);
  Trace current;
  shuffle_rec(traces, order, pos, current, out);
  return out;
}

// ---------------------------------------------------------------------------
// Bounded enumeration

namespace {

class Enumerator {
 public:
  explicit Enumerator(const EnumerationBounds& bounds) : bounds_(bounds) {}

  TraceSet run(const Node& node) {
    if (auto a = node.as<Activity>()) {
      TraceSet out;
      if (bounds_.max_len >= 1) {
        out.traces.insert(Trace{a->label});
      } else {
        out.truncated = true;
      }
      return out;
    }
    if (node.is<Silent>()) return TraceSet{{Trace{}}, false};
    if (auto loop = node.as<Loop>()) return run_loop(*loop);
    if (auto po = node.as<PartialOrder>()) return run_partial_order(*po);
    return run_choice_graph(*node.as<ChoiceGraph>());
  }

 private:
  EnumerationBounds bounds_;

  static Trace concat(const Trace& a, const Trace& b) {
    Trace t = a;
    t.insert(t.end(), b.begin(), b.end());
    return t;
  }

  TraceSet run_loop(const Loop& loop) {
    TraceSet body = run(*loop.body);
    TraceSet redo = run(*loop.redo);
    TraceSet out{body.traces, body.truncated || redo.truncated};
    std::set<Trace> frontier = body.traces;
    for (std::size_t round = 1; !frontier.empty(); ++round) {
      std::set<Trace> fresh;
      bool pruned = false;
      for (const auto& f : frontier) {
        for (const auto& r : redo.traces) {
          for (const auto& b : body.traces) {
            if (f.size() + r.size() + b.size() > bounds_.max_len) {
              pruned = true;
              continue;
            }
            Trace t = concat(concat(f, r), b);
            if (!out.traces.contains(t)) fresh.insert(std::move(t));
          }
        }
      }
      if (round > bounds_.max_loop_unroll) {
        if (!fresh.empty() || pruned) out.truncated = true;
        break;
      }
      out.truncated |= pruned;
      out.traces.insert(fresh.begin(), fresh.end());
      frontier = std::move(fresh);
    }
    return out;
  }

  TraceSet run_partial_order(const PartialOrder& po) {
    TraceSet out;
    std::vector<std::vector<Trace>> langs;
    for (const auto& child : po.children) {
      TraceSet sub = run(*child);
      out.truncated |= sub.truncated;
      langs.emplace_back(sub.traces.begin(), sub.traces.end());
    }
    std::vector<Trace> pick(po.children.size());
    std::function<void(std::size_t, std::size_t)> choose = [&](std::size_t i, std::size_t len) {
      if (i == langs.size()) {
        auto mixed = shuffle(pick, po.order);
        out.traces.insert(mixed.begin(), mixed.end());
        return;
      }
      for (const auto& t : langs[i]) {
        if (len + t.size() > bounds_.max_len) {
          out.truncated = true;
          continue;
        }
        pick[i] = t;
        choose(i + 1, len + t.size());
      }
    };
    choose(0, 0);
    return out;
  }

  TraceSet run_choice_graph(const ChoiceGraph& graph) {
    TraceSet out;
    const std::size_t n = graph.children.size();
    std::vector<std::vector<Trace>> langs;
    for (const auto& child : graph.children) {
      TraceSet sub = run(*child);
      out.truncated |= sub.truncated;
      langs.emplace_back(sub.traces.begin(), sub.traces.end());
    }
    std::map<NodeRef, std::vector<NodeRef>> next;
    for (const auto& [from, to] : graph.edges) next[from].push_back(to);

    std::vector<std::size_t> visits(n, 0);
    Trace prefix;
    std::function<void(NodeRef)> walk = [&](NodeRef at) {
      auto it = next.find(at);
      if (it == next.end()) return;
      for (NodeRef to : it->second) {
        if (to.is_end()) {
          out.traces.insert(prefix);
          continue;
        }
        if (!to.is_child()) continue;
        std::size_t c = to.index();
        if (visits[c] > bounds_.max_loop_unroll) {
          out.truncated = true;
          continue;
        }
        ++visits[c];
        for (const auto& t : langs[c]) {
          if (prefix.size() + t.size() > bounds_.max_len) {
            out.truncated = true;
            continue;
          }
          prefix.insert(prefix.end(), t.begin(), t.end());
          walk(to);
          prefix.resize(prefix.size() - t.size());
        }
        --visits[c];
      }
    };
    walk(NodeRef::start());
    return out;
  }
};

}  // namespace

TraceSet enumerate_language(const Node& model, const EnumerationBounds& bounds) {
  return Enumerator(bounds).run(model);
}

// ---------------------------------------------------------------------------
// Membership

struct MembershipChecker::Impl {
  struct Key {
    const Node* node;
    std::uint32_t context;
    std::uint32_t from;
    std::uint32_t to;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      std::size_t h = std::hash<const void*>{}(k.node);
      h ^= (static_cast<std::size_t>(k.context) * 0x9E3779B97F4A7C15ULL) + (h << 6) + (h >> 2);
      h ^= (static_cast<std::size_t>(k.from) << 32 | k.to) + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
      return h;
    }
  };
  struct GraphIndex {
    // Vertex numbering: 0 = start, i+1 = child i, n+1 = end.
    std::vector<std::vector<std::size_t>> next;
  };

  const Node& root;
  std::deque<Trace> contexts;
  std::map<Trace, std::uint32_t> context_ids;
  std::unordered_map<Key, bool, KeyHash> memo;
  std::unordered_map<const Node*, GraphIndex> graphs;

  explicit Impl(const Node& model) : root(model) {}

  std::uint32_t context_of(const Trace& t) {
    auto [it, inserted] = context_ids.try_emplace(t, static_cast<std::uint32_t>(contexts.size()));
    if (inserted) contexts.push_back(t);
    return it->second;
  }

  bool accepts(const Trace& t) {
    memo.clear();
    contexts.clear();
    context_ids.clear();
    auto ctx = context_of(t);
    return member(root, ctx, 0, static_cast<std::uint32_t>(t.size()));
  }

  bool member(const Node& node, std::uint32_t ctx, std::uint32_t from, std::uint32_t to) {
    Key key{&node, ctx, from, to};
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    bool result = compute(node, ctx, from, to);
    memo[key] = result;
    return result;
  }

  bool compute(const Node& node, std::uint32_t ctx, std::uint32_t from, std::uint32_t to) {
    const Trace& t = contexts[ctx];
    for (std::uint32_t i = from; i < to; ++i)
      if (!node.uses(t[i])) return false;

    if (auto a = node.as<Activity>()) return to - from == 1 && t[from] == a->label;
    if (node.is<Silent>()) return from == to;
    if (auto loop = node.as<Loop>()) return member_loop(*loop, ctx, from, to);
    if (auto po = node.as<PartialOrder>()) return member_partial_order(*po, ctx, from, to);
    return member_choice_graph(node, ctx, from, to);
  }

  // Positions q >= from such that [from, q) is a member of node; scanning stops
  // at the first label outside the node's alphabet.
  template <typename Fn>
  void for_each_end(const Node& node, std::uint32_t ctx, std::uint32_t from, std::uint32_t to, Fn&& fn) {
    const Trace& t = contexts[ctx];
    for (std::uint32_t q = from; q <= to; ++q) {
      if (q > from && !node.uses(t[q - 1])) break;
      if (member(node, ctx, from, q)) fn(q);
    }
  }

  bool member_loop(const Loop& loop, std::uint32_t ctx, std::uint32_t from, std::uint32_t to) {
    // Positions reached right after a body execution. Each position is expanded
    // once, which also caps rounds that consume nothing.
    std::vector<bool> seen(to - from + 1, false);
    std::deque<std::uint32_t> queue;
    auto reach = [&](std::uint32_t q) {
      if (!seen[q - from]) {
        seen[q - from] = true;
        queue.push_back(q);
      }
    };
    for_each_end(*loop.body, ctx, from, to, reach);
    while (!queue.empty()) {
      std::uint32_t p = queue.front();
      queue.pop_front();
      if (p == to) return true;
      for_each_end(*loop.redo, ctx, p, to, [&](std::uint32_t q) { for_each_end(*loop.body, ctx, q, to, reach); });
    }
    return seen[to - from];
  }

  const GraphIndex& index_of(const Node& node) {
    auto it = graphs.find(&node);
    if (it != graphs.end()) return it->second;
    const auto& graph = *node.as<ChoiceGraph>();
    const std::size_t n = graph.children.size();
    GraphIndex index;
    index.next.resize(n + 2);
    auto vertex = [n](NodeRef r) -> std::size_t { return r.is_start() ? 0 : r.is_end() ? n + 1 : r.index() + 1; };
    for (const auto& [a, b] : graph.edges) index.next[vertex(a)].push_back(vertex(b));
    return graphs.emplace(&node, std::move(index)).first->second;
  }

  bool member_choice_graph(const Node& node, std::uint32_t ctx, std::uint32_t from, std::uint32_t to) {
    const auto& graph = *node.as<ChoiceGraph>();
    const std::size_t n = graph.children.size();
    const auto& index = index_of(node);
    const std::size_t width = to - from + 1;
    // State: (vertex, position) meaning the vertex has been completed at position.
    std::vector<bool> seen((n + 2) * width, false);
    std::deque<std::pair<std::size_t, std::uint32_t>> queue;
    auto push = [&](std::size_t v, std::uint32_t p) {
      auto slot = v * width + (p - from);
      if (!seen[slot]) {
        seen[slot] = true;
        queue.emplace_back(v, p);
      }
    };
    push(0, from);
    while (!queue.empty()) {
      auto [v, p] = queue.front();
      queue.pop_front();
      for (std::size_t w : index.next[v]) {
        if (w == n + 1) {
          if (p == to) return true;
          continue;
        }
        if (w == 0) continue;
        for_each_end(*graph.children[w - 1], ctx, p, to, [&](std::uint32_t q) { push(w, q); });
      }
    }
    return false;
  }

  struct Assignment {
    std::vector<Trace> parts;
    std::vector<bool> closed;
  };

  bool member_partial_order(const PartialOrder& po, std::uint32_t ctx, std::uint32_t from, std::uint32_t to) {
    const std::size_t n = po.children.size();
    Assignment start{std::vector<Trace>(n), std::vector<bool>(n, false)};
    return assign(po, ctx, from, to, std::move(start));
  }

  bool assign(const PartialOrder& po, std::uint32_t ctx, std::uint32_t pos, std::uint32_t to, Assignment state) {
    const std::size_t n = po.children.size();
    std::vector<std::size_t> viable;
    for (; pos < to; ++pos) {
      ActivityId label = contexts[ctx][pos];
      viable.clear();
      for (std::size_t c = 0; c < n; ++c) {
        if (!state.closed[c] && po.children[c]->uses(label)) viable.push_back(c);
      }
      if (viable.empty()) return false;
      if (viable.size() > 1) {
        for (std::size_t c : viable) {
          Assignment branch = state;
          place(po, branch, c, label);
          if (assign(po, ctx, pos + 1, to, std::move(branch))) return true;
        }
        return false;
      }
      place(po, state, viable.front(), label);
    }
    for (std::size_t c = 0; c < n; ++c) {
      auto sub = context_of(state.parts[c]);
      if (!member(*po.children[c], sub, 0, static_cast<std::uint32_t>(contexts[sub].size()))) return false;
    }
    return true;
  }

  static void place(const PartialOrder& po, Assignment& state, std::size_t child, ActivityId label) {
    state.parts[child].push_back(label);
    // Once a child has started, none of its predecessors may emit again.
    for (std::size_t p = 0; p < po.children.size(); ++p) {
      if (po.order.contains(p, child)) state.closed[p] = true;
    }
  }
};

MembershipChecker::MembershipChecker(const Node& model) : impl_(std::make_unique<Impl>(model)) {}
MembershipChecker::~MembershipChecker() = default;
MembershipChecker::MembershipChecker(MembershipChecker&&) noexcept = default;
MembershipChecker& MembershipChecker::operator=(MembershipChecker&&) noexcept = default;

bool MembershipChecker::accepts(const Trace& trace) { return impl_->accepts(trace); }

bool is_member(const Node& model, const Trace& trace) { return MembershipChecker(model).accepts(trace); }

}  // namespace powl2
