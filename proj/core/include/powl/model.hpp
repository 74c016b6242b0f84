#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "powl/event_log.hpp"

namespace powl2 {

// Binary relation over child indices 0..n-1, stored as a dense matrix.
class Relation {
 public:
  using Pair = std::pair<std::size_t, std::size_t>;

  Relation() = default;
  explicit Relation(std::size_t n) : n_(n), bits_(n * n, 0) {}
  Relation(std::size_t n, const std::vector<Pair>& pairs);

  std::size_t size() const { return n_; }
  bool contains(std::size_t from, std::size_t to) const { return bits_[from * n_ + to] != 0; }
  void add(std::size_t from, std::size_t to) { bits_[from * n_ + to] = 1; }
  bool empty() const;

  Relation closure() const;
  // Transitive reduction. Only meaningful on an acyclic, closed relation.
  Relation reduction() const;
  bool irreflexive() const;
  bool asymmetric() const;
  bool transitive() const;
  bool strict_partial_order() const { return irreflexive() && transitive(); }
  // Every pair of distinct indices is comparable.
  bool total() const;

  std::vector<Pair> pairs() const;
  std::vector<std::size_t> predecessors(std::size_t i) const;
  std::vector<std::size_t> successors(std::size_t i) const;

  friend bool operator==(const Relation&, const Relation&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<char> bits_;
};

// Endpoint of a choice-graph edge: the artificial start, the artificial end,
// or a child by index. Orders as start < children < end.
class NodeRef {
 public:
  static constexpr NodeRef start() { return NodeRef{0}; }
  static constexpr NodeRef end() { return NodeRef{std::numeric_limits<std::uint32_t>::max()}; }
  static constexpr NodeRef child(std::size_t index) { return NodeRef{static_cast<std::uint32_t>(index + 1)}; }

  constexpr bool is_start() const { return raw_ == 0; }
  constexpr bool is_end() const { return raw_ == std::numeric_limits<std::uint32_t>::max(); }
  constexpr bool is_child() const { return !is_start() && !is_end(); }
  constexpr std::size_t index() const { return raw_ - 1; }

  friend constexpr auto operator<=>(NodeRef, NodeRef) = default;

 private:
  constexpr explicit NodeRef(std::uint32_t raw) : raw_(raw) {}
  std::uint32_t raw_;
};

using ChoiceEdge = std::pair<NodeRef, NodeRef>;

class Node;
using NodePtr = std::shared_ptr<const Node>;

struct Activity {
  ActivityId label;
};
struct Silent {};
struct Loop {
  NodePtr body;
  NodePtr redo;
};
struct PartialOrder {
  std::vector<NodePtr> children;
  Relation order;
};
struct ChoiceGraph {
  std::vector<NodePtr> children;
  std::set<ChoiceEdge> edges;
};

// Immutable POWL model node. Subtrees are shared between models.
class Node {
 public:
  using Kind = std::variant<Activity, Silent, Loop, PartialOrder, ChoiceGraph>;

  explicit Node(Kind kind);

  const Kind& kind() const { return kind_; }
  template <typename T>
  const T* as() const {
    return std::get_if<T>(&kind_);
  }
  template <typename T>
  bool is() const {
    return std::holds_alternative<T>(kind_);
  }

  // Sorted labels occurring anywhere in the subtree.
  const std::vector<ActivityId>& alphabet() const { return alphabet_; }
  bool uses(ActivityId a) const;

  // Number of nodes in the subtree.
  std::size_t size() const { return size_; }

 private:
  Kind kind_;
  std::vector<ActivityId> alphabet_;
  std::size_t size_ = 1;
};

// Deep structural equality.
bool operator==(const Node& a, const Node& b);
bool same_model(const NodePtr& a, const NodePtr& b);

NodePtr make_activity(ActivityId label);
NodePtr make_silent();
NodePtr make_loop(NodePtr body, NodePtr redo);

// Closes the given relation transitively; a cycle or an out-of-range index is a
// ContractError.
NodePtr make_partial_order(std::vector<NodePtr> children, const std::vector<Relation::Pair>& order);
NodePtr make_partial_order(std::vector<NodePtr> children, const Relation& order);

// Stores the relation as given. For building deliberately malformed models.
NodePtr make_partial_order_unchecked(std::vector<NodePtr> children, Relation order);

// Edge endpoints must reference existing children (ContractError otherwise).
// Structural validity is left to validate_model.
NodePtr make_choice_graph(std::vector<NodePtr> children, std::set<ChoiceEdge> edges);

// Choice graph with one Start -> child -> End path per child.
NodePtr make_exclusive_choice(std::vector<NodePtr> children);

struct Violation {
  std::string path;
  std::string message;
};

// All structural problems in the tree. Empty means the model is valid.
std::vector<Violation> validate_model(const Node& model);

inline bool is_valid(const Node& model) { return validate_model(model).empty(); }

}  // namespace powl2
