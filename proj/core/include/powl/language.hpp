#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <unordered_map>
#include <vector>

#include "powl/model.hpp"

namespace powl2 {

// A set of traces. truncated == false means the set is the complete language.
struct TraceSet {
  std::set<Trace> traces;
  bool truncated = false;

  bool contains(const Trace& t) const { return traces.contains(t); }
  std::size_t size() const { return traces.size(); }
};

// Order-preserving shuffle: interleavings of the given traces such that every
// event of trace i precedes every event of trace j whenever (i,j) is in order,
// and each trace keeps its internal order. order must be a strict partial order
// over the trace indices (ContractError otherwise).
std::set<Trace> shuffle(const std::vector<Trace>& traces, const Relation& order);

struct EnumerationBounds {
  std::size_t max_len = 8;
  // Redo executions per loop, and repeat visits of a choice-graph child per path.
  std::size_t max_loop_unroll = 2;
};

// Bounded language of a model. truncated is set whenever either bound pruned a
// candidate trace.
TraceSet enumerate_language(const Node& model, const EnumerationBounds& bounds);

// Exact decision procedure for trace membership in the model's language.
bool is_member(const Node& model, const Trace& trace);

// Reusable membership checker. The memo table is cleared per query. The model
// must outlive the checker.
class MembershipChecker {
 public:
  explicit MembershipChecker(const Node& model);
  ~MembershipChecker();
  MembershipChecker(MembershipChecker&&) noexcept;
  MembershipChecker& operator=(MembershipChecker&&) noexcept;

  bool accepts(const Trace& trace);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace powl2
