#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "powl/event_log.hpp"
#include "powl/language.hpp"
#include "powl/model.hpp"

namespace powl2 {

using PlaceId = std::uint32_t;
using TransitionId = std::uint32_t;

struct Place {
  std::string name;
};

// A transition without a label is silent.
struct Transition {
  std::string name;
  std::optional<ActivityId> label;
  std::vector<PlaceId> inputs;
  std::vector<PlaceId> outputs;

  bool silent() const { return !label.has_value(); }
};

class WfNet {
 public:
  PlaceId add_place(std::string name);
  TransitionId add_transition(std::string name, std::optional<ActivityId> label, std::vector<PlaceId> inputs,
                              std::vector<PlaceId> outputs);

  const std::vector<Place>& places() const { return places_; }
  const std::vector<Transition>& transitions() const { return transitions_; }
  std::size_t arc_count() const;

  PlaceId source() const { return source_; }
  PlaceId sink() const { return sink_; }
  void set_source(PlaceId p) { source_ = p; }
  void set_sink(PlaceId p) { sink_ = p; }

 private:
  std::vector<Place> places_;
  std::vector<Transition> transitions_;
  PlaceId source_ = 0;
  PlaceId sink_ = 0;
};

// Tokens per place, indexed by PlaceId.
struct Marking {
  std::vector<std::uint32_t> tokens;

  friend auto operator<=>(const Marking&, const Marking&) = default;
};

struct MarkingHash {
  std::size_t operator()(const Marking& m) const noexcept;
};

Marking initial_marking(const WfNet& net);
Marking final_marking(const WfNet& net);
bool is_enabled(const Transition& t, const Marking& m);
Marking fire(const Transition& t, const Marking& m);

// Recursive translation: activities and silent steps become single
// transitions, operators are wired with silent routing transitions. The model
// must be valid (ContractError otherwise).
WfNet powl_to_wfnet(const Node& model);

// Unique source and sink, and every node on a source-to-sink path.
std::vector<Violation> validate_wfnet(const WfNet& net);

struct NetLimits {
  std::size_t max_markings = 100'000;
  std::chrono::milliseconds max_time{5'000};
};

struct SoundnessVerdict {
  enum class Status { kSound, kUnsound, kInconclusive };
  Status status = Status::kInconclusive;
  std::string reason;
  std::size_t markings = 0;

  bool sound() const { return status == Status::kSound; }
};

// Reachability-graph check of option to complete, proper completion and
// absence of dead transitions, starting from one token on the source.
SoundnessVerdict check_soundness(const WfNet& net, const NetLimits& limits = {});

// Visible label sequences of firing sequences from the initial to the final
// marking, at most max_len labels long.
TraceSet net_language(const WfNet& net, std::size_t max_len, const NetLimits& limits = {});

// Replays label sequences through the net; silent transitions are closed over
// after every step.
class NetReplayer {
 public:
  using States = std::set<Marking>;

  explicit NetReplayer(const WfNet& net, const NetLimits& limits = {});

  States initial();
  States step(const States& from, ActivityId label);
  std::set<ActivityId> enabled_labels(const States& at) const;
  // Set once a silent closure was cut short by the marking limit.
  bool limit_hit() const { return limit_hit_; }

 private:
  const WfNet& net_;
  NetLimits limits_;
  bool limit_hit_ = false;

  States close(States states);
};

enum class NetFormat { kPnml, kDot };

// PNML place/transition net. Silent transitions get an empty <name>. The
// source place comes first; the final marking goes into <finalmarkings>.
std::string export_pnml(const WfNet& net, const ActivityTable& activities);

// Places as circles, labeled transitions as boxes, silent transitions as thin
// filled boxes.
std::string export_net_dot(const WfNet& net, const ActivityTable& activities);

std::string export_net(const WfNet& net, const ActivityTable& activities, NetFormat format);

}  // namespace powl2
