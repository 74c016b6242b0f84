#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "powl/event_log.hpp"
#include "powl/model.hpp"
#include "powl/wfnet.hpp"

namespace powl2 {

struct TraceFit {
  Trace trace;
  Count count = 0;
  bool fits = false;
};

// Membership of every distinct trace, in variant order.
std::vector<TraceFit> trace_fitness(const EventLog& log, const Node& model, unsigned threads = 1);

// Multiplicity-weighted fraction of traces in the model's language. An empty
// log is an InputError.
double fitness(const EventLog& log, const Node& model, unsigned threads = 1);

struct PrecisionResult {
  double value = 0.0;
  // Distinct log prefixes the net could not replay.
  std::size_t skipped_prefixes = 0;
  // Some silent closure hit the marking limit.
  bool limit_hit = false;
};

// Escaping edges over the prefix automaton of the log, replayed on net.
// UndefinedMetricError when no replayable prefix enables any activity.
PrecisionResult precision(const EventLog& log, const WfNet& net, const NetLimits& limits = {});

// Harmonic mean, 0 when both are 0. Arguments outside [0,1] are a ContractError.
double f_score(double fitness, double precision);

struct ConformanceReport {
  double fitness = 0.0;
  // Empty when precision is undefined for this log and model.
  std::optional<double> precision;
  std::optional<double> f_score;
  std::size_t skipped_prefixes = 0;
  bool limit_hit = false;
  std::vector<TraceFit> per_trace;
};

ConformanceReport evaluate(const EventLog& log, const Node& model, const NetLimits& limits = {}, unsigned threads = 1);

// {"fitness", "precision", "f_score", "skipped_prefixes", "per_trace": [{"trace", "count", "fits"}]}
// plus "limit_hit". Undefined values are null.
std::string report_to_json(const ConformanceReport& report, const ActivityTable& activities);

}  // namespace powl2
