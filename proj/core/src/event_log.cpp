#include "powl/event_log.hpp"

#include <algorithm>
#include <stdexcept>

#include "powl/error.hpp"

namespace powl2 {

ActivityId ActivityTable::intern(std::string_view label) {
  std::string key(label);
  if (auto it = ids_.find(key); it != ids_.end()) return it->second;
  ActivityId id{static_cast<std::uint32_t>(labels_.size())};
  labels_.push_back(key);
  ids_.emplace(std::move(key), id);
  return id;
}

std::optional<ActivityId> ActivityTable::find(std::string_view label) const {
  if (auto it = ids_.find(std::string(label)); it != ids_.end()) return it->second;
  return std::nullopt;
}

const std::string& ActivityTable::label(ActivityId id) const {
  if (id.value >= labels_.size()) throw ContractError("activity id " + std::to_string(id.value) + " is not interned");
  return labels_[id.value];
}

EventLog::EventLog(std::initializer_list<std::pair<Trace, Count>> variants) {
  for (const auto& [trace, count] : variants) add(trace, count);
}

void EventLog::add(Trace trace, Count count) {
  if (count == 0) return;
  variants_[std::move(trace)] += count;
  total_ += count;
}

Count EventLog::count(const Trace& trace) const {
  auto it = variants_.find(trace);
  return it == variants_.end() ? 0 : it->second;
}

Count EventLog::event_count() const {
  Count n = 0;
  for (const auto& [trace, count] : variants_) n += trace.size() * count;
  return n;
}

LogStats log_stats(const EventLog& log) {
  LogStats stats;
  stats.total_traces = log.total();
  std::set<ActivityId> seen;
  for (const auto& [trace, count] : log.variants()) {
    if (trace.empty()) {
      stats.empty_traces += count;
      continue;
    }
    stats.starts.insert(trace.front());
    stats.ends.insert(trace.back());
    stats.start_freq[trace.front()] += count;
    stats.end_freq[trace.back()] += count;
    seen.clear();
    for (std::size_t i = 0; i < trace.size(); ++i) {
      stats.alphabet.insert(trace[i]);
      if (i + 1 < trace.size()) stats.dfg[{trace[i], trace[i + 1]}] += count;
      for (ActivityId before : seen) stats.ef.insert({before, trace[i]});
      seen.insert(trace[i]);
    }
  }
  return stats;
}

namespace {

template <typename Key>
std::set<ActivityId> keep_frequent(const std::map<Key, Count>& freq, double threshold) {
  Count max = 0;
  for (const auto& [key, count] : freq) max = std::max(max, count);
  std::set<ActivityId> kept;
  for (const auto& [key, count] : freq) {
    if (static_cast<double>(count) >= threshold * static_cast<double>(max)) kept.insert(key);
  }
  return kept;
}

}  // namespace

LogStats filter_noise(const LogStats& stats, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw ContractError("noise threshold must lie in [0,1], got " + std::to_string(threshold));
  }
  if (threshold == 0.0) return stats;

  LogStats out = stats;
  out.noise_filtered = true;

  std::map<ActivityId, Count> max_out;
  for (const auto& [edge, count] : stats.dfg) max_out[edge.first] = std::max(max_out[edge.first], count);
  out.dfg.clear();
  for (const auto& [edge, count] : stats.dfg) {
    if (static_cast<double>(count) >= threshold * static_cast<double>(max_out[edge.first])) out.dfg.emplace(edge, count);
  }

  out.starts = keep_frequent(stats.start_freq, threshold);
  out.ends = keep_frequent(stats.end_freq, threshold);
  std::erase_if(out.start_freq, [&](const auto& kv) { return !out.starts.contains(kv.first); });
  std::erase_if(out.end_freq, [&](const auto& kv) { return !out.ends.contains(kv.first); });
  return out;
}

EventLog project(const EventLog& log, const std::set<ActivityId>& keep, bool keep_empty) {
  EventLog out;
  for (const auto& [trace, count] : log.variants()) {
    Trace projected;
    std::copy_if(trace.begin(), trace.end(), std::back_inserter(projected),
                 [&](ActivityId a) { return keep.contains(a); });
    if (projected.empty() && !keep_empty) continue;
    out.add(std::move(projected), count);
  }
  return out;
}

std::set<ActivityId> alphabet_of(const EventLog& log) {
  std::set<ActivityId> out;
  for (const auto& [trace, count] : log.variants()) out.insert(trace.begin(), trace.end());
  return out;
}

}  // namespace powl2
