// Acceptance suite: one PASS/FAIL line per criterion. Optional argument: an
// event log for the informational run of criterion 8.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "builders.hpp"
#include "powl/conformance.hpp"
#include "powl/discovery.hpp"
#include "powl/language.hpp"
#include "powl/log_io.hpp"
#include "powl/sampling.hpp"
#include "powl/wfnet.hpp"
#include "random_model.hpp"

using namespace powl2;
using namespace powl2::fixtures;

namespace {

constexpr std::uint64_t kSeed = 20240611;
constexpr int kSampledLogs = 250;
constexpr int kRandomLogs = 60;
constexpr std::size_t kMaxTraces = 50;
constexpr std::size_t kMaxAlphabet = 8;
constexpr int kRoundTripModels = 150;
constexpr std::size_t kRoundTripMaxLen = 8;
constexpr double kFScoreTolerance = 1e-12;
constexpr double kInformationalThreshold = 0.2;

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const Outcome& o, double seconds) {
  if (!o.pass) ++failures;
  std::printf("%s [%d] %s: %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str(), seconds);
  std::fflush(stdout);
}

void run(int id, const std::string& title, const std::function<Outcome()>& body) {
  auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  report(id, title, o, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
}

struct Discovered {
  EventLog log;
  NodePtr model;
};

// Criterion 1 corpus, shared with criteria 5, 6 and 7.
std::vector<Discovered> build_corpus() {
  std::mt19937_64 rng(kSeed);
  std::vector<Discovered> out;
  for (int i = 0; i < kSampledLogs; ++i) {
    auto m = random_model(rng, {kMaxAlphabet, 4, true, true});
    std::size_t n = std::uniform_int_distribution<std::size_t>(1, kMaxTraces)(rng);
    auto log = sample_traces(*m, {n, rng(), 0.3});
    out.push_back({log, discover(log)});
  }
  for (int i = 0; i < kRandomLogs; ++i) {
    std::size_t sigma = std::uniform_int_distribution<std::size_t>(1, kMaxAlphabet)(rng);
    std::size_t n = std::uniform_int_distribution<std::size_t>(1, kMaxTraces)(rng);
    auto log = random_log(rng, sigma, n, 10);
    out.push_back({log, discover(log)});
  }
  return out;
}

void collect_choice_graphs(const NodePtr& m, std::vector<const ChoiceGraph*>& out) {
  if (auto g = m->as<ChoiceGraph>()) {
    out.push_back(g);
    for (const auto& c : g->children) collect_choice_graphs(c, out);
  } else if (auto p = m->as<PartialOrder>()) {
    for (const auto& c : p->children) collect_choice_graphs(c, out);
  } else if (auto l = m->as<Loop>()) {
    collect_choice_graphs(l->body, out);
    collect_choice_graphs(l->redo, out);
  }
}

bool acyclic(const ChoiceGraph& g) {
  const std::size_t n = g.children.size();
  std::vector<int> color(n, 0);
  std::function<bool(std::size_t)> dfs = [&](std::size_t v) {
    color[v] = 1;
    for (const auto& [from, to] : g.edges) {
      if (!from.is_child() || from.index() != v || !to.is_child()) continue;
      if (color[to.index()] == 1) return false;
      if (color[to.index()] == 0 && !dfs(to.index())) return false;
    }
    color[v] = 2;
    return true;
  };
  for (std::size_t v = 0; v < n; ++v)
    if (color[v] == 0 && !dfs(v)) return false;
  return true;
}

// All Start -> End paths of an acyclic choice graph, as child index lists.
std::vector<std::vector<std::size_t>> paths(const ChoiceGraph& g) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> acc;
  std::function<void(NodeRef)> walk = [&](NodeRef at) {
    for (const auto& [from, to] : g.edges) {
      if (from != at) continue;
      if (to.is_end()) {
        out.push_back(acc);
        continue;
      }
      acc.push_back(to.index());
      walk(to);
      acc.pop_back();
    }
  };
  walk(NodeRef::start());
  return out;
}

Outcome criterion1(const std::vector<Discovered>& corpus) {
  std::size_t traces = 0, misses = 0;
  for (const auto& d : corpus) {
    MembershipChecker checker(*d.model);
    for (const auto& [trace, n] : d.log.variants()) {
      ++traces;
      if (!checker.accepts(trace)) ++misses;
    }
  }
  std::ostringstream s;
  s << kSampledLogs << " sampled + " << kRandomLogs << " random logs, " << traces << " distinct traces, " << misses
    << " not in the discovered language";
  return {misses == 0 && corpus.size() >= 250, s.str()};
}

Outcome criterion2() {
  std::vector<std::string> wrong;
  {
    ActivityTable t;
    auto a = t.intern("a"), b = t.intern("b"), c = t.intern("c"), d = t.intern("d");
    EventLog l1{{{a, b, c}, 3}, {{a, b, d}, 2}};
    auto s = log_stats(l1);
    std::set<Edge> dfg;
    for (const auto& [e, n] : s.dfg) dfg.insert(e);
    if (s.alphabet != std::set<ActivityId>{a, b, c, d}) wrong.push_back("L1 alphabet");
    if (s.starts != std::set<ActivityId>{a}) wrong.push_back("L1 starts");
    if (s.ends != std::set<ActivityId>{c, d}) wrong.push_back("L1 ends");
    if (dfg != std::set<Edge>{{a, b}, {b, c}, {b, d}}) wrong.push_back("L1 dfg");
  }
  {
    ActivityTable t;
    auto got = shuffle({tr(t, {"a", "b"}), tr(t, {"c"}), tr(t, {"d", "e"})}, Relation(3, {{0, 1}, {0, 2}}));
    std::set<Trace> expected{tr(t, {"a", "b", "c", "d", "e"}), tr(t, {"a", "b", "d", "c", "e"}),
                             tr(t, {"a", "b", "d", "e", "c"})};
    if (got != expected) wrong.push_back("shuffle");
  }
  {
    ActivityTable t;
    auto x1 = t.intern("x1"), x2 = t.intern("x2"), x3 = t.intern("x3");
    if (project(EventLog{{{x1, x2, x1}, 1}}, {x1, x3}, false) != EventLog{{{x1, x1}, 1}}) wrong.push_back("projection");
  }
  std::string detail = "L1 stats, shuffle (3 interleavings), projection <x1,x1>";
  for (const auto& w : wrong) detail += "; mismatch: " + w;
  return {wrong.empty(), detail};
}

Outcome criterion3() {
  ActivityTable t;
  auto receive = act(t, "Receive Order"), check = act(t, "Check Stock"), cancel = act(t, "Cancel Order"),
       ship = act(t, "Ship Order");
  auto gather = act(t, "Gather Production Materials"), schedule = act(t, "Schedule Production"),
       notify = act(t, "Notify Customer"), execute = act(t, "Execute Production");
  // children: gather 0, schedule 1, notify 2, execute 3
  auto production = po({gather, schedule, notify, execute}, {{1, 2}, {1, 3}, {0, 3}});
  // children: receive 0, check 1, cancel 2, ship 3, production 4
  auto truth = cg({receive, check, cancel, ship, production}, {{S, C(0)},
                                                               {C(0), C(1)},
                                                               {C(0), C(4)},
                                                               {C(1), C(2)},
                                                               {C(1), C(3)},
                                                               {C(4), C(3)},
                                                               {C(2), E},
                                                               {C(3), E}});
  auto language = enumerate_language(*truth, {16, 2});
  if (language.truncated) return {false, "ground-truth enumeration truncated"};
  EventLog log;
  for (const auto& tr : language.traces) log.add(tr);
  auto model = discover(log);

  const ActivityId g = *t.find("Gather Production Materials"), s = *t.find("Schedule Production"),
                   n = *t.find("Notify Customer"), e = *t.find("Execute Production");
  const ActivityId c = *t.find("Cancel Order"), sh = *t.find("Ship Order");

  bool found_po = false;
  std::function<void(const NodePtr&)> visit = [&](const NodePtr& m) {
    if (auto p = m->as<PartialOrder>()) {
      std::map<ActivityId, std::size_t> index;
      bool leaves = p->children.size() == 4;
      for (std::size_t i = 0; leaves && i < 4; ++i) {
        auto a = p->children[i]->as<Activity>();
        if (!a) {
          leaves = false;
          break;
        }
        index[a->label] = i;
      }
      if (leaves && index.size() == 4 && index.contains(g) && index.contains(s) && index.contains(n) &&
          index.contains(e)) {
        std::set<std::pair<ActivityId, ActivityId>> edges;
        for (auto [i, j] : p->order.pairs())
          edges.insert({p->children[i]->as<Activity>()->label, p->children[j]->as<Activity>()->label});
        found_po |= edges == std::set<std::pair<ActivityId, ActivityId>>{{s, n}, {s, e}, {g, e}};
      }
      for (const auto& ch : p->children) visit(ch);
    } else if (auto gr = m->as<ChoiceGraph>()) {
      for (const auto& ch : gr->children) visit(ch);
    } else if (auto l = m->as<Loop>()) {
      visit(l->body);
      visit(l->redo);
    }
  };
  visit(model);

  std::vector<const ChoiceGraph*> graphs;
  collect_choice_graphs(model, graphs);
  bool separated = false;
  for (const auto* gr : graphs) {
    bool has_cancel = false, has_ship = false;
    for (const auto& ch : gr->children) {
      has_cancel |= ch->uses(c);
      has_ship |= ch->uses(sh);
    }
    if (!has_cancel || !has_ship || !acyclic(*gr)) continue;
    bool ok = true;
    for (const auto& path : paths(*gr)) {
      bool pc = false, ps = false;
      for (auto i : path) {
        pc |= gr->children[i]->uses(c);
        ps |= gr->children[i]->uses(sh);
      }
      ok &= !(pc && ps);
    }
    separated |= ok;
  }
  auto discovered_language = enumerate_language(*model, {16, 2});
  bool same_language = !discovered_language.truncated && discovered_language.traces == language.traces;

  std::ostringstream d;
  d << log.variant_count() << " ground-truth traces; production partial order {S<N,S<E,G<E} "
    << (found_po ? "found" : "missing") << "; cancel/ship " << (separated ? "on disjoint paths" : "not separated")
    << "; language " << (same_language ? "equals ground truth" : "differs from ground truth");
  return {found_po && separated && same_language, d.str()};
}

Outcome criterion4() {
  std::mt19937_64 rng(kSeed + 4);
  int checked = 0, mismatches = 0, skipped = 0;
  while (checked < kRoundTripModels) {
    auto m = random_model(rng, {kMaxAlphabet, 4, false, true});
    auto expected = enumerate_language(*m, {kRoundTripMaxLen, 2});
    if (expected.truncated) {
      ++skipped;
      continue;
    }
    auto got = net_language(powl_to_wfnet(*m), kRoundTripMaxLen);
    if (got.truncated || got.traces != expected.traces) ++mismatches;
    ++checked;
  }
  std::ostringstream d;
  d << checked << " models with finite language, " << mismatches << " mismatches";
  if (skipped) d << ", " << skipped << " truncated models skipped";
  return {mismatches == 0, d.str()};
}

Outcome criterion5(const std::vector<Discovered>& corpus) {
  int sound = 0, unsound = 0, inconclusive = 0;
  std::string first_reason;
  for (const auto& d : corpus) {
    auto v = check_soundness(powl_to_wfnet(*d.model));
    switch (v.status) {
      case SoundnessVerdict::Status::kSound: ++sound; break;
      case SoundnessVerdict::Status::kUnsound:
        ++unsound;
        if (first_reason.empty()) first_reason = v.reason;
        break;
      case SoundnessVerdict::Status::kInconclusive: ++inconclusive; break;
    }
  }
  std::ostringstream s;
  s << sound << " sound, " << unsound << " unsound, " << inconclusive << " inconclusive";
  if (!first_reason.empty()) s << " (first: " << first_reason << ")";
  return {unsound == 0 && inconclusive == 0, s.str()};
}

Outcome criterion6(const std::vector<Discovered>& corpus) {
  std::size_t graphs = 0, cyclic = 0;
  for (const auto& d : corpus) {
    std::vector<const ChoiceGraph*> found;
    collect_choice_graphs(d.model, found);
    graphs += found.size();
    for (const auto* g : found) cyclic += !acyclic(*g);
  }
  std::ostringstream s;
  s << graphs << " choice graphs, " << cyclic << " cyclic";
  return {cyclic == 0, s.str()};
}

Outcome criterion7(const std::vector<Discovered>& corpus) {
  int not_one = 0;
  for (const auto& d : corpus)
    if (fitness(d.log, *d.model) != 1.0) ++not_one;
  int violations = 0;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      double f = i / 9.0, p = j / 9.0;
      if (std::abs(f_score(f, p) - f_score(p, f)) > kFScoreTolerance) ++violations;
      if (std::abs(f_score(f, f) - f) > kFScoreTolerance) ++violations;
      if (std::abs(f_score(f, 0.0)) > kFScoreTolerance) ++violations;
    }
  }
  std::ostringstream s;
  s << corpus.size() << " unfiltered discoveries with fitness != 1: " << not_one
    << "; f-score grid 100 pairs, violations: " << violations << " (tol " << kFScoreTolerance << ")";
  return {not_one == 0 && violations == 0, s.str()};
}

Outcome criterion8(const std::string& log_path) {
  ActivityTable table;
  EventLog log;
  std::string source;
  if (log_path.empty()) {
    // Bundled stand-in: a sample of the running example with a few noisy traces.
    auto production = po({act(table, "Gather"), act(table, "Schedule"), act(table, "Notify"), act(table, "Execute")},
                         {{1, 2}, {1, 3}, {0, 3}});
    auto model = cg({act(table, "Receive"), act(table, "Check"), act(table, "Cancel"), act(table, "Ship"), production},
                    {{S, C(0)}, {C(0), C(1)}, {C(0), C(4)}, {C(1), C(2)}, {C(1), C(3)}, {C(4), C(3)}, {C(2), E}, {C(3), E}});
    log = sample_traces(*model, {200, kSeed, 0.3});
    log.add(tr(table, {"Receive", "Ship"}), 3);
    log.add(tr(table, {"Receive", "Check", "Cancel", "Ship"}), 2);
    source = "generated running-example sample";
  } else {
    log = read_log_file(log_path, table, guess_log_format(log_path));
    source = log_path;
  }
  auto model = discover(log, {kInformationalThreshold});
  auto r = evaluate(log, *model);
  std::ostringstream s;
  s.precision(4);
  s << "published benchmark scores not reproduced (external logs, alignment-based metrics); informational run on " << source
    << " with threshold " << kInformationalThreshold << ": fitness=" << r.fitness << " precision=";
  if (r.precision) {
    s << *r.precision << " f_score=" << *r.f_score;
  } else {
    s << "undefined";
  }
  return {true, s.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string informational_log = argc > 1 ? argv[1] : "";
  std::vector<Discovered> corpus;
  auto start = std::chrono::steady_clock::now();
  try {
    corpus = build_corpus();
  } catch (const std::exception& e) {
    std::printf("corpus construction failed: %s\n", e.what());
  }
  const double corpus_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("corpus: %zu logs discovered in %.2fs\n", corpus.size(), corpus_seconds);

  run(1, "fitness guarantee on generated logs", [&] { return criterion1(corpus); });
  run(2, "micro-examples", criterion2);
  run(3, "running-example structure", criterion3);
  run(4, "WF-net language round trip", criterion4);
  run(5, "soundness of converted discoveries", [&] { return criterion5(corpus); });
  run(6, "acyclic choice graphs in discoveries", [&] { return criterion6(corpus); });
  run(7, "conformance identities", [&] { return criterion7(corpus); });
  run(8, "evaluation substitute", [&] { return criterion8(informational_log); });

  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
