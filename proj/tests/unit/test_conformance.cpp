#include <gtest/gtest.h>

#include <random>

#include "builders.hpp"
#include "json.hpp"
#include "powl/conformance.hpp"
#include "powl/discovery.hpp"
#include "powl/error.hpp"
#include "powl/sampling.hpp"
#include "random_model.hpp"
#include "reference.hpp"

using namespace powl2;
using namespace powl2::fixtures;

namespace {

// Escaping edges computed from the model language instead of the net.
double precision_from_language(const EventLog& log, const std::set<Trace>& language) {
  std::map<Trace, std::set<ActivityId>> model_next, log_next;
  std::map<Trace, Count> weight;
  for (const auto& t : language)
    for (std::size_t i = 0; i < t.size(); ++i) model_next[Trace(t.begin(), t.begin() + i)].insert(t[i]);
  for (const auto& [t, n] : log.variants()) {
    for (std::size_t i = 0; i <= t.size(); ++i) {
      Trace prefix(t.begin(), t.begin() + i);
      weight[prefix] += n;
      if (i < t.size()) log_next[prefix].insert(t[i]);
    }
  }
  double escaping = 0, total = 0;
  for (const auto& [prefix, w] : weight) {
    for (auto x : model_next[prefix]) {
      total += w;
      if (!log_next[prefix].contains(x)) escaping += w;
    }
  }
  return 1.0 - escaping / total;
}

}  // namespace

TEST(Fitness, HalfTheTracesFit) {
  ActivityTable t;
  EventLog log{{tr(t, {"a"}), 1}, {tr(t, {"b"}), 1}};
  EXPECT_DOUBLE_EQ(fitness(log, *act(t, "a")), 0.5);
  auto fits = trace_fitness(log, *act(t, "a"));
  ASSERT_EQ(fits.size(), 2u);
  EXPECT_TRUE(fits[0].fits);
  EXPECT_FALSE(fits[1].fits);
}

TEST(Fitness, WeightedByMultiplicity) {
  ActivityTable t;
  EventLog log{{tr(t, {"a"}), 3}, {tr(t, {"b"}), 1}};
  EXPECT_DOUBLE_EQ(fitness(log, *act(t, "a")), 0.75);
  EXPECT_THROW(fitness(EventLog{}, *act(t, "a")), InputError);
}

TEST(Fitness, FlowerAcceptsEverything) {
  std::mt19937_64 rng(91);
  auto t = letters(4);
  auto m = flower(t, {"a", "b", "c", "d"});
  for (int i = 0; i < 20; ++i) EXPECT_DOUBLE_EQ(fitness(random_log(rng, 4, 20, 8), *m), 1.0);
}

TEST(Fitness, ThreadCountDoesNotMatter) {
  std::mt19937_64 rng(92);
  for (int i = 0; i < 20; ++i) {
    auto log = random_log(rng, 4, 40, 6);
    auto m = random_model(rng, {4, 3, true, true});
    EXPECT_DOUBLE_EQ(fitness(log, *m, 1), fitness(log, *m, 3));
  }
}

TEST(Precision, SequenceIsExact) {
  ActivityTable t;
  EventLog log{{tr(t, {"a", "b"}), 1}};
  auto p = precision(log, powl_to_wfnet(*po({act(t, "a"), act(t, "b")}, {{0, 1}})));
  EXPECT_DOUBLE_EQ(p.value, 1.0);
  EXPECT_EQ(p.skipped_prefixes, 0u);
}

TEST(Precision, FlowerIsImprecise) {
  ActivityTable t;
  EventLog log{{tr(t, {"a", "b"}), 1}};
  // prefixes <>, <a>, <a,b> each enable {a,b}; the log uses 1, 1 and 0 of them
  auto p = precision(log, powl_to_wfnet(*flower(t, {"a", "b"})));
  EXPECT_DOUBLE_EQ(p.value, 1.0 - 4.0 / 6.0);
  EXPECT_LT(p.value, 1.0);
}

TEST(Precision, SkipsUnreplayablePrefixes) {
  ActivityTable t;
  EventLog log{{tr(t, {"a", "b"}), 1}, {tr(t, {"b"}), 1}};
  auto p = precision(log, powl_to_wfnet(*po({act(t, "a"), act(t, "b")}, {{0, 1}})));
  EXPECT_DOUBLE_EQ(p.value, 1.0);
  EXPECT_EQ(p.skipped_prefixes, 1u);
}

TEST(Precision, UndefinedWithoutEnabledActivities) {
  EXPECT_THROW(precision(EventLog{{{}, 1}}, powl_to_wfnet(*tau())), UndefinedMetricError);
  auto report = evaluate(EventLog{{{}, 1}}, *tau());
  EXPECT_DOUBLE_EQ(report.fitness, 1.0);
  EXPECT_FALSE(report.precision);
  EXPECT_FALSE(report.f_score);
}

TEST(Precision, FullyObservedLanguageIsExact) {
  std::mt19937_64 rng(93);
  for (int i = 0; i < 60; ++i) {
    auto m = random_model(rng, {5, 3, false, true});
    EventLog log;
    for (const auto& t : reference_language(*m, 8)) log.add(t);
    if (log.empty()) continue;
    try {
      EXPECT_DOUBLE_EQ(precision(log, powl_to_wfnet(*m)).value, 1.0) << i;
    } catch (const UndefinedMetricError&) {
    }
  }
}

TEST(Precision, MatchesLanguageOracle) {
  std::mt19937_64 rng(94);
  int checked = 0;
  for (int i = 0; i < 150; ++i) {
    auto m = random_model(rng, {6, 4, false, true});
    auto log = sample_traces(*m, {6, static_cast<std::uint64_t>(i), 0.3});
    auto language = reference_language(*m, 8);
    try {
      auto p = precision(log, powl_to_wfnet(*m));
      EXPECT_NEAR(p.value, precision_from_language(log, language), 1e-12) << i;
      ++checked;
    } catch (const UndefinedMetricError&) {
    }
  }
  EXPECT_GT(checked, 100);
}

TEST(Precision, GeneralisingNeverHelps) {
  std::mt19937_64 rng(95);
  for (int i = 0; i < 60; ++i) {
    auto m = random_model(rng, {5, 3, true, true});
    auto log = sample_traces(*m, {30, static_cast<std::uint64_t>(i), 0.3});
    if (alphabet_of(log).empty()) continue;
    auto table = letters(8);
    std::vector<NodePtr> acts;
    for (auto a : alphabet_of(log)) acts.push_back(make_activity(a));
    auto all = acts.size() == 1 ? make_loop(make_silent(), acts.front())
                                : make_loop(make_silent(), make_exclusive_choice(acts));
    auto discovered = discover(log);
    double p_model = precision(log, powl_to_wfnet(*discovered)).value;
    double p_flower = precision(log, powl_to_wfnet(*all)).value;
    EXPECT_LE(p_flower, p_model + 1e-12) << i;
  }
}

TEST(FScore, Values) {
  EXPECT_DOUBLE_EQ(f_score(1.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(f_score(0.5, 1.0), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(f_score(0.7, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(f_score(0.0, 0.0), 0.0);
  EXPECT_THROW(f_score(1.1, 0.5), ContractError);
}

TEST(Report, Json) {
  ActivityTable t;
  EventLog log{{tr(t, {"a", "b"}), 2}, {tr(t, {"b"}), 1}};
  auto report = evaluate(log, *po({act(t, "a"), act(t, "b")}, {{0, 1}}));
  auto j = nlohmann::json::parse(report_to_json(report, t));
  EXPECT_DOUBLE_EQ(j["fitness"].get<double>(), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(j["precision"].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(j["f_score"].get<double>(), 0.8);
  EXPECT_EQ(j["skipped_prefixes"], 1);
  ASSERT_EQ(j["per_trace"].size(), 2u);
  EXPECT_EQ(j["per_trace"][0]["trace"], nlohmann::json({"a", "b"}));
  EXPECT_EQ(j["per_trace"][0]["count"], 2);
  EXPECT_EQ(j["per_trace"][1]["fits"], false);
}
