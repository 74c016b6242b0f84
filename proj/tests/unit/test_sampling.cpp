#include <gtest/gtest.h>

#include <random>

#include "builders.hpp"
#include "powl/error.hpp"
#include "powl/language.hpp"
#include "powl/sampling.hpp"
#include "random_model.hpp"

using namespace powl2;
using namespace powl2::fixtures;

TEST(Sampling, SilentModel) {
  EXPECT_EQ(sample_traces(*tau(), {3, 1, 0.3}), (EventLog{{{}, 3}}));
}

TEST(Sampling, ActivityModel) {
  ActivityTable t;
  EXPECT_EQ(sample_traces(*act(t, "a"), {2, 99, 0.3}), (EventLog{{tr(t, {"a"}), 2}}));
}

TEST(Sampling, NoRedoWithZeroProbability) {
  ActivityTable t;
  EXPECT_EQ(sample_traces(*make_loop(act(t, "a"), act(t, "b")), {20, 4, 0.0}), (EventLog{{tr(t, {"a"}), 20}}));
}

TEST(Sampling, RejectsBadRedoProbability) {
  EXPECT_THROW(sample_traces(*tau(), {1, 0, 1.0}), ContractError);
  EXPECT_THROW(sample_traces(*tau(), {1, 0, -0.5}), ContractError);
}

TEST(Sampling, DeterministicForSeed) {
  std::mt19937_64 rng(61);
  for (int i = 0; i < 20; ++i) {
    auto m = random_model(rng);
    EXPECT_EQ(sample_traces(*m, {30, 7, 0.4}), sample_traces(*m, {30, 7, 0.4}));
  }
}

TEST(Sampling, TracesAreMembers) {
  std::mt19937_64 rng(62);
  for (int i = 0; i < 200; ++i) {
    auto m = random_model(rng);
    MembershipChecker checker(*m);
    auto log = sample_traces(*m, {25, static_cast<std::uint64_t>(i), 0.4});
    for (const auto& [trace, n] : log.variants()) {
      ASSERT_TRUE(checker.accepts(trace)) << i;
    }
  }
}

TEST(Sampling, InterleavingsRoughlyUniform) {
  ActivityTable t;
  auto m = po({act(t, "a"), act(t, "b"), act(t, "c")});
  auto log = sample_traces(*m, {6000, 5, 0.3});
  ASSERT_EQ(log.variant_count(), 6u);
  for (const auto& [trace, n] : log.variants()) {
    EXPECT_GT(n, 850u);
    EXPECT_LT(n, 1150u);
  }
}
