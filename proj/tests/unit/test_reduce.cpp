#include <gtest/gtest.h>

#include <random>

#include "builders.hpp"
#include "powl/language.hpp"
#include "powl/reduce.hpp"
#include "random_model.hpp"

using namespace powl2;
using namespace powl2::fixtures;

TEST(Reduce, ChainBecomesPartialOrder) {
  ActivityTable t;
  auto x = act(t, "x"), y = act(t, "y");
  auto m = cg({x, y}, {{S, C(0)}, {C(0), C(1)}, {C(1), E}});
  EXPECT_TRUE(same_model(reduce_model(m), po({x, y}, {{0, 1}})));
}

TEST(Reduce, GroupsSiblingsWithSameNeighbours) {
  ActivityTable t;
  auto x = act(t, "x"), y = act(t, "y"), z = act(t, "z");
  auto m = cg({x, y, z}, {{S, C(0)}, {S, C(1)}, {C(0), C(2)}, {C(1), C(2)}, {C(2), E}});
  auto r = reduce_model(m);
  // x|y grouped, then the chain (x|y) -> z is a sequence.
  EXPECT_TRUE(same_model(r, po({make_exclusive_choice({x, y}), z}, {{0, 1}})));
  EXPECT_EQ(enumerate_language(*r, {}).traces, enumerate_language(*m, {}).traces);
}

TEST(Reduce, FlattensTotallyOrderedNestedPartialOrders) {
  ActivityTable t;
  auto a = act(t, "a"), b = act(t, "b"), c = act(t, "c");
  auto m = po({po({a, b}, {{0, 1}}), c}, {{0, 1}});
  EXPECT_TRUE(same_model(reduce_model(m), po({a, b, c}, {{0, 1}, {1, 2}})));
}

TEST(Reduce, KeepsConcurrentNestedPartialOrders) {
  ActivityTable t;
  auto m = po({po({act(t, "a"), act(t, "b")}, {{0, 1}}), act(t, "c")});
  EXPECT_TRUE(same_model(reduce_model(m), m));
}

TEST(Reduce, Idempotent) {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 200; ++i) {
    auto r = reduce_model(random_model(rng));
    EXPECT_TRUE(same_model(reduce_model(r), r)) << i;
  }
}

TEST(Reduce, PreservesLanguageAndValidity) {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 300; ++i) {
    auto m = random_model(rng, {7, 4, false, true});
    auto r = reduce_model(m);
    EXPECT_TRUE(is_valid(*r)) << i;
    EXPECT_EQ(enumerate_language(*r, {8, 2}).traces, enumerate_language(*m, {8, 2}).traces) << i;
  }
}
