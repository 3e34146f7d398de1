#include "avp/belief.hpp"

#include <gtest/gtest.h>

#include <vector>

using namespace avp;

TEST(Belief, Init)
{
  const auto b = init_beliefs(42);
  ASSERT_EQ(b.size(), 42);
  for (double x : b.beliefs) {
    EXPECT_EQ(x, 0.5);
  }
  EXPECT_EQ(init_beliefs(1).beliefs, std::vector<double>{0.5});
  EXPECT_THROW(init_beliefs(0), std::invalid_argument);
}

TEST(Belief, ObservationUpdate)
{
  const auto prev = init_beliefs(4);
  const std::vector<int> vac{0};
  const std::vector<int> occ{1};
  EXPECT_EQ(observation_update(prev, vac, occ).beliefs, (std::vector<double>{0.0, 1.0, 0.5, 0.5}));
  EXPECT_EQ(observation_update(prev, {}, {}).beliefs, prev.beliefs);

  BeliefMap full{{1.0, 1.0}, 0.0};
  const std::vector<int> zero{0};
  EXPECT_EQ(observation_update(full, zero, {}).beliefs, (std::vector<double>{0.0, 1.0}));

  const std::vector<int> both{2};
  EXPECT_THROW(observation_update(prev, both, both), std::invalid_argument);
  const std::vector<int> outside{9};
  EXPECT_THROW(observation_update(prev, outside, {}), std::invalid_argument);
}

TEST(Belief, ObservationUpdateIdempotent)
{
  const auto prev = init_beliefs(5);
  const std::vector<int> vac{0, 3};
  const std::vector<int> occ{4};
  const auto once = observation_update(prev, vac, occ);
  EXPECT_EQ(observation_update(once, vac, occ).beliefs, once.beliefs);
}

TEST(Belief, IntentionUpdateExamples)
{
  const auto initial = init_beliefs(5);
  const std::vector<int> vac{1, 3};
  {
    const std::vector<SpotIntents> in{{{3, 0.4}}};
    const auto b = intention_update(initial, vac, in);
    EXPECT_DOUBLE_EQ(b[3], 0.4);
    // Vacant with nobody intending it.
    EXPECT_EQ(b[1], 0.0);
    // Not vacant: untouched.
    EXPECT_EQ(b[0], 0.5);
  }
  {
    const std::vector<SpotIntents> in{{{3, 0.5}}, {{3, 0.5}}};
    EXPECT_EQ(intention_update(initial, vac, in)[3], 0.75);
  }
  const std::vector<SpotIntents> bad{{{3, 1.5}}};
  EXPECT_THROW(intention_update(initial, vac, bad), std::invalid_argument);
}

TEST(Belief, IntentionUpdateOrderIndependentAndMonotone)
{
  const auto initial = init_beliefs(3);
  const std::vector<int> vac{0, 1, 2};
  const std::vector<SpotIntents> ab{{{0, 0.3}, {1, 0.7}}, {{0, 0.6}}};
  const std::vector<SpotIntents> ba{{{0, 0.6}}, {{0, 0.3}, {1, 0.7}}};
  const auto x = intention_update(initial, vac, ab);
  const auto y = intention_update(initial, vac, ba);
  for (int i = 0; i < 3; ++i) {
    EXPECT_DOUBLE_EQ(x[i], y[i]);
  }
  auto more = ab;
  more.push_back({{1, 0.1}, {2, 0.2}});
  const auto z = intention_update(initial, vac, more);
  for (int i = 0; i < 3; ++i) {
    EXPECT_GE(z[i], x[i]);
    EXPECT_GE(z[i], 0.0);
    EXPECT_LE(z[i], 1.0);
  }
}
