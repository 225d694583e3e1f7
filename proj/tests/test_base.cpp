#include <gtest/gtest.h>

#include "rtm/base.hpp"
#include "rtm/error.hpp"

using namespace rtm;

TEST(Base, AdvanceWrapsBothWays) {
  BaseSystem b3 = BaseSystem::cyclic(3);
  EXPECT_EQ(advance(b3, 0, 4), 1);
  EXPECT_EQ(advance(BaseSystem::cyclic(2), 1, -3), 0);
  for (int o = 0; o < 3; ++o)
    for (int k = -7; k <= 7; ++k) EXPECT_EQ(advance(b3, advance(b3, o, k), -k), o);
}

TEST(Base, CyclicOrbitVisitsEveryStateOnce) {
  BaseSystem b = BaseSystem::cyclic(5);
  std::vector<int> seen(5, 0);
  int o = 2;
  for (int i = 0; i < 5; ++i) {
    ++seen[o];
    o = b.step(o);
  }
  for (int s : seen) EXPECT_EQ(s, 1);
  EXPECT_TRUE(b.single_cycle());
  EXPECT_DOUBLE_EQ(b.weight(3), 0.2);
}

TEST(Base, ReturnTimesOnPeriodThree) {
  BaseSystem b = BaseSystem::cyclic(3);
  EXPECT_EQ(return_times(b, 0, {0}, 10), (std::vector<int>{3, 6, 9}));
}

TEST(Base, InducedAndJumpMaps) {
  Return r = induced_map(BaseSystem::cyclic(4), {0, 2}, 0);
  EXPECT_EQ(r.eta, 2);
  EXPECT_EQ(r.omega, 2);
  Return j = jump_map(BaseSystem::cyclic(3), {0}, 4, 0);
  EXPECT_EQ(j.eta, 6);
  EXPECT_EQ(j.omega, 0);
}

TEST(Base, InducedSumReachesFullPeriods) {
  BaseSystem b = BaseSystem::cyclic(6);
  StateSet target = {1, 4};
  // two hits per period of six
  EXPECT_EQ(induced_sum(b, target, 1, 2), 6);
  EXPECT_EQ(induced_sum(b, target, 1, 10), 30);
}

TEST(Base, SampledPathKeepsLabels) {
  BaseSystem b = BaseSystem::sampled_path({1, 0, 0, 1});
  EXPECT_EQ(b.size(), 4);
  EXPECT_EQ(b.label(0), 1);
  EXPECT_EQ(b.step(3), 0);
  EXPECT_EQ(b.mode(), BaseMode::SampledPath);
}

TEST(Base, RejectsNonBijection) {
  EXPECT_THROW(BaseSystem({0, 0}, {0.5, 0.5}, BaseMode::Cyclic, {0, 1}), Error);
  EXPECT_THROW(BaseSystem::cyclic(0), Error);
}

TEST(Base, CycleStartsAndAverage) {
  EXPECT_THROW(BaseSystem({1, 0, 3, 2}, {0.25, 0.25, 0.25, 0.25}, BaseMode::Cyclic, {0, 1, 2, 3}),
               Error);
  BaseSystem b({1, 0, 3, 2}, {0.25, 0.25, 0.25, 0.25}, BaseMode::SampledPath, {0, 1, 2, 3});
  EXPECT_EQ(cycle_starts(b), (std::vector<int>{0, 2}));
  EXPECT_DOUBLE_EQ(base_average(b, std::vector<double>{1, 2, 3, 4}), 2.5);
  EXPECT_DOUBLE_EQ(set_weight(b, {1, 3}), 0.5);
}
