#include "randgener/sim_net.hpp"

#include <gtest/gtest.h>

#include <string>

using namespace randgener;

TEST(EventQueue, OrdersByTickThenInsertion) {
  EventQueue q;
  std::string log;
  q.schedule(3, [&] { log += 'c'; });
  q.schedule(1, [&] { log += 'a'; });
  q.schedule(3, [&] { log += 'd'; });
  q.schedule(2, [&] { log += 'b'; });
  q.run();
  EXPECT_EQ(log, "abcd");
  EXPECT_EQ(q.now(), 3u);
  EXPECT_TRUE(q.empty());
}

TEST(EventQueue, EventsMayScheduleMore) {
  EventQueue q;
  std::vector<Tick> seen;
  std::function<void()> tick = [&] {
    seen.push_back(q.now());
    if (seen.size() < 4) q.schedule(q.now() + 2, tick);
  };
  q.schedule(0, tick);
  q.run();
  EXPECT_EQ(seen, (std::vector<Tick>{0, 2, 4, 6}));
}

TEST(EventQueue, RejectsPast) {
  EventQueue q;
  q.schedule(5, [] {});
  q.run();
  EXPECT_THROW(q.schedule(4, [] {}), Error);
  EXPECT_THROW(q.advance_to(2), Error);
  EXPECT_NO_THROW(q.schedule(5, [] {}));
}

TEST(EventQueue, RunUntilStopsAtLimit) {
  EventQueue q;
  int hits = 0;
  for (Tick t : {1, 2, 3, 10}) q.schedule(t, [&] { ++hits; });
  q.run_until(3);
  EXPECT_EQ(hits, 3);
  EXPECT_EQ(q.pending(), 1u);
  q.run_until(5);
  EXPECT_EQ(q.now(), 5u);
}

TEST(Network, BroadcastReachesEveryNodeAfterDelay) {
  EventQueue q;
  Network<int> net(q, 4, 2);
  std::vector<std::pair<std::size_t, Tick>> got;
  net.on_deliver([&](std::size_t r, const Envelope<int>& e) {
    EXPECT_EQ(e.payload, 7);
    EXPECT_EQ(e.sent, 1u);
    got.emplace_back(r, q.now());
  });
  q.schedule(1, [&] { net.broadcast(2, 7, 1); });
  q.run();
  ASSERT_EQ(got.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(got[i], std::make_pair(i, Tick{3}));
}

TEST(Network, OfflineSenderIsSuppressed) {
  EventQueue q;
  Network<int> net(q, 3);
  int delivered = 0;
  net.on_deliver([&](std::size_t, const Envelope<int>&) { ++delivered; });
  net.set_online(1, false);
  net.broadcast(1, 5, 0);
  net.broadcast(0, 5, 0);
  q.run();
  EXPECT_EQ(delivered, 3);
  EXPECT_EQ(net.suppressed(), 1u);
  EXPECT_THROW(net.broadcast(9, 1, 0), Error);
}

TEST(Network, MessagesKeepSendOrderWithinTick) {
  EventQueue q;
  Network<int> net(q, 1);
  std::vector<int> order;
  net.on_deliver([&](std::size_t, const Envelope<int>& e) { order.push_back(e.payload); });
  for (int i = 0; i < 5; ++i) net.broadcast(0, i, 0);
  q.run();
  EXPECT_EQ(order, (std::vector<int>{0, 1, 2, 3, 4}));
}

TEST(Behavior, JsonForms) {
  EXPECT_EQ(behavior_from_json("withhold_reveal").kind, BehaviorKind::withhold_reveal);
  Behavior c{BehaviorKind::colluding_withhold, {0, 2}};
  EXPECT_EQ(behavior_from_json(to_json(c)), c);
  EXPECT_EQ(to_json(Behavior::honest()), "honest");
  EXPECT_THROW(behavior_from_json("sleepy"), Error);
  EXPECT_TRUE(Behavior::of(BehaviorKind::offline_commit).withholds());
  EXPECT_FALSE(Behavior::of(BehaviorKind::late_commit).commits_on_time());
  EXPECT_FALSE(Behavior::of(BehaviorKind::invalid_proof).withholds());
}
