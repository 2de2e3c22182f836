#pragma once

#include "randgener/digest.hpp"

#include "json.hpp"

#include <cstdint>
#include <functional>
#include <queue>
#include <string>
#include <string_view>
#include <vector>

namespace randgener {

using Tick = std::uint64_t;

/// Discrete-event queue. Events run in (tick, insertion order); time never
/// moves backwards.
class EventQueue {
 public:
  using Action = std::function<void()>;

  void schedule(Tick at, Action action) {
    if (at < now_) throw Error(ErrorKind::invalid_argument, "cannot schedule an event in the past");
    heap_.push(Entry{at, next_seq_++, std::move(action)});
  }

  Tick now() const { return now_; }
  bool empty() const { return heap_.empty(); }
  std::size_t pending() const { return heap_.size(); }

  /// Runs the earliest event; returns false when the queue is empty.
  bool step() {
    if (heap_.empty()) return false;
    Entry e = heap_.top();
    heap_.pop();
    now_ = e.tick;
    e.action();
    return true;
  }

  void run() {
    while (step()) {
    }
  }

  void run_until(Tick limit) {
    while (!heap_.empty() && heap_.top().tick <= limit) step();
    if (now_ < limit) now_ = limit;
  }

  void advance_to(Tick t) {
    if (t < now_) throw Error(ErrorKind::invalid_argument, "cannot move time backwards");
    now_ = t;
  }

 private:
  struct Entry {
    Tick tick;
    std::uint64_t seq;
    Action action;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      return a.tick != b.tick ? a.tick > b.tick : a.seq > b.seq;
    }
  };

  std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
  Tick now_ = 0;
  std::uint64_t next_seq_ = 0;
};

template <typename Payload>
struct Envelope {
  std::size_t sender;
  Tick sent;
  Tick delivered;
  Payload payload;
};

/// Reliable authenticated broadcast with a fixed delay. Every registered node,
/// the sender included, receives each message; offline senders are dropped.
template <typename Payload>
class Network {
 public:
  using Handler = std::function<void(std::size_t receiver, const Envelope<Payload>&)>;

  Network(EventQueue& queue, std::size_t nodes, Tick delay = 1)
      : queue_(queue), online_(nodes, true), delay_(delay) {}

  void on_deliver(Handler h) { handler_ = std::move(h); }
  void set_online(std::size_t node, bool online) { online_.at(node) = online; }
  bool online(std::size_t node) const { return online_.at(node); }
  std::size_t nodes() const { return online_.size(); }
  Tick delay() const { return delay_; }
  std::size_t suppressed() const { return suppressed_; }

  void broadcast(std::size_t sender, Payload payload, Tick at) {
    if (sender >= online_.size()) throw Error(ErrorKind::invalid_argument, "unregistered sender");
    if (!online_[sender]) {
      ++suppressed_;
      return;
    }
    Envelope<Payload> env{sender, at, at + delay_, std::move(payload)};
    queue_.schedule(env.delivered, [this, env = std::move(env)] {
      for (std::size_t r = 0; r < online_.size(); ++r)
        if (handler_) handler_(r, env);
    });
  }

 private:
  EventQueue& queue_;
  std::vector<bool> online_;
  Tick delay_;
  Handler handler_;
  std::size_t suppressed_ = 0;
};

enum class BehaviorKind { honest, withhold_reveal, invalid_proof, offline_commit, late_commit, colluding_withhold };

inline std::string_view behavior_name(BehaviorKind k) {
  switch (k) {
    case BehaviorKind::honest: return "honest";
    case BehaviorKind::withhold_reveal: return "withhold_reveal";
    case BehaviorKind::invalid_proof: return "invalid_proof";
    case BehaviorKind::offline_commit: return "offline_commit";
    case BehaviorKind::late_commit: return "late_commit";
    case BehaviorKind::colluding_withhold: return "colluding_withhold";
  }
  return "honest";
}

inline BehaviorKind parse_behavior_kind(std::string_view s) {
  for (auto k : {BehaviorKind::honest, BehaviorKind::withhold_reveal, BehaviorKind::invalid_proof,
                 BehaviorKind::offline_commit, BehaviorKind::late_commit, BehaviorKind::colluding_withhold})
    if (behavior_name(k) == s) return k;
  throw Error(ErrorKind::invalid_argument, "unknown behavior: " + std::string(s));
}

struct Behavior {
  BehaviorKind kind = BehaviorKind::honest;
  std::vector<std::size_t> coalition;  // colluding_withhold only

  static Behavior honest() { return {}; }
  static Behavior of(BehaviorKind k) { return {k, {}}; }

  bool commits_on_time() const { return kind != BehaviorKind::offline_commit && kind != BehaviorKind::late_commit; }
  bool withholds() const {
    return kind == BehaviorKind::withhold_reveal || kind == BehaviorKind::colluding_withhold ||
           kind == BehaviorKind::offline_commit;
  }

  friend bool operator==(const Behavior&, const Behavior&) = default;
};

inline nlohmann::json to_json(const Behavior& b) {
  if (b.coalition.empty()) return std::string(behavior_name(b.kind));
  return nlohmann::json{{"kind", behavior_name(b.kind)}, {"coalition", b.coalition}};
}

/// Accepts either "kind" or {"kind": ..., "coalition": [...]}.
inline Behavior behavior_from_json(const nlohmann::json& j) {
  if (j.is_string()) return Behavior::of(parse_behavior_kind(j.get<std::string>()));
  Behavior b = Behavior::of(parse_behavior_kind(j.at("kind").get<std::string>()));
  if (j.contains("coalition")) b.coalition = j.at("coalition").get<std::vector<std::size_t>>();
  return b;
}

}  // namespace randgener
