#ifndef COOPALLOC_EVENT_QUEUE_HPP
#define COOPALLOC_EVENT_QUEUE_HPP

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <vector>

namespace coopalloc {

/// Time-ordered event list over an integer tick clock. Events scheduled for
/// the same tick run in scheduling order.
class EventQueue {
 public:
  using Action = std::function<void()>;

  std::uint64_t now() const { return now_; }
  bool empty() const { return events_.empty(); }

  void schedule_at(std::uint64_t tick, Action action) {
    if (tick < now_) throw std::logic_error("event scheduled in the past");
    events_.push({tick, next_seq_++, std::move(action)});
  }

  void schedule_in(std::uint64_t delay, Action action) {
    schedule_at(now_ + delay, std::move(action));
  }

  /// Runs events until none remain.
  void run() {
    while (!events_.empty()) {
      Event ev = events_.top();
      events_.pop();
      now_ = ev.tick;
      ev.action();
    }
  }

 private:
  struct Event {
    std::uint64_t tick;
    std::uint64_t seq;
    Action action;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.tick != b.tick ? a.tick > b.tick : a.seq > b.seq;
    }
  };

  std::priority_queue<Event, std::vector<Event>, Later> events_;
  std::uint64_t now_ = 0;
  std::uint64_t next_seq_ = 0;
};

}  // namespace coopalloc

#endif  // COOPALLOC_EVENT_QUEUE_HPP
