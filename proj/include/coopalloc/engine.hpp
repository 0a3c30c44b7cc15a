#ifndef COOPALLOC_ENGINE_HPP
#define COOPALLOC_ENGINE_HPP

#include <array>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <stdexcept>
#include <utility>
#include <vector>

#include "coopalloc/allocation.hpp"
#include "coopalloc/channel.hpp"
#include "coopalloc/coop_route.hpp"
#include "coopalloc/event_queue.hpp"
#include "coopalloc/rng.hpp"

namespace coopalloc {

enum class Allocator { Adaptive, Uniform };
enum class Retransmission { Retransmit, Drop };

/// How the adaptive split becomes whole packets. Nearest rounds each burst
/// on its own; Carry feeds the rounding remainder into the next burst so
/// that long-run shares follow the continuous split.
enum class Rounding { Nearest, Carry };

struct SimConfig {
  int burst_len_k = 10;
  std::array<MobileProfile, 2> profiles{
      MobileProfile{1, TrafficClass::RealTime, 1e-3, 0},
      MobileProfile{2, TrafficClass::NonRealTime, 5e-4, 1}};
  std::array<LinkModel, 2> link_models{FixedPer{5.5e-4}, FixedPer{5.5e-4}};
  std::array<RateMbps, 2> rd_rate{RateMbps(11.0), RateMbps(11.0)};
  int packet_bits = 24576;
  Allocator allocator = Allocator::Adaptive;
  Retransmission retransmission = Retransmission::Retransmit;
  Rounding rounding = Rounding::Nearest;
  int estimator_window_bursts = 50;
  double per_floor = 1e-6;
  double initial_per_estimate = 5.5e-4;
  std::int64_t duration_bursts = 1000;
  std::uint64_t seed = 1;
  TargetBounds target_bounds{};
  bool record_trace = true;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Throws ConfigError on the first invariant violation found.
void validate(const SimConfig& config);

struct AckReport {
  int mobile_id = 0;
  std::int64_t burst_index = 0;
  int errored_count = 0;
  int sent_count = 0;
  double per_estimate = 0.0;  // errored / sent for this burst, 0 when nothing was sent
};

/// Windowed link PER estimate kept by the relay, one per mobile.
class PerEstimator {
 public:
  PerEstimator(int window_bursts, double per_floor, double initial_estimate);

  /// Pushes one burst, evicting the oldest beyond the window.
  void update(const AckReport& report);

  /// max(errored / sent over the window, floor); the initial estimate while
  /// the window holds no sent packets.
  double estimate() const;

  std::int64_t window_errored() const { return errored_; }
  std::int64_t window_sent() const { return sent_; }

 private:
  std::deque<std::pair<int, int>> window_;
  std::size_t capacity_;
  double floor_;
  double initial_;
  std::int64_t errored_ = 0;
  std::int64_t sent_ = 0;
};

PerEstimator estimator_update(PerEstimator est, const AckReport& report);

struct BurstTraceRow {
  std::int64_t burst = 0;
  Counts counts{};
  std::array<double, 2> estimates{};
  std::array<double, 2> margins{};
  std::array<int, 2> errored{};
  bool fallback = false;
};

struct MobileStats {
  std::int64_t delivered_packets = 0;
  std::int64_t sent_packets = 0;
  std::int64_t errored_packets = 0;
  std::int64_t retransmissions = 0;
  std::int64_t pending_retransmissions = 0;  // errored packets still queued at the end
  double goodput_bits_per_s = 0.0;
  double measured_per = 0.0;
  double mean_delay_s = 0.0;
  double mean_count = 0.0;  // average packets per burst
};

struct SimResult {
  std::array<MobileStats, 2> mobiles{};
  std::uint64_t sim_ticks = 0;
  double sim_time_s = 0.0;
  std::int64_t bursts = 0;
  std::int64_t violation_bursts = 0;  // bursts where constraint_report flagged a mobile
  std::vector<BurstTraceRow> burst_trace;

  double violation_rate() const {
    return bursts == 0 ? 0.0 : static_cast<double>(violation_bursts) / bursts;
  }
};

/// Relay-to-mobiles burst simulation for one configuration. All randomness
/// comes from one generator seeded with config.seed, one draw per packet.
class Simulation {
 public:
  explicit Simulation(SimConfig config);

  /// Plans, transmits and acknowledges one burst.
  BurstTraceRow run_burst_cycle();

  /// Totals so far, with derived rates filled in.
  SimResult result() const;

  const PerEstimator& estimator(Slot s) const { return estimators_[index(s)]; }
  std::uint64_t now_ticks() const { return queue_.now(); }
  const Rng& rng() const { return rng_; }

 private:
  struct Packet {
    std::uint64_t first_tx_tick = 0;
    bool attempted = false;
  };

  Counts plan_counts(const std::array<double, 2>& estimates, BurstTraceRow& row);
  void transmit(Slot s, std::array<int, 2>& errored, std::array<std::vector<Packet>, 2>& retry);

  SimConfig config_;
  Rng rng_;
  EventQueue queue_;
  std::array<PerEstimator, 2> estimators_;
  std::array<double, 2> link_per_{};
  std::array<std::uint64_t, 2> ticks_per_packet_{};
  std::array<std::deque<Packet>, 2> pending_;
  std::array<MobileStats, 2> stats_{};
  std::array<std::uint64_t, 2> delay_ticks_{};
  std::array<std::int64_t, 2> count_totals_{};
  double carry_ = 0.0;
  std::int64_t bursts_ = 0;
  std::int64_t violation_bursts_ = 0;
  std::vector<BurstTraceRow> trace_;
};

/// Validates, then runs config.duration_bursts cycles.
SimResult run(const SimConfig& config);

/// One line per burst; deterministic bytes for identical traces.
void write_trace_csv(std::ostream& out, const std::vector<BurstTraceRow>& trace);

std::string to_string(Allocator a);
std::string to_string(Retransmission r);
std::string to_string(Rounding r);

}  // namespace coopalloc

#endif  // COOPALLOC_ENGINE_HPP
