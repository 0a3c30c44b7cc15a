#include "coopalloc/engine.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace coopalloc {

void validate(const SimConfig& c) {
  if (c.burst_len_k < 2) throw ConfigError("burst_len_k must be at least 2 with two mobiles");
  if (c.duration_bursts < 1) throw ConfigError("duration_bursts must be at least 1");
  if (c.packet_bits < 1) throw ConfigError("packet_bits must be positive");
  if (c.estimator_window_bursts < 1) throw ConfigError("estimator_window_bursts must be positive");
  if (!(c.per_floor >= 0.0 && c.per_floor <= 1.0)) throw ConfigError("per_floor must lie in [0, 1]");
  if (!(c.initial_per_estimate >= 0.0 && c.initial_per_estimate <= 1.0)) {
    throw ConfigError("initial_per_estimate must lie in [0, 1]");
  }
  try {
    validate_profiles(c.profiles, c.target_bounds);
    for (const auto& m : c.link_models) validate(m);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

PerEstimator::PerEstimator(int window_bursts, double per_floor, double initial_estimate)
    : capacity_(static_cast<std::size_t>(window_bursts)),
      floor_(per_floor),
      initial_(initial_estimate) {}

void PerEstimator::update(const AckReport& report) {
  window_.emplace_back(report.errored_count, report.sent_count);
  errored_ += report.errored_count;
  sent_ += report.sent_count;
  while (window_.size() > capacity_) {
    errored_ -= window_.front().first;
    sent_ -= window_.front().second;
    window_.pop_front();
  }
}

double PerEstimator::estimate() const {
  if (sent_ == 0) return initial_;
  return std::max(static_cast<double>(errored_) / static_cast<double>(sent_), floor_);
}

PerEstimator estimator_update(PerEstimator est, const AckReport& report) {
  est.update(report);
  return est;
}

Simulation::Simulation(SimConfig config)
    : config_(std::move(config)),
      rng_(config_.seed),
      estimators_{PerEstimator(config_.estimator_window_bursts, config_.per_floor,
                               config_.initial_per_estimate),
                  PerEstimator(config_.estimator_window_bursts, config_.per_floor,
                               config_.initial_per_estimate)} {
  validate(config_);
  for (std::size_t i = 0; i < 2; ++i) {
    link_per_[i] = effective_per(config_.link_models[i]);
    ticks_per_packet_[i] =
        tx_ticks(static_cast<std::uint64_t>(config_.packet_bits), config_.rd_rate[i]);
  }
  if (config_.record_trace) trace_.reserve(static_cast<std::size_t>(config_.duration_bursts));
}

Counts Simulation::plan_counts(const std::array<double, 2>& estimates, BurstTraceRow& row) {
  const int k = config_.burst_len_k;
  const Slot winner = priority_slot(config_.profiles);
  if (config_.allocator == Allocator::Uniform) return uniform_split(k, winner);

  const double carry = config_.rounding == Rounding::Carry ? carry_ : 0.0;
  const AdaptiveDecision d = adaptive_split(estimates[0], estimates[1],
                                            target_ratio(config_.profiles), k, winner,
                                            config_.per_floor, carry);
  row.fallback = d.fallback;
  if (config_.rounding == Rounding::Carry) carry_ = d.real.n1 + carry - d.counts[0];
  return d.counts;
}

BurstTraceRow Simulation::run_burst_cycle() {
  BurstTraceRow row;
  row.burst = bursts_;
  row.estimates = {estimators_[0].estimate(), estimators_[1].estimate()};
  row.counts = plan_counts(row.estimates, row);

  const auto& prof = config_.profiles;
  const ConstraintReport report = constraint_report(
      row.counts, row.estimates[0], row.estimates[1], prof[0].target_per, prof[1].target_per);
  row.margins = report.margin;
  if (!report.all_satisfied()) ++violation_bursts_;

  const BurstPlan plan = make_plan(row.counts, prof);
  std::array<std::vector<Packet>, 2> retry;
  std::size_t cursor = 0;

  // Packets go out back to back; the acknowledgments follow the last one
  // with no delay.
  std::function<void()> start_next = [&] {
    if (cursor == plan.order.size()) {
      queue_.schedule_in(0, [&] {
        for (std::size_t i = 0; i < 2; ++i) {
          const int sent = row.counts[i];
          const int err = row.errored[i];
          estimators_[i].update({prof[i].id, row.burst, err, sent,
                                 sent == 0 ? 0.0 : static_cast<double>(err) / sent});
          pending_[i].insert(pending_[i].begin(), retry[i].begin(), retry[i].end());
        }
      });
      return;
    }
    const Slot s = plan.order[cursor++] == prof[0].id ? Slot::First : Slot::Second;
    const std::size_t i = index(s);
    Packet pkt;
    if (!pending_[i].empty()) {
      pkt = pending_[i].front();
      pending_[i].pop_front();
      ++stats_[i].retransmissions;
    } else {
      pkt = {queue_.now(), true};
    }
    ++stats_[i].sent_packets;
    queue_.schedule_in(ticks_per_packet_[i], [&, i, pkt] {
      if (draw_outcome(link_per_[i], rng_) == PacketOutcome::Errored) {
        ++stats_[i].errored_packets;
        ++row.errored[i];
        if (config_.retransmission == Retransmission::Retransmit) retry[i].push_back(pkt);
      } else {
        ++stats_[i].delivered_packets;
        delay_ticks_[i] += queue_.now() - pkt.first_tx_tick;
      }
      start_next();
    });
  };
  queue_.schedule_in(0, start_next);
  queue_.run();

  count_totals_[0] += row.counts[0];
  count_totals_[1] += row.counts[1];
  ++bursts_;
  if (config_.record_trace) trace_.push_back(row);
  return row;
}

SimResult Simulation::result() const {
  SimResult r;
  r.sim_ticks = queue_.now();
  r.sim_time_s = static_cast<double>(r.sim_ticks) / kTicksPerSecond;
  r.bursts = bursts_;
  r.violation_bursts = violation_bursts_;
  r.burst_trace = trace_;
  for (std::size_t i = 0; i < 2; ++i) {
    MobileStats m = stats_[i];
    m.pending_retransmissions = static_cast<std::int64_t>(pending_[i].size());
    m.measured_per = m.sent_packets == 0
                         ? 0.0
                         : static_cast<double>(m.errored_packets) / m.sent_packets;
    m.goodput_bits_per_s =
        r.sim_ticks == 0 ? 0.0
                         : static_cast<double>(m.delivered_packets) * config_.packet_bits /
                               r.sim_time_s;
    m.mean_delay_s = m.delivered_packets == 0
                         ? 0.0
                         : static_cast<double>(delay_ticks_[i]) / kTicksPerSecond /
                               static_cast<double>(m.delivered_packets);
    m.mean_count = bursts_ == 0 ? 0.0 : static_cast<double>(count_totals_[i]) / bursts_;
    r.mobiles[i] = m;
  }
  return r;
}

SimResult run(const SimConfig& config) {
  validate(config);
  Simulation sim(config);
  for (std::int64_t b = 0; b < config.duration_bursts; ++b) sim.run_burst_cycle();
  return sim.result();
}

void write_trace_csv(std::ostream& out, const std::vector<BurstTraceRow>& trace) {
  out << "burst,n1,n2,estimate1,estimate2,margin1,margin2,errored1,errored2,fallback\n";
  char buf[256];
  for (const auto& r : trace) {
    std::snprintf(buf, sizeof buf, "%lld,%d,%d,%.9g,%.9g,%.9g,%.9g,%d,%d,%d\n",
                  static_cast<long long>(r.burst), r.counts[0], r.counts[1], r.estimates[0],
                  r.estimates[1], r.margins[0], r.margins[1], r.errored[0], r.errored[1],
                  r.fallback ? 1 : 0);
    out << buf;
  }
}

std::string to_string(Allocator a) { return a == Allocator::Adaptive ? "Adaptive" : "Uniform"; }
std::string to_string(Retransmission r) {
  return r == Retransmission::Retransmit ? "Retransmit" : "Drop";
}
std::string to_string(Rounding r) { return r == Rounding::Nearest ? "nearest" : "carry"; }

}  // namespace coopalloc
