#include "coopalloc/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

namespace coopalloc {

namespace {

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index is
/// handled exactly once; results are written by index, so output order
/// does not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

double best_throughput(const CoopTable& table, std::uint64_t bits) {
  return static_cast<double>(bits) / select_route(table, bits).total_time_s;
}

}  // namespace

std::vector<double> default_a_values() {
  std::vector<double> a;
  a.reserve(21);
  for (int i = 0; i <= 20; ++i) a.push_back(std::pow(4.0, (i - 10) / 10.0));
  return a;
}

double expected_throughput_oracle(int n_relays, int packet_bits, const RateDistributions& rates) {
  if (rates.sd.empty()) throw EmptyDistribution("sd");
  if (rates.sr.empty()) throw EmptyDistribution("sr");
  if (rates.rd.empty()) throw EmptyDistribution("rd");
  const std::size_t per_relay = rates.sr.size() * rates.rd.size();
  const double outcomes =
      static_cast<double>(rates.sd.size()) * std::pow(static_cast<double>(per_relay), n_relays);
  if (outcomes > kMaxOracleOutcomes) {
    throw ComplexityGuard("relay oracle: " + std::to_string(outcomes) + " outcomes for " +
                          std::to_string(n_relays) + " relays");
  }

  const auto bits = static_cast<std::uint64_t>(packet_bits);
  std::vector<double> relay_times;
  relay_times.reserve(per_relay);
  for (const auto& sr : rates.sr) {
    for (const auto& rd : rates.rd) relay_times.push_back(route_time_relay({0, sr, rd}, bits));
  }

  double total = 0.0;
  std::size_t count = 0;
  std::vector<std::size_t> digit(static_cast<std::size_t>(n_relays), 0);
  for (const auto& sd : rates.sd) {
    const double direct = route_time_direct(sd, bits);
    std::fill(digit.begin(), digit.end(), 0);
    while (true) {
      double best = direct;
      for (std::size_t d : digit) best = std::min(best, relay_times[d]);
      total += static_cast<double>(bits) / best;
      ++count;
      std::size_t pos = 0;
      while (pos < digit.size() && ++digit[pos] == per_relay) digit[pos++] = 0;
      if (pos == digit.size()) break;
    }
  }
  return total / static_cast<double>(count);
}

double sampled_throughput(int n_relays, std::int64_t samples, int packet_bits,
                          const RateDistributions& rates, std::uint64_t seed) {
  Rng rng(seed);
  const auto bits = static_cast<std::uint64_t>(packet_bits);
  double sum = 0.0;
  for (std::int64_t s = 0; s < samples; ++s) {
    sum += best_throughput(sample_table(n_relays, rng, rates), bits);
  }
  return sum / static_cast<double>(samples);
}

std::vector<MetricsRow> run_relay_sweep(const RelaySweepSpec& spec) {
  for (std::size_t i = 1; i < spec.relay_counts.size(); ++i) {
    if (spec.relay_counts[i] <= spec.relay_counts[i - 1]) {
      throw std::invalid_argument("relay_counts must be sorted ascending and distinct");
    }
  }
  if (spec.samples_per_point < 1) throw std::invalid_argument("samples_per_point must be positive");

  std::vector<MetricsRow> rows(spec.relay_counts.size());
  parallel_for(rows.size(), spec.threads, [&](std::size_t i) {
    const int n = spec.relay_counts[i];
    MetricsRow row;
    row.sweep = "relays";
    row.coordinate = n;
    row.scheme = "MinTime";
    row.goodput1_bps = sampled_throughput(n, spec.samples_per_point, spec.packet_bits,
                                          spec.rates, derive_seed(spec.seed, i));
    try {
      row.oracle_value = expected_throughput_oracle(n, spec.packet_bits, spec.rates);
    } catch (const ComplexityGuard&) {
      row.oracle_value.reset();
    }
    rows[i] = std::move(row);
  });
  return rows;
}

std::string relay_sweep_report(const std::vector<MetricsRow>& rows) {
  std::ostringstream out;
  char buf[160];
  out << "relays  throughput_mbps  oracle_mbps  gain_vs_previous\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double v = rows[i].goodput1_bps.value_or(0.0);
    std::snprintf(buf, sizeof buf, "%6.0f  %15.4f  ", rows[i].coordinate, v / 1e6);
    out << buf;
    if (rows[i].oracle_value) {
      std::snprintf(buf, sizeof buf, "%11.4f", *rows[i].oracle_value / 1e6);
    } else {
      std::snprintf(buf, sizeof buf, "%11s", "-");
    }
    out << buf;
    if (i > 0) {
      const double prev = rows[i - 1].goodput1_bps.value_or(0.0);
      std::snprintf(buf, sizeof buf, "  %+6.2f%%", prev > 0 ? 100.0 * (v / prev - 1.0) : 0.0);
      out << buf;
    }
    out << '\n';
  }
  out << "reference gains: +22% for the first relay, +9% for the second (not asserted)\n";
  return out.str();
}

std::array<MobileProfile, 2> ratio_profiles(double a, double anchor) {
  const double t1 = anchor;
  const double t2 = a * anchor;
  std::array<MobileProfile, 2> p{MobileProfile{1, TrafficClass::NonRealTime, t1, 0},
                                 MobileProfile{2, TrafficClass::NonRealTime, t2, 1}};
  if (t1 > t2) {
    p[0].traffic = TrafficClass::RealTime;
  } else if (t2 > t1) {
    p[1].traffic = TrafficClass::RealTime;
    p[0].priority = 1;
    p[1].priority = 0;
  }
  return p;
}

SimConfig ratio_point_config(const RatioSweepSpec& spec, double a, Allocator scheme,
                             std::size_t point_index) {
  if (!(a > 0.0)) throw ConfigError("a values must be positive");
  SimConfig c;
  c.burst_len_k = spec.k;
  c.profiles = ratio_profiles(a, spec.target_per_anchor);
  c.link_models = spec.link_models;
  c.rd_rate = spec.rd_rate;
  c.packet_bits = spec.packet_bits;
  c.allocator = scheme;
  c.retransmission = spec.retransmission;
  c.rounding = spec.rounding;
  c.estimator_window_bursts = spec.estimator_window_bursts;
  c.per_floor = spec.per_floor;
  c.initial_per_estimate = spec.initial_per_estimate;
  c.duration_bursts = spec.duration_bursts;
  c.seed = derive_seed(spec.seed, point_index);
  c.record_trace = false;
  return c;
}

MetricsRow run_row(const SimConfig& config, const SimResult& result) {
  const double p1 = effective_per(config.link_models[0]);
  const double p2 = effective_per(config.link_models[1]);
  const double t1 = config.profiles[0].target_per;
  const double t2 = config.profiles[1].target_per;
  const double a = target_ratio(config.profiles);
  const Slot winner = priority_slot(config.profiles);

  // Nominal shares at the true link PERs, free of estimation noise.
  RealSplit nominal;
  if (config.allocator == Allocator::Adaptive) {
    nominal = adaptive_split(p1, p2, a, config.burst_len_k, winner, config.per_floor).real;
  } else {
    const Counts u = uniform_split(config.burst_len_k, winner);
    nominal = {static_cast<double>(u[0]), static_cast<double>(u[1])};
  }

  MetricsRow row;
  row.coordinate = a;
  row.scheme = to_string(config.allocator);
  row.n1 = nominal.n1;
  row.n2 = nominal.n2;
  row.goodput1_bps = result.mobiles[0].goodput_bits_per_s;
  row.goodput2_bps = result.mobiles[1].goodput_bits_per_s;
  row.per1_measured = result.mobiles[0].measured_per;
  row.per2_measured = result.mobiles[1].measured_per;
  row.delay1_s = result.mobiles[0].mean_delay_s;
  row.delay2_s = result.mobiles[1].mean_delay_s;
  row.expected_errors = expected_errors(nominal.n1, nominal.n2, p1, p2);
  row.violations = result.violation_rate();
  if (p1 > 0.0 && p2 > 0.0) {
    row.oracle_value = brute_force_optimum(p1, p2, t1, t2, config.burst_len_k).objective;
  }
  return row;
}

std::vector<MetricsRow> run_ratio_sweep(const RatioSweepSpec& spec) {
  if (spec.a_values.empty()) throw ConfigError("a_values must not be empty");
  std::vector<MetricsRow> rows(2 * spec.a_values.size());
  parallel_for(rows.size(), spec.threads, [&](std::size_t j) {
    const std::size_t point = j / 2;
    const Allocator scheme = j % 2 == 0 ? Allocator::Adaptive : Allocator::Uniform;
    const SimConfig c = ratio_point_config(spec, spec.a_values[point], scheme, point);
    MetricsRow row = run_row(c, run(c));
    row.sweep = "ratio";
    row.coordinate = spec.a_values[point];
    rows[j] = std::move(row);
  });
  return rows;
}

namespace {

void put(std::ostream& out, const std::optional<double>& v) {
  out << ',';
  if (!v) return;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", *v);
  out << buf;
}

}  // namespace

void write_csv(const std::vector<MetricsRow>& rows, std::ostream& out) {
  if (rows.empty()) throw std::invalid_argument("write_csv: no rows to write");
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.sweep;
    put(out, r.coordinate);
    out << ',' << r.scheme;
    for (const auto* v : {&r.n1, &r.n2, &r.goodput1_bps, &r.goodput2_bps, &r.per1_measured,
                          &r.per2_measured, &r.delay1_s, &r.delay2_s, &r.expected_errors,
                          &r.violations, &r.oracle_value}) {
      put(out, *v);
    }
    out << '\n';
  }
}

void write_csv(const std::vector<MetricsRow>& rows, const std::filesystem::path& destination) {
  if (rows.empty()) throw std::invalid_argument("write_csv: no rows to write");
  std::ofstream out(destination, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + destination.string() + " for writing");
  write_csv(rows, out);
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + destination.string());
}

}  // namespace coopalloc
