#ifndef COOPALLOC_EXPERIMENTS_HPP
#define COOPALLOC_EXPERIMENTS_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coopalloc/coop_route.hpp"
#include "coopalloc/engine.hpp"

namespace coopalloc {

struct RelaySweepSpec {
  std::vector<int> relay_counts{0, 1, 2, 3, 4, 5, 6, 7, 8};
  std::int64_t samples_per_point = 100000;
  int packet_bits = 24576;
  RateDistributions rates{};
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// 21 log-spaced points from 0.25 to 4, with a = 1 in the middle.
std::vector<double> default_a_values();

struct RatioSweepSpec {
  std::vector<double> a_values = default_a_values();
  int k = 10;
  std::array<LinkModel, 2> link_models{FixedPer{5.5e-4}, FixedPer{5.5e-4}};
  double target_per_anchor = 5e-4;  // mobile 1's target; mobile 2 gets a times this
  std::int64_t duration_bursts = 100000;
  std::uint64_t seed = 1;
  std::array<RateMbps, 2> rd_rate{RateMbps(11.0), RateMbps(11.0)};
  int packet_bits = 24576;
  Retransmission retransmission = Retransmission::Retransmit;
  Rounding rounding = Rounding::Carry;
  int estimator_window_bursts = 50;
  double per_floor = 1e-6;
  double initial_per_estimate = 5.5e-4;
  unsigned threads = 0;
};

/// One CSV line. Absent values serialize as empty fields.
struct MetricsRow {
  std::string sweep;
  double coordinate = 0.0;
  std::string scheme;
  std::optional<double> n1, n2;
  std::optional<double> goodput1_bps, goodput2_bps;
  std::optional<double> per1_measured, per2_measured;
  std::optional<double> delay1_s, delay2_s;
  std::optional<double> expected_errors;
  std::optional<double> violations;
  std::optional<double> oracle_value;
};

class ComplexityGuard : public std::length_error {
 public:
  using std::length_error::length_error;
};

inline constexpr double kMaxOracleOutcomes = 1e7;

/// Exact E[bits / best-route time] over every joint rate assignment, each
/// equally likely. Throws ComplexityGuard past kMaxOracleOutcomes outcomes.
double expected_throughput_oracle(int n_relays, int packet_bits,
                                  const RateDistributions& rates = {});

/// Monte Carlo mean best-route throughput for one relay count.
double sampled_throughput(int n_relays, std::int64_t samples, int packet_bits,
                          const RateDistributions& rates, std::uint64_t seed);

std::vector<MetricsRow> run_relay_sweep(const RelaySweepSpec& spec);

/// Relative throughput gains between consecutive relay counts, printed next
/// to the +22% and +9% reference gains for the first two relays.
std::string relay_sweep_report(const std::vector<MetricsRow>& rows);

/// Profiles for one sweep point: mobile 1 targets the anchor, mobile 2
/// a times the anchor. The higher target is Real-Time and goes first.
std::array<MobileProfile, 2> ratio_profiles(double a, double anchor);

/// Engine configuration for one (a, scheme) point.
SimConfig ratio_point_config(const RatioSweepSpec& spec, double a, Allocator scheme,
                             std::size_t point_index);

/// Adaptive and Uniform runs per a value, sharing a seed; rows come in
/// (Adaptive, Uniform) pairs in a_values order.
std::vector<MetricsRow> run_ratio_sweep(const RatioSweepSpec& spec);

/// Summary row for a single engine run.
MetricsRow run_row(const SimConfig& config, const SimResult& result);

inline constexpr const char* kCsvHeader =
    "sweep,coordinate,scheme,n1,n2,goodput1_bps,goodput2_bps,per1_measured,per2_measured,"
    "delay1_s,delay2_s,expected_errors,violations,oracle_value";

/// Header plus one line per row, 9 significant digits, LF endings.
/// Refuses an empty row set.
void write_csv(const std::vector<MetricsRow>& rows, std::ostream& out);
void write_csv(const std::vector<MetricsRow>& rows, const std::filesystem::path& destination);

}  // namespace coopalloc

#endif  // COOPALLOC_EXPERIMENTS_HPP
