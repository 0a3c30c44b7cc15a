#ifndef COOPALLOC_COOP_ROUTE_HPP
#define COOPALLOC_COOP_ROUTE_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "coopalloc/rng.hpp"

namespace coopalloc {

/// An 802.11b data rate: 1, 2, 5.5 or 11 Mbps.
class RateMbps {
 public:
  /// Throws std::invalid_argument for anything outside the rate set.
  explicit RateMbps(double mbps);

  double mbps() const { return value_; }
  double bits_per_second() const { return value_ * 1e6; }

  /// Simulation ticks per transmitted bit (see kTicksPerSecond).
  std::uint64_t ticks_per_bit() const;

  friend bool operator==(const RateMbps&, const RateMbps&) = default;

 private:
  double value_;
};

inline const std::vector<RateMbps>& rate_set_80211b() {
  static const std::vector<RateMbps> rates{RateMbps(1.0), RateMbps(2.0), RateMbps(5.5),
                                           RateMbps(11.0)};
  return rates;
}

/// Integer clock resolution. Every 802.11b bit time is a whole number of
/// ticks at 22 MHz: 22, 11, 4 and 2 ticks for 1, 2, 5.5 and 11 Mbps.
inline constexpr double kTicksPerSecond = 22e6;

/// Payload air time with no MAC/PHY overhead: bits / rate.
double tx_time(std::uint64_t bits, RateMbps rate);
std::uint64_t tx_ticks(std::uint64_t bits, RateMbps rate);

struct RelayEntry {
  int relay_id = 0;
  RateMbps sr_rate{11.0};
  RateMbps rd_rate{11.0};
};

struct CoopTable {
  RateMbps direct_rate{1.0};
  std::vector<RelayEntry> relays;
};

struct RouteChoice {
  bool direct = true;
  int relay_id = -1;  // meaningful when !direct
  double total_time_s = 0.0;
};

double route_time_direct(RateMbps direct_rate, std::uint64_t bits);
/// Store-and-forward: the two hop times add.
double route_time_relay(const RelayEntry& relay, std::uint64_t bits);

/// Minimum-air-time route. Ties favor the direct link, then the lowest relay id.
RouteChoice select_route(const CoopTable& table, std::uint64_t bits);

struct RateDistributions {
  std::vector<RateMbps> sd{RateMbps(1.0), RateMbps(2.0), RateMbps(5.5), RateMbps(11.0)};
  std::vector<RateMbps> sr{RateMbps(5.5), RateMbps(11.0)};
  std::vector<RateMbps> rd{RateMbps(5.5), RateMbps(11.0)};
};

class EmptyDistribution : public std::invalid_argument {
 public:
  explicit EmptyDistribution(const std::string& which)
      : std::invalid_argument("empty rate distribution: " + which) {}
};

/// Draws the direct rate, then sr and rd for relay 0, 1, ... (one draw each).
/// Relay ids are 0..n_relays-1.
CoopTable sample_table(int n_relays, Rng& rng, const RateDistributions& dists = {});

}  // namespace coopalloc

#endif  // COOPALLOC_COOP_ROUTE_HPP
