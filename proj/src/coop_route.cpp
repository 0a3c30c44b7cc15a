#include "coopalloc/coop_route.hpp"

namespace coopalloc {

RateMbps::RateMbps(double mbps) : value_(mbps) {
  if (mbps != 1.0 && mbps != 2.0 && mbps != 5.5 && mbps != 11.0) {
    throw std::invalid_argument("not an 802.11b rate: " + std::to_string(mbps) + " Mbps");
  }
}

std::uint64_t RateMbps::ticks_per_bit() const {
  return static_cast<std::uint64_t>(22.0 / value_);
}

double tx_time(std::uint64_t bits, RateMbps rate) {
  return static_cast<double>(bits) / rate.bits_per_second();
}

std::uint64_t tx_ticks(std::uint64_t bits, RateMbps rate) { return bits * rate.ticks_per_bit(); }

double route_time_direct(RateMbps direct_rate, std::uint64_t bits) {
  return tx_time(bits, direct_rate);
}

double route_time_relay(const RelayEntry& relay, std::uint64_t bits) {
  return tx_time(bits, relay.sr_rate) + tx_time(bits, relay.rd_rate);
}

RouteChoice select_route(const CoopTable& table, std::uint64_t bits) {
  RouteChoice best{true, -1, route_time_direct(table.direct_rate, bits)};
  for (const auto& r : table.relays) {
    const double t = route_time_relay(r, bits);
    const bool wins = t < best.total_time_s ||
                      (t == best.total_time_s && !best.direct && r.relay_id < best.relay_id);
    if (wins) best = {false, r.relay_id, t};
  }
  return best;
}

CoopTable sample_table(int n_relays, Rng& rng, const RateDistributions& dists) {
  if (dists.sd.empty()) throw EmptyDistribution("sd");
  if (dists.sr.empty()) throw EmptyDistribution("sr");
  if (dists.rd.empty()) throw EmptyDistribution("rd");
  if (n_relays < 0) throw std::invalid_argument("n_relays must be non-negative");

  CoopTable table{dists.sd[rng.pick(dists.sd.size())], {}};
  table.relays.reserve(static_cast<std::size_t>(n_relays));
  for (int i = 0; i < n_relays; ++i) {
    const RateMbps sr = dists.sr[rng.pick(dists.sr.size())];
    const RateMbps rd = dists.rd[rng.pick(dists.rd.size())];
    table.relays.push_back({i, sr, rd});
  }
  return table;
}

}  // namespace coopalloc
