#include "coopalloc/config.hpp"

#include <fstream>
#include <initializer_list>

namespace coopalloc {

using nlohmann::json;

namespace {

void require_object(const json& doc, const char* what) {
  if (!doc.is_object()) throw ConfigError(std::string(what) + " must be a JSON object");
}

void reject_unknown(const json& doc, std::initializer_list<const char*> known, const char* what) {
  for (const auto& [key, _] : doc.items()) {
    bool found = false;
    for (const char* k : known) found = found || key == k;
    if (!found) throw ConfigError(std::string(what) + ": unknown field '" + key + "'");
  }
}

template <typename T>
void read(const json& doc, const char* key, T& target) {
  if (!doc.contains(key)) return;
  try {
    target = doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

RateMbps rate_from_json(const json& v) {
  try {
    return RateMbps(v.get<double>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("rate: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::vector<RateMbps> rates_from_json(const json& v, const char* key) {
  if (!v.is_array()) throw ConfigError(std::string(key) + " must be an array of rates");
  std::vector<RateMbps> out;
  for (const auto& r : v) out.push_back(rate_from_json(r));
  return out;
}

std::array<RateMbps, 2> rd_rates_from_json(const json& v) {
  if (v.is_number()) {
    const RateMbps r = rate_from_json(v);
    return {r, r};
  }
  if (!v.is_array() || v.size() != 2) {
    throw ConfigError("rd_rate must be a rate or an array of two rates");
  }
  return {rate_from_json(v[0]), rate_from_json(v[1])};
}

std::array<LinkModel, 2> link_models_from_json(const json& v) {
  if (!v.is_array() || v.size() != 2) throw ConfigError("link_models must list two links");
  return {link_model_from_json(v[0]), link_model_from_json(v[1])};
}

MobileProfile profile_from_json(const json& v) {
  require_object(v, "profile");
  reject_unknown(v, {"id", "class", "target_per", "priority"}, "profile");
  MobileProfile p;
  read(v, "id", p.id);
  read(v, "target_per", p.target_per);
  read(v, "priority", p.priority);
  if (v.contains("class")) {
    try {
      p.traffic = traffic_class_from_string(v.at("class").get<std::string>());
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }
  return p;
}

template <typename Enum>
Enum enum_from_json(const json& doc, const char* key,
                    std::initializer_list<std::pair<const char*, Enum>> names, Enum fallback) {
  if (!doc.contains(key)) return fallback;
  std::string s;
  read(doc, key, s);
  for (const auto& [name, value] : names) {
    if (s == name) return value;
  }
  throw ConfigError(std::string("field '") + key + "': unknown value '" + s + "'");
}

Retransmission retransmission_from_json(const json& doc, Retransmission fallback) {
  return enum_from_json<Retransmission>(
      doc, "retransmission",
      {{"Retransmit", Retransmission::Retransmit}, {"Drop", Retransmission::Drop}}, fallback);
}

Rounding rounding_from_json(const json& doc, Rounding fallback) {
  return enum_from_json<Rounding>(doc, "rounding",
                                  {{"nearest", Rounding::Nearest}, {"carry", Rounding::Carry}},
                                  fallback);
}

}  // namespace

LinkModel link_model_from_json(const json& v) {
  require_object(v, "link model");
  std::string type;
  read(v, "type", type);
  if (type == "FixedPer") {
    reject_unknown(v, {"type", "per"}, "FixedPer");
    FixedPer m;
    read(v, "per", m.per);
    return m;
  }
  if (type == "AwgnQam16") {
    reject_unknown(v, {"type", "snr_db", "packet_bits", "coding_gain_db"}, "AwgnQam16");
    AwgnQam16 m;
    read(v, "snr_db", m.snr_db);
    read(v, "packet_bits", m.packet_bits);
    read(v, "coding_gain_db", m.coding_gain_db);
    return m;
  }
  throw ConfigError("link model type must be FixedPer or AwgnQam16, got '" + type + "'");
}

json to_json(const LinkModel& model) {
  if (const auto* f = std::get_if<FixedPer>(&model)) return {{"type", "FixedPer"}, {"per", f->per}};
  const auto& q = std::get<AwgnQam16>(model);
  return {{"type", "AwgnQam16"},
          {"snr_db", q.snr_db},
          {"packet_bits", q.packet_bits},
          {"coding_gain_db", q.coding_gain_db}};
}

SimConfig sim_config_from_json(const json& doc) {
  require_object(doc, "simulation config");
  reject_unknown(doc,
                 {"burst_len_k", "profiles", "link_models", "rd_rate", "packet_bits", "allocator",
                  "retransmission", "rounding", "estimator_window_bursts", "per_floor",
                  "initial_per_estimate", "duration_bursts", "seed", "target_bounds",
                  "record_trace"},
                 "simulation config");
  SimConfig c;
  read(doc, "burst_len_k", c.burst_len_k);
  if (doc.contains("profiles")) {
    const auto& p = doc.at("profiles");
    if (!p.is_array() || p.size() != 2) throw ConfigError("profiles must list two mobiles");
    c.profiles = {profile_from_json(p[0]), profile_from_json(p[1])};
  }
  if (doc.contains("link_models")) c.link_models = link_models_from_json(doc.at("link_models"));
  if (doc.contains("rd_rate")) c.rd_rate = rd_rates_from_json(doc.at("rd_rate"));
  read(doc, "packet_bits", c.packet_bits);
  c.allocator = enum_from_json<Allocator>(
      doc, "allocator", {{"Adaptive", Allocator::Adaptive}, {"Uniform", Allocator::Uniform}},
      c.allocator);
  c.retransmission = retransmission_from_json(doc, c.retransmission);
  c.rounding = rounding_from_json(doc, c.rounding);
  read(doc, "estimator_window_bursts", c.estimator_window_bursts);
  read(doc, "per_floor", c.per_floor);
  read(doc, "initial_per_estimate", c.initial_per_estimate);
  read(doc, "duration_bursts", c.duration_bursts);
  read(doc, "seed", c.seed);
  read(doc, "record_trace", c.record_trace);
  if (doc.contains("target_bounds")) {
    std::array<double, 2> b{};
    read(doc, "target_bounds", b);
    c.target_bounds = {b[0], b[1]};
  }
  validate(c);
  return c;
}

json to_json(const SimConfig& c) {
  json profiles = json::array();
  for (const auto& p : c.profiles) {
    profiles.push_back({{"id", p.id},
                        {"class", to_string(p.traffic)},
                        {"target_per", p.target_per},
                        {"priority", p.priority}});
  }
  return {{"burst_len_k", c.burst_len_k},
          {"profiles", profiles},
          {"link_models", {to_json(c.link_models[0]), to_json(c.link_models[1])}},
          {"rd_rate", {c.rd_rate[0].mbps(), c.rd_rate[1].mbps()}},
          {"packet_bits", c.packet_bits},
          {"allocator", to_string(c.allocator)},
          {"retransmission", to_string(c.retransmission)},
          {"rounding", to_string(c.rounding)},
          {"estimator_window_bursts", c.estimator_window_bursts},
          {"per_floor", c.per_floor},
          {"initial_per_estimate", c.initial_per_estimate},
          {"duration_bursts", c.duration_bursts},
          {"seed", c.seed},
          {"target_bounds", {c.target_bounds.lo, c.target_bounds.hi}},
          {"record_trace", c.record_trace}};
}

RelaySweepSpec relay_spec_from_json(const json& doc) {
  require_object(doc, "relay sweep config");
  reject_unknown(doc,
                 {"relay_counts", "samples_per_point", "packet_bits", "sd_rates", "sr_rates",
                  "rd_rates", "seed", "threads"},
                 "relay sweep config");
  RelaySweepSpec s;
  read(doc, "relay_counts", s.relay_counts);
  read(doc, "samples_per_point", s.samples_per_point);
  read(doc, "packet_bits", s.packet_bits);
  if (doc.contains("sd_rates")) s.rates.sd = rates_from_json(doc.at("sd_rates"), "sd_rates");
  if (doc.contains("sr_rates")) s.rates.sr = rates_from_json(doc.at("sr_rates"), "sr_rates");
  if (doc.contains("rd_rates")) s.rates.rd = rates_from_json(doc.at("rd_rates"), "rd_rates");
  read(doc, "seed", s.seed);
  read(doc, "threads", s.threads);
  for (std::size_t i = 0; i < s.relay_counts.size(); ++i) {
    if (s.relay_counts[i] < 0) throw ConfigError("relay_counts must be non-negative");
    if (i > 0 && s.relay_counts[i] <= s.relay_counts[i - 1]) {
      throw ConfigError("relay_counts must be sorted ascending and distinct");
    }
  }
  if (s.relay_counts.empty()) throw ConfigError("relay_counts must not be empty");
  if (s.samples_per_point < 1) throw ConfigError("samples_per_point must be positive");
  if (s.packet_bits < 1) throw ConfigError("packet_bits must be positive");
  if (s.rates.sd.empty() || s.rates.sr.empty() || s.rates.rd.empty()) {
    throw ConfigError("rate distributions must be non-empty");
  }
  return s;
}

RatioSweepSpec ratio_spec_from_json(const json& doc) {
  require_object(doc, "ratio sweep config");
  reject_unknown(doc,
                 {"a_values", "k", "link_models", "target_per_anchor", "duration_bursts", "seed",
                  "rd_rate", "packet_bits", "retransmission", "rounding",
                  "estimator_window_bursts", "per_floor", "initial_per_estimate", "threads"},
                 "ratio sweep config");
  RatioSweepSpec s;
  read(doc, "a_values", s.a_values);
  read(doc, "k", s.k);
  if (doc.contains("link_models")) s.link_models = link_models_from_json(doc.at("link_models"));
  read(doc, "target_per_anchor", s.target_per_anchor);
  read(doc, "duration_bursts", s.duration_bursts);
  read(doc, "seed", s.seed);
  if (doc.contains("rd_rate")) s.rd_rate = rd_rates_from_json(doc.at("rd_rate"));
  read(doc, "packet_bits", s.packet_bits);
  s.retransmission = retransmission_from_json(doc, s.retransmission);
  s.rounding = rounding_from_json(doc, s.rounding);
  read(doc, "estimator_window_bursts", s.estimator_window_bursts);
  read(doc, "per_floor", s.per_floor);
  read(doc, "initial_per_estimate", s.initial_per_estimate);
  read(doc, "threads", s.threads);
  if (s.a_values.empty()) throw ConfigError("a_values must not be empty");
  for (double a : s.a_values) {
    if (!(a > 0.0)) throw ConfigError("a_values must be positive");
  }
  // Surface per-point config errors before any simulation runs.
  for (double a : s.a_values) {
    validate(ratio_point_config(s, a, Allocator::Adaptive, 0));
  }
  return s;
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace coopalloc
