#ifndef COOPALLOC_CONFIG_HPP
#define COOPALLOC_CONFIG_HPP

#include <filesystem>
#include <string>

#include <json.hpp>

#include "coopalloc/engine.hpp"
#include "coopalloc/experiments.hpp"

namespace coopalloc {

// JSON documents mirror SimConfig, RelaySweepSpec and RatioSweepSpec field
// for field (snake_case). Omitted fields keep their defaults; unknown
// fields are rejected. Every error surfaces as ConfigError.

SimConfig sim_config_from_json(const nlohmann::json& doc);
RelaySweepSpec relay_spec_from_json(const nlohmann::json& doc);
RatioSweepSpec ratio_spec_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const SimConfig& config);

/// Reads and parses a JSON file.
nlohmann::json load_json(const std::filesystem::path& path);

LinkModel link_model_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const LinkModel& model);

}  // namespace coopalloc

#endif  // COOPALLOC_CONFIG_HPP
