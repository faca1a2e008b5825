#pragma once

#include "uavqoe/scenario.hpp"

#include "json.hpp"

#include <string>

namespace uavqoe
{

/// Flat object, one key per WorldConfig field. Noise is given either as noise_power_sigma2 (mW) or
/// noise_power_dbm, never both. Unknown keys, wrong types and invariant violations throw ConfigError.
WorldConfig config_from_json(const nlohmann::json &j);
WorldConfig load_config(const std::string &path);

/// Every field, noise in mW. config_from_json(config_to_json(c)) == c.
nlohmann::json config_to_json(const WorldConfig &cfg);

const char *to_string(BitrateUnitMode mode);
const char *to_string(NoiseReference ref);

} // namespace uavqoe
