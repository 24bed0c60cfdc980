#pragma once

#include <filesystem>
#include <string>

#include "aoi/core_model.hpp"

namespace aoi {

/// Parses a JSON system configuration. Required top-level keys: `horizon`,
/// `truncation`, `seed`, `nodes`. Each node needs `lambda`, `weight` and one of
/// `success_prob` or a `channel` object. Unknown keys are rejected by name.
SystemConfig parse_config(const std::string& text);
SystemConfig load_config(const std::filesystem::path& path);

std::string config_to_json(const SystemConfig& config);

// Grid transforms used by sweeps. Each returns a validated copy.

/// Replaces every node's channel with `snr_db` (keeping its rate threshold,
/// default 1) and recomputes success probabilities.
SystemConfig with_snr_db(SystemConfig config, double snr_db);
SystemConfig with_lambda(SystemConfig config, double lambda);
SystemConfig with_truncation(SystemConfig config, int truncation);

}  // namespace aoi
