#pragma once

#include <string>

#include "vsa/experiments.hpp"

namespace vsa::detail {

/// Fills defaults that depend on the environment (data paths).
void finalize_config(const std::string& id, Config& cfg);
/// Parses every typed value; throws ConfigError on the first bad one.
void validate_config(const std::string& id, const Config& cfg);

}  // namespace vsa::detail
