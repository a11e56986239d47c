#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace mkmimo::cli {

struct RunOptions {
  std::string experiment;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::optional<std::string> out;
  bool bits = false;
};

// Loads and validates the config, applies the flag overrides, runs the
// experiment, and writes <out>.csv plus <out>.txt. Schema and config-value
// problems throw ConfigError; exceptions raised by the numerics propagate
// unchanged.
void run_experiment(const RunOptions& options);

}  // namespace mkmimo::cli
