#pragma once

#include <cstdint>
#include <filesystem>
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>

namespace mabkit::service {

/// Runtime configuration of the assignment service. Values come from a JSON
/// config file; environment variables override file values.
struct ServiceConfig {
  std::string listen_address = "127.0.0.1";
  int port = 8787;
  std::filesystem::path data_dir = "data";
  int refresh_interval_seconds = 300;
  std::optional<std::uint64_t> seed;  // assignment randomness; unset = entropy

  static ServiceConfig from_json(const nlohmann::json& doc);
  static ServiceConfig from_file(const std::filesystem::path& path);

  /// Apply MABKIT_LISTEN, MABKIT_PORT, MABKIT_DATA_DIR,
  /// MABKIT_REFRESH_INTERVAL and MABKIT_SEED when set.
  void apply_env();

  void validate() const;
  nlohmann::json to_json() const;
};

}  // namespace mabkit::service
