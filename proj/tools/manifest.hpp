#pragma once

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace mabkit::cli {

/// Written as manifest.json next to every command's outputs; the resolved
/// config plus master seed reproduce the run bit-for-bit.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  nlohmann::json config;
  std::uint64_t master_seed = 0;
  std::vector<std::string> outputs;
  double duration_seconds = 0.0;

  void write(const std::filesystem::path& out_dir) const;
};

}  // namespace mabkit::cli
