#pragma once

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <vector>

namespace mabkit::service {

/// Append-only JSON-lines event journal for one experiment. Every event is
/// flushed before the call returns, so a record acknowledged to a caller
/// survives an immediate process kill.
class EventLog {
 public:
  explicit EventLog(std::filesystem::path path);

  void append(const nlohmann::json& event);
  long count() const { return count_; }
  const std::filesystem::path& path() const { return path_; }

  static std::vector<nlohmann::json> read_all(
      const std::filesystem::path& path);

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  long count_ = 0;
};

}  // namespace mabkit::service
