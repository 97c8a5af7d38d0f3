#include "manifest.hpp"

#include <chrono>
#include <fstream>

#include "mabkit/errors.hpp"

#ifndef MABKIT_VERSION
#define MABKIT_VERSION "0.0.0"
#endif

namespace mabkit::cli {

void RunManifest::write(const std::filesystem::path& out_dir) const {
  const auto now = std::chrono::duration_cast<std::chrono::seconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count();
  nlohmann::json doc{{"command", command},
                     {"argv", argv},
                     {"config", config},
                     {"master_seed", master_seed},
                     {"tool_version", MABKIT_VERSION},
                     {"outputs", outputs},
                     {"duration_seconds", duration_seconds},
                     {"created_ts", now}};
  std::ofstream out(out_dir / "manifest.json");
  if (!out) {
    throw Error("cannot write manifest in '" + out_dir.string() + "'");
  }
  out << doc.dump(2) << '\n';
}

}  // namespace mabkit::cli
