#include "mabkit/service/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>

#include "mabkit/errors.hpp"

namespace mabkit::service {

namespace {

template <typename T>
T parse_env_number(const char* name, const char* value) {
  T out{};
  std::string s(value);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ValidationError(std::string(name) + " is not a number: '" + s + "'");
  }
  return out;
}

}  // namespace

ServiceConfig ServiceConfig::from_json(const nlohmann::json& doc) {
  ServiceConfig cfg;
  if (doc.contains("listen_address")) {
    cfg.listen_address = doc.at("listen_address").get<std::string>();
  }
  if (doc.contains("port")) cfg.port = doc.at("port").get<int>();
  if (doc.contains("data_dir")) {
    cfg.data_dir = doc.at("data_dir").get<std::string>();
  }
  if (doc.contains("refresh_interval_seconds")) {
    cfg.refresh_interval_seconds =
        doc.at("refresh_interval_seconds").get<int>();
  }
  if (doc.contains("seed") && !doc.at("seed").is_null()) {
    cfg.seed = doc.at("seed").get<std::uint64_t>();
  }
  cfg.validate();
  return cfg;
}

ServiceConfig ServiceConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path.string() + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("config file '" + path.string() + "': " + e.what());
  }
  return from_json(doc);
}

void ServiceConfig::apply_env() {
  if (const char* v = std::getenv("MABKIT_LISTEN")) listen_address = v;
  if (const char* v = std::getenv("MABKIT_PORT")) {
    port = parse_env_number<int>("MABKIT_PORT", v);
  }
  if (const char* v = std::getenv("MABKIT_DATA_DIR")) data_dir = v;
  if (const char* v = std::getenv("MABKIT_REFRESH_INTERVAL")) {
    refresh_interval_seconds =
        parse_env_number<int>("MABKIT_REFRESH_INTERVAL", v);
  }
  if (const char* v = std::getenv("MABKIT_SEED")) {
    seed = parse_env_number<std::uint64_t>("MABKIT_SEED", v);
  }
  validate();
}

void ServiceConfig::validate() const {
  if (port < 0 || port > 65535) {
    throw ValidationError("port must lie in [0, 65535]");
  }
  if (refresh_interval_seconds < 1) {
    throw ValidationError("refresh_interval_seconds must be >= 1");
  }
  if (data_dir.empty()) throw ValidationError("data_dir must be set");
}

nlohmann::json ServiceConfig::to_json() const {
  nlohmann::json doc{{"listen_address", listen_address},
                     {"port", port},
                     {"data_dir", data_dir.string()},
                     {"refresh_interval_seconds", refresh_interval_seconds}};
  if (seed) doc["seed"] = *seed;
  return doc;
}

}  // namespace mabkit::service
