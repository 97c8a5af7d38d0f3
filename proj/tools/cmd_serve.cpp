#include <csignal>
#include <iostream>

#include "commands.hpp"
#include "mabkit/service/http.hpp"

namespace mabkit::cli {

namespace {

service::HttpServer* g_server = nullptr;

void handle_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

}  // namespace

int run_serve(const ServeOptions& options) {
  service::ServiceConfig config;
  if (!options.config_file.empty()) {
    config = service::ServiceConfig::from_file(options.config_file);
  }
  config.apply_env();
  if (!options.listen.empty()) config.listen_address = options.listen;
  if (options.port >= 0) config.port = options.port;
  if (!options.data_dir.empty()) config.data_dir = options.data_dir;
  if (options.refresh_interval > 0) {
    config.refresh_interval_seconds = options.refresh_interval;
  }
  if (options.seed >= 0) config.seed = static_cast<std::uint64_t>(options.seed);
  config.validate();

  service::ExperimentService svc(config.data_dir, config.seed);
  svc.start_scheduler(config.refresh_interval_seconds);

  service::HttpServer server(svc, config);
  if (!server.bind()) {
    std::cerr << "error: cannot bind " << config.listen_address << ":"
              << config.port << '\n';
    return 70;
  }
  g_server = &server;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);

  std::cout << "mabkit service listening on " << config.listen_address << ":"
            << server.port() << '\n'
            << "data dir: " << config.data_dir.string()
            << ", refresh every " << config.refresh_interval_seconds << "s\n";
  std::cout.flush();

  server.serve();
  g_server = nullptr;

  // Destructors flush posterior snapshots on the way out.
  std::cout << "mabkit service stopped\n";
  return 0;
}

}  // namespace mabkit::cli
