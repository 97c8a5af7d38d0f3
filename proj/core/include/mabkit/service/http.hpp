#pragma once

#include <memory>

#include "mabkit/service/config.hpp"
#include "mabkit/service/service.hpp"

namespace mabkit::service {

/// JSON-over-HTTP frontend for ExperimentService.
///
///   POST /experiments                      register an experiment config
///   GET  /experiments/{id}/assignment      ?user=U&decision_point=D&<var>=x
///   POST /experiments/{id}/rewards         {assignment_id, value | rating}
///   POST /experiments/{id}/context         {user, variables{...}}
///   POST /experiments/{id}/refresh         drain pending rewards now
///   GET  /experiments/{id}/summary
///   GET  /experiments/{id}/log             CSV export, shared log schema
///   GET  /healthz
class HttpServer {
 public:
  HttpServer(ExperimentService& service, const ServiceConfig& config);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Bind the configured address/port (port 0 picks a free one). Returns
  /// false when the address is not bindable.
  bool bind();

  /// Serve until stop(); call after bind(). Returns false on listen error.
  bool serve();

  void stop();

  /// Actual bound port, valid after bind().
  int port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace mabkit::service
