#include "mabkit/service/http.hpp"

#include <charconv>
#include <httplib.h>
#include <nlohmann/json.hpp>
#include <sstream>

#include "mabkit/errors.hpp"
#include "mabkit/log_io.hpp"

namespace mabkit::service {

namespace {

void reply_json(httplib::Response& res, int status, const nlohmann::json& doc) {
  res.status = status;
  res.set_content(doc.dump(2) + "\n", "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& what) {
  reply_json(res, status, nlohmann::json{{"error", what}});
}

/// Run a handler body and map thrown errors onto HTTP statuses.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const NotFoundError& e) {
    reply_error(res, 404, e.what());
  } catch (const ConflictError& e) {
    reply_error(res, 409, e.what());
  } catch (const ValidationError& e) {
    reply_error(res, 400, e.what());
  } catch (const ParseError& e) {
    reply_error(res, 400, e.what());
  } catch (const std::exception& e) {
    reply_error(res, 500, e.what());
  }
}

nlohmann::json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return nlohmann::json::object();
  try {
    return nlohmann::json::parse(req.body);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("request body: ") + e.what());
  }
}

double parse_number(const std::string& name, const std::string& value) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(),
                                   out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ValidationError("context variable '" + name +
                          "' is not a number: '" + value + "'");
  }
  return out;
}

}  // namespace

struct HttpServer::Impl {
  ExperimentService& service;
  ServiceConfig config;
  httplib::Server server;
  int bound_port = -1;

  Impl(ExperimentService& svc, ServiceConfig cfg)
      : service(svc), config(std::move(cfg)) {
    install_routes();
  }

  void install_routes() {
    server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("ok\n", "text/plain");
    });

    server.Post("/experiments", [this](const httplib::Request& req,
                                       httplib::Response& res) {
      guarded(res, [&] {
        const auto config_doc = parse_body(req);
        const auto id = service.create_experiment(
            ExperimentConfig::from_json(config_doc));
        reply_json(res, 201, {{"experiment_id", id}});
      });
    });

    server.Get(R"(/experiments/([^/]+)/assignment)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 guarded(res, [&] { handle_assignment(req, res); });
               });

    server.Post(R"(/experiments/([^/]+)/rewards)",
                [this](const httplib::Request& req, httplib::Response& res) {
                  guarded(res, [&] { handle_reward(req, res); });
                });

    server.Post(R"(/experiments/([^/]+)/context)",
                [this](const httplib::Request& req, httplib::Response& res) {
                  guarded(res, [&] { handle_context(req, res); });
                });

    server.Post(R"(/experiments/([^/]+)/refresh)",
                [this](const httplib::Request& req, httplib::Response& res) {
                  guarded(res, [&] {
                    const auto report =
                        service.refresh_posteriors(req.matches[1]);
                    nlohmann::json n_obs = nlohmann::json::object();
                    for (const auto& [name, n] : report.n_obs) n_obs[name] = n;
                    reply_json(res, 200,
                               {{"records_applied", report.records_applied},
                                {"n_obs", n_obs}});
                  });
                });

    server.Get(R"(/experiments/([^/]+)/summary)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 guarded(res, [&] {
                   reply_json(res, 200,
                              service.experiment_summary(req.matches[1]));
                 });
               });

    server.Get(R"(/experiments/([^/]+)/log)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 guarded(res, [&] {
                   const auto log = service.export_log(req.matches[1]);
                   std::ostringstream out;
                   write_log_csv(out, log);
                   res.set_content(out.str(), "text/csv");
                 });
               });
  }

  void handle_assignment(const httplib::Request& req, httplib::Response& res) {
    const std::string experiment_id = req.matches[1];
    std::string user;
    std::optional<std::string> decision_point;
    ContextVector context;
    for (const auto& [key, value] : req.params) {
      if (key == "user") {
        user = value;
      } else if (key == "decision_point") {
        decision_point = value;
      } else {
        context.set(key, parse_number(key, value));
      }
    }
    if (!req.body.empty()) {
      const auto body = parse_body(req);
      if (body.contains("user")) user = body.at("user").get<std::string>();
      if (body.contains("decision_point")) {
        decision_point = body.at("decision_point").get<std::string>();
      }
      if (body.contains("context")) {
        for (const auto& [name, value] : body.at("context").items()) {
          context.set(name, value.get<double>());
        }
      }
    }
    if (user.empty()) {
      throw ValidationError("missing 'user' (query parameter or body field)");
    }
    const auto receipt =
        service.get_assignment(experiment_id, user, context, decision_point);
    reply_json(res, 200, receipt.to_json());
  }

  void handle_reward(const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req);
    if (!body.contains("assignment_id")) {
      throw ValidationError("missing 'assignment_id'");
    }
    const auto assignment_id = body.at("assignment_id").get<std::string>();
    const bool has_value = body.contains("value");
    const bool has_rating = body.contains("rating");
    if (has_value == has_rating) {
      throw ValidationError("post exactly one of 'value' or 'rating'");
    }
    if (has_rating) {
      const auto& rating = body.at("rating");
      if (!rating.is_number_integer()) {
        throw ValidationError("'rating' must be an integer 1..5");
      }
      service.record_rating(req.matches[1], assignment_id, rating.get<int>());
    } else {
      service.record_reward(req.matches[1], assignment_id,
                            body.at("value").get<double>());
    }
    reply_json(res, 200, {{"status", "ok"}, {"assignment_id", assignment_id}});
  }

  void handle_context(const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req);
    if (!body.contains("user")) throw ValidationError("missing 'user'");
    if (!body.contains("variables") || !body.at("variables").is_object()) {
      throw ValidationError("missing 'variables' object");
    }
    std::vector<std::pair<std::string, double>> variables;
    for (const auto& [name, value] : body.at("variables").items()) {
      if (!value.is_number()) {
        throw ValidationError("context variable '" + name +
                              "' must be numeric");
      }
      variables.emplace_back(name, value.get<double>());
    }
    service.update_context(req.matches[1], body.at("user").get<std::string>(),
                           variables);
    reply_json(res, 200, {{"status", "ok"}});
  }
};

HttpServer::HttpServer(ExperimentService& service, const ServiceConfig& config)
    : impl_(std::make_unique<Impl>(service, config)) {}

HttpServer::~HttpServer() { stop(); }

bool HttpServer::bind() {
  if (impl_->config.port == 0) {
    impl_->bound_port =
        impl_->server.bind_to_any_port(impl_->config.listen_address);
    return impl_->bound_port > 0;
  }
  if (!impl_->server.bind_to_port(impl_->config.listen_address,
                                  impl_->config.port)) {
    return false;
  }
  impl_->bound_port = impl_->config.port;
  return true;
}

bool HttpServer::serve() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

int HttpServer::port() const { return impl_->bound_port; }

}  // namespace mabkit::service
