#include <httplib.h>

#include "dyadwatch/service.hpp"

namespace dyadwatch {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(2) + "\n", "application/json");
}

json error_body(const std::string& message, const json& detail = json::object()) {
  json body = {{"error", message}};
  if (!detail.is_null() && !(detail.is_object() && detail.empty())) body["detail"] = detail;
  return body;
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  return json::parse(req.body);
}

// Runs a handler and maps failures onto status codes.
template <typename Handler>
httplib::Server::Handler guarded(int success_status, Handler handler) {
  return [success_status, handler](const httplib::Request& req, httplib::Response& res) {
    try {
      send_json(res, success_status, handler(req));
    } catch (const ServiceError& e) {
      send_json(res, e.status(), error_body(e.what(), e.detail()));
    } catch (const json::parse_error& e) {
      send_json(res, 400, error_body("request body is not valid JSON", {{"reason", e.what()}}));
    } catch (const json::exception& e) {
      send_json(res, 422, error_body(e.what()));
    } catch (const DomainError& e) {
      send_json(res, 422, error_body(e.what(), {{"field", e.variable()}}));
    } catch (const ConfigError& e) {
      send_json(res, 422, error_body(e.what()));
    } catch (const NotFoundError& e) {
      send_json(res, 404, error_body(e.what()));
    } catch (const std::exception& e) {
      send_json(res, 500, error_body(e.what()));
    }
  };
}

}  // namespace

struct HttpServer::Impl {
  Service& service;
  httplib::Server server;

  Impl(Service& s, const std::filesystem::path& static_dir) : service(s) {
    auto& svc = service;
    server.Post("/v1/datasets", guarded(201, [&svc](const httplib::Request& req) {
                  return svc.upload_dataset(req.body);
                }));
    server.Post("/v1/train", guarded(202, [&svc](const httplib::Request& req) {
                  return svc.start_training(parse_body(req));
                }));
    server.Get(R"(/v1/jobs/([^/]+))", guarded(200, [&svc](const httplib::Request& req) {
                 return svc.job(req.matches[1].str());
               }));
    server.Get("/v1/models", guarded(200, [&svc](const httplib::Request&) { return svc.list_models(); }));
    server.Get(R"(/v1/models/([^/]+))", guarded(200, [&svc](const httplib::Request& req) {
                 return svc.model(req.matches[1].str());
               }));
    server.Post(R"(/v1/models/([^/]+)/predict)", guarded(200, [&svc](const httplib::Request& req) {
                  return svc.predict(req.matches[1].str(), parse_body(req));
                }));
    server.Post(R"(/v1/models/([^/]+)/control/single)", guarded(200, [&svc](const httplib::Request& req) {
                  return svc.control_single(req.matches[1].str(), parse_body(req));
                }));
    server.Post(R"(/v1/models/([^/]+)/control/multi)", guarded(200, [&svc](const httplib::Request& req) {
                  return svc.control_multi(req.matches[1].str(), parse_body(req));
                }));
    server.Get(R"(/v1/models/([^/]+)/relevance)", guarded(200, [&svc](const httplib::Request& req) {
                 return svc.relevance(req.matches[1].str());
               }));
    server.Get(R"(/v1/models/([^/]+)/scenarios)", guarded(200, [&svc](const httplib::Request& req) {
                 return svc.scenarios(req.matches[1].str());
               }));
    server.Post(R"(/v1/models/([^/]+)/campaign)", guarded(202, [&svc](const httplib::Request& req) {
                  return svc.start_campaign(req.matches[1].str(), parse_body(req));
                }));
    server.Get(R"(/v1/models/([^/]+)/roc)", guarded(200, [&svc](const httplib::Request& req) {
                 if (!req.has_param("dataset")) {
                   throw ServiceError(422, "query parameter 'dataset' is required", {{"field", "dataset"}});
                 }
                 return svc.roc(req.matches[1].str(), req.get_param_value("dataset"));
               }));

    if (!static_dir.empty()) {
      if (!server.set_mount_point("/", static_dir.string())) {
        throw ConfigError("static directory " + static_dir.string() + " does not exist");
      }
    }
    server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
      if (res.body.empty() && req.path.starts_with("/v1/")) {
        res.set_content(error_body(res.status == 404 ? "no such endpoint" : "request failed").dump(2) + "\n",
                        "application/json");
      }
    });
  }
};

HttpServer::HttpServer(Service& service, std::filesystem::path static_dir)
    : impl_(std::make_unique<Impl>(service, static_dir)) {}
HttpServer::~HttpServer() = default;

bool HttpServer::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }
int HttpServer::bind_to_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }
bool HttpServer::listen_after_bind() { return impl_->server.listen_after_bind(); }
void HttpServer::stop() { impl_->server.stop(); }
bool HttpServer::is_running() const { return impl_->server.is_running(); }

}  // namespace dyadwatch
