#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "dyadwatch/error.hpp"

namespace dyadwatch {

// Error carrying the HTTP status the front-end should answer with.
class ServiceError : public Error {
 public:
  ServiceError(int status, const std::string& message, nlohmann::json detail = {})
      : Error(message), status_(status), detail_(std::move(detail)) {}
  int status() const noexcept { return status_; }
  const nlohmann::json& detail() const noexcept { return detail_; }

 private:
  int status_;
  nlohmann::json detail_;
};

struct ServiceConfig {
  std::filesystem::path artifact_dir = "artifacts";
  std::size_t workers = 1;
};

// Model registry, dataset store, and asynchronous job runner. Artifact files
// under artifact_dir are the source of truth; the registry is rebuilt by a
// directory scan on construction.
//
//   <dir>/datasets/<id>.csv
//   <dir>/models/<id>.json        model artifact
//   <dir>/models/<id>.entry.json  registry entry
//   <dir>/jobs/<id>.json          job status
//   <dir>/jobs/<id>.report.json   campaign report
class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  nlohmann::json upload_dataset(std::string csv);
  nlohmann::json start_training(const nlohmann::json& request);
  nlohmann::json job(std::string_view job_id) const;
  nlohmann::json list_models() const;
  nlohmann::json model(std::string_view model_id) const;
  nlohmann::json predict(std::string_view model_id, const nlohmann::json& request) const;
  nlohmann::json control_single(std::string_view model_id, const nlohmann::json& request) const;
  nlohmann::json control_multi(std::string_view model_id, const nlohmann::json& request) const;
  nlohmann::json relevance(std::string_view model_id) const;
  nlohmann::json scenarios(std::string_view model_id) const;
  nlohmann::json start_campaign(std::string_view model_id, const nlohmann::json& request);
  nlohmann::json roc(std::string_view model_id, std::string_view dataset_id) const;

  // Registers an existing artifact file (used by tests and the CLI).
  nlohmann::json register_model_file(const std::filesystem::path& artifact, std::string_view dataset_fingerprint);

  // Blocks until every queued job has finished.
  void wait_idle();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// HTTP/1.1 JSON front-end for Service; all routes under /v1.
class HttpServer {
 public:
  explicit HttpServer(Service& service, std::filesystem::path static_dir = {});
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Blocking. Returns false if the socket could not be bound.
  bool listen(const std::string& host, int port);
  // Binds an ephemeral port and returns it; call listen_after_bind() to serve.
  int bind_to_any_port(const std::string& host);
  bool listen_after_bind();
  void stop();
  bool is_running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dyadwatch
