#include "dyadwatch/service.hpp"

#include <charconv>
#include <chrono>
#include <condition_variable>
#include <ctime>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <thread>

#include "dyadwatch/arch_ga.hpp"
#include "dyadwatch/artifact.hpp"
#include "dyadwatch/control.hpp"
#include "dyadwatch/dataset.hpp"
#include "dyadwatch/eval.hpp"
#include "dyadwatch/report.hpp"
#include "dyadwatch/training.hpp"

namespace dyadwatch {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string make_id(char prefix, unsigned n) {
  std::string digits = std::to_string(n);
  if (digits.size() < 4) digits.insert(0, 4 - digits.size(), '0');
  return prefix + digits;
}

// Returns the numeric part of ids like "m0042"; 0 if the name is not an id.
unsigned id_number(std::string_view name, char prefix) {
  if (name.size() < 2 || name.front() != prefix) return 0;
  unsigned n = 0;
  const auto* first = name.data() + 1;
  const auto* last = name.data() + name.size();
  auto [ptr, ec] = std::from_chars(first, last, n);
  return ec == std::errc() && ptr == last ? n : 0;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ServiceError not_found(const std::string& what, std::string_view id) {
  return ServiceError(404, what + " not found", {{"id", std::string(id)}});
}

ServiceError invalid(const std::string& message, json detail = json::object()) {
  return ServiceError(422, message, std::move(detail));
}

const json& object_field(const json& request, const char* key) {
  static const json empty = json::object();
  if (!request.contains(key)) return empty;
  const auto& v = request.at(key);
  if (!v.is_object()) throw invalid(std::string("'") + key + "' must be an object", {{"field", key}});
  return v;
}

// Raw case values keyed by column name or display label.
InputVector parse_case(const json& request) {
  if (!request.is_object() || !request.contains("case")) throw invalid("request needs a 'case' object");
  const auto& c = request.at("case");
  if (!c.is_object()) throw invalid("'case' must be an object", {{"field", "case"}});
  const auto& schema = VariableSchema::standard();
  InputVector values{};
  std::array<bool, kInputCount> seen{};
  for (const auto& [key, value] : c.items()) {
    const auto i = schema.index_of(key);
    if (!i) throw invalid("unknown variable '" + key + "'", {{"field", key}});
    if (!value.is_number()) throw invalid(schema[*i].label + " must be a number", {{"field", schema[*i].name}});
    values[*i] = value.get<double>();
    seen[*i] = true;
  }
  for (std::size_t i = 0; i < kInputCount; ++i) {
    if (!seen[i]) throw invalid("missing variable " + schema[i].label, {{"field", schema[i].name}});
  }
  DyadYearRecord record;
  record.values = values;
  try {
    validate_record(schema, record);
  } catch (const DomainError& e) {
    throw invalid(e.what(), {{"field", e.variable()}});
  }
  return values;
}

struct DatasetInfo {
  fs::path path;
  std::string fingerprint;
  std::size_t rows = 0;
  std::size_t disputes = 0;

  json to_json(const std::string& id) const {
    return {{"dataset_id", id},
            {"rows", rows},
            {"disputes", disputes},
            {"non_disputes", rows - disputes},
            {"fingerprint", fingerprint}};
  }
};

struct ModelInfo {
  json entry;
  std::shared_ptr<const Predictor> predictor;
};

}  // namespace

struct Service::Impl {
  ServiceConfig config;
  fs::path datasets_dir, models_dir, jobs_dir;

  mutable std::mutex mutex;
  std::map<std::string, DatasetInfo> datasets;
  std::map<std::string, ModelInfo> models;
  std::map<std::string, json> jobs;
  unsigned next_dataset = 1, next_model = 1, next_job = 1;

  std::deque<std::function<void()>> queue;
  std::condition_variable work_cv, idle_cv;
  std::size_t active = 0;
  bool stopping = false;
  std::vector<std::thread> workers;

  explicit Impl(ServiceConfig c) : config(std::move(c)) {
    datasets_dir = config.artifact_dir / "datasets";
    models_dir = config.artifact_dir / "models";
    jobs_dir = config.artifact_dir / "jobs";
    for (const auto& d : {datasets_dir, models_dir, jobs_dir}) fs::create_directories(d);
    scan();
    const auto n = std::max<std::size_t>(config.workers, 1);
    for (std::size_t i = 0; i < n; ++i) workers.emplace_back([this] { work(); });
  }

  ~Impl() {
    {
      std::lock_guard lock(mutex);
      stopping = true;
    }
    work_cv.notify_all();
    for (auto& w : workers) w.join();
  }

  void scan() {
    for (const auto& e : fs::directory_iterator(datasets_dir)) {
      const auto stem = e.path().stem().string();
      const auto n = id_number(stem, 'd');
      if (n == 0 || e.path().extension() != ".csv") continue;
      next_dataset = std::max(next_dataset, n + 1);
      try {
        const auto text = read_text_file(e.path());
        const auto d = parse_dataset(text);
        datasets[stem] = {e.path(), fingerprint(text), d.size(), d.count(1)};
      } catch (const Error&) {
        // unreadable uploads stay on disk but are not served
      }
    }
    for (const auto& e : fs::directory_iterator(models_dir)) {
      const auto name = e.path().filename().string();
      constexpr std::string_view suffix = ".entry.json";
      if (!name.ends_with(suffix)) continue;
      const auto id = name.substr(0, name.size() - suffix.size());
      const auto n = id_number(id, 'm');
      if (n == 0) continue;
      next_model = std::max(next_model, n + 1);
      try {
        auto entry = read_json_file(e.path());
        auto predictor = std::make_shared<const Predictor>(load_predictor(models_dir / (id + ".json")));
        models[id] = {std::move(entry), std::move(predictor)};
      } catch (const Error&) {
      }
    }
    for (const auto& e : fs::directory_iterator(jobs_dir)) {
      const auto name = e.path().filename().string();
      if (!name.ends_with(".json") || name.ends_with(".report.json")) continue;
      const auto id = e.path().stem().string();
      const auto n = id_number(id, 'j');
      if (n == 0) continue;
      next_job = std::max(next_job, n + 1);
      try {
        auto job = read_json_file(e.path());
        const auto status = job.value("status", std::string());
        if (status == "queued" || status == "running") {
          job["status"] = "failed";
          job["error"] = "interrupted";
          write_text_file(e.path(), dump_json(job));
        }
        jobs[id] = std::move(job);
      } catch (const Error&) {
      }
    }
  }

  void work() {
    for (;;) {
      std::function<void()> task;
      {
        std::unique_lock lock(mutex);
        work_cv.wait(lock, [&] { return stopping || !queue.empty(); });
        if (stopping) return;
        task = std::move(queue.front());
        queue.pop_front();
        ++active;
      }
      task();
      {
        std::lock_guard lock(mutex);
        --active;
      }
      idle_cv.notify_all();
    }
  }

  void enqueue(std::function<void()> task) {
    {
      std::lock_guard lock(mutex);
      queue.push_back(std::move(task));
    }
    work_cv.notify_one();
  }

  // Caller holds the mutex.
  json& new_job(const std::string& kind, json request) {
    const auto id = make_id('j', next_job++);
    auto& job = jobs[id];
    job = {{"job_id", id},     {"kind", kind},        {"status", "queued"},
           {"progress", 0.0}, {"request", request}, {"created_at", utc_timestamp()}};
    write_text_file(jobs_dir / (id + ".json"), dump_json(job));
    return job;
  }

  void update_job(const std::string& id, const std::function<void(json&)>& mutate) {
    std::lock_guard lock(mutex);
    auto& job = jobs.at(id);
    mutate(job);
    write_text_file(jobs_dir / (id + ".json"), dump_json(job));
  }

  void fail_job(const std::string& id, const std::string& message) {
    update_job(id, [&](json& j) {
      j["status"] = "failed";
      j["error"] = message;
    });
  }

  Dataset load_dataset_by_id(const std::string& id) const {
    fs::path path;
    {
      std::lock_guard lock(mutex);
      const auto it = datasets.find(id);
      if (it == datasets.end()) throw not_found("dataset", id);
      path = it->second.path;
    }
    return load_dataset(path);
  }

  std::shared_ptr<const Predictor> predictor(std::string_view id) const {
    std::lock_guard lock(mutex);
    const auto it = models.find(std::string(id));
    if (it == models.end()) throw not_found("model", id);
    return it->second.predictor;
  }

  // Caller holds the mutex.
  json register_model(const Predictor& predictor, json entry) {
    const auto id = make_id('m', next_model++);
    const auto artifact = models_dir / (id + ".json");
    save_predictor(artifact, predictor);
    entry["model_id"] = id;
    entry["kind"] = std::string(to_string(predictor.kind()));
    entry["created_at"] = utc_timestamp();
    entry["artifact"] = fs::relative(artifact, config.artifact_dir).generic_string();
    entry["architecture"] = to_json(predictor.architecture());
    entry["has_relevance"] = predictor.ard().has_value();
    write_text_file(models_dir / (id + ".entry.json"), dump_json(entry));
    models[id] = {entry, std::make_shared<const Predictor>(predictor)};
    return entry;
  }
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}
Service::~Service() = default;

json Service::upload_dataset(std::string csv) {
  Dataset parsed;
  try {
    parsed = parse_dataset(csv);
  } catch (const ParseError& e) {
    throw invalid(e.what(), {{"line", e.line()}});
  } catch (const DomainError& e) {
    throw invalid(e.what(), {{"line", e.line()}, {"field", e.variable()}});
  }
  std::lock_guard lock(impl_->mutex);
  const auto id = make_id('d', impl_->next_dataset++);
  const auto path = impl_->datasets_dir / (id + ".csv");
  write_text_file(path, csv);
  auto& info = impl_->datasets[id];
  info = {path, fingerprint(csv), parsed.size(), parsed.count(1)};
  return info.to_json(id);
}

json Service::start_training(const json& request) {
  const std::string dataset_id = request.is_object() ? request.value("dataset", std::string()) : std::string();
  std::string job_id;
  std::string setup_error;
  TrainRecipe recipe;
  std::optional<GaConfig> ga;
  std::size_t threads = 1;
  try {
    if (!request.is_object()) throw ConfigError("training request must be a JSON object");
    recipe.method = train_method_from_string(request.value("method", std::string("evidence")));
    if (request.contains("seed")) recipe.seed = request.at("seed").get<std::uint64_t>();
    if (request.contains("architecture")) recipe.arch = architecture_from_json(request.at("architecture"));
    if (recipe.method != TrainMethod::evidence) recipe.evidence.groups = GroupLayout::ard;
    if (request.contains("evidence")) {
      recipe.evidence = evidence_config_from_json(request.at("evidence"), recipe.evidence);
    }
    if (request.contains("hmc")) recipe.hmc = hmc_config_from_json(request.at("hmc"), recipe.hmc);
    if (request.contains("threads")) threads = std::max<std::size_t>(1, request.at("threads").get<std::size_t>());
    if (request.contains("ga")) {
      const auto& g = request.at("ga");
      if (g.is_boolean()) {
        if (g.get<bool>()) ga = GaConfig{};
      } else {
        ga = ga_config_from_json(g);
      }
      if (ga) {
        if (!(g.is_object() && g.contains("seed"))) ga->seed = recipe.seed;
        ga->threads = threads;
      }
    }
  } catch (const Error& e) {
    setup_error = e.what();
  } catch (const json::exception& e) {
    setup_error = std::string("invalid training request: ") + e.what();
  }

  json accepted;
  {
    std::lock_guard lock(impl_->mutex);
    auto& job = impl_->new_job("train", request);
    job_id = job["job_id"].get<std::string>();
    accepted = job;
    if (setup_error.empty() && !impl_->datasets.contains(dataset_id)) setup_error = "dataset not found";
    if (!setup_error.empty()) {
      job["status"] = "failed";
      job["error"] = setup_error;
      write_text_file(impl_->jobs_dir / (job_id + ".json"), dump_json(job));
      return job;
    }
  }

  impl_->enqueue([this, job_id, dataset_id, recipe, ga]() mutable {
    auto& impl = *impl_;
    impl.update_job(job_id, [](json& j) { j["status"] = "running"; });
    try {
      const auto data = impl.load_dataset_by_id(dataset_id);
      json extra = json::object();
      if (ga) {
        const auto scaled = scale_dataset(data, fit_scaling(data));
        const auto result = ga_search(scaled, *ga);
        recipe.arch = result.best;
        extra["ga"] = {{"best_fitness", result.best_fitness},
                       {"best_chromosome", to_bit_string(result.best_chromosome)},
                       {"m_max", result.m_max}};
        impl.update_job(job_id, [](json& j) { j["progress"] = 0.5; });
      }
      const auto predictor = train_predictor(data, recipe);
      std::lock_guard lock(impl.mutex);
      json entry = {{"dataset_id", dataset_id},
                    {"dataset_fingerprint", impl.datasets.at(dataset_id).fingerprint},
                    {"method", std::string(to_string(recipe.method))},
                    {"seed", recipe.seed},
                    {"job_id", job_id}};
      if (!extra.empty()) entry.update(extra);
      const auto registered = impl.register_model(predictor, entry);
      auto& job = impl.jobs.at(job_id);
      job["status"] = "done";
      job["progress"] = 1.0;
      job["model_id"] = registered["model_id"];
      write_text_file(impl.jobs_dir / (job_id + ".json"), dump_json(job));
    } catch (const std::exception& e) {
      impl.fail_job(job_id, e.what());
    }
  });
  return accepted;  // status as of submission
}

json Service::job(std::string_view job_id) const {
  std::lock_guard lock(impl_->mutex);
  const auto it = impl_->jobs.find(std::string(job_id));
  if (it == impl_->jobs.end()) throw not_found("job", job_id);
  return it->second;
}

json Service::list_models() const {
  std::lock_guard lock(impl_->mutex);
  json out = json::array();
  for (const auto& [id, info] : impl_->models) out.push_back(info.entry);
  return {{"models", out}};
}

json Service::model(std::string_view model_id) const {
  std::lock_guard lock(impl_->mutex);
  const auto it = impl_->models.find(std::string(model_id));
  if (it == impl_->models.end()) throw not_found("model", model_id);
  return it->second.entry;
}

json Service::predict(std::string_view model_id, const json& request) const {
  const auto predictor = impl_->predictor(model_id);
  const auto values = parse_case(request);
  auto out = to_json(predictor->predict(values));
  out["model_id"] = std::string(model_id);
  return out;
}

json Service::control_single(std::string_view model_id, const json& request) const {
  const auto predictor = impl_->predictor(model_id);
  const auto values = parse_case(request);
  if (!request.contains("variable") || !request.at("variable").is_string()) {
    throw invalid("request needs a 'variable' name", {{"field", "variable"}});
  }
  const auto name = request.at("variable").get<std::string>();
  const auto index = predictor->schema().index_of(name);
  if (!index) throw invalid("unknown variable '" + name + "'", {{"field", "variable"}});
  if (!predictor->schema()[*index].controllable) {
    throw invalid("variable not controllable", {{"field", "variable"}, {"variable", predictor->schema()[*index].name}});
  }
  ControlConfig config;
  try {
    config = control_config_from_json(object_field(request, "config"));
  } catch (const ConfigError& e) {
    throw invalid(e.what(), {{"field", "config"}});
  }
  DyadYearRecord record;
  record.values = values;
  return to_json(dyadwatch::control_single(*predictor, record, *index, config));
}

json Service::control_multi(std::string_view model_id, const json& request) const {
  const auto predictor = impl_->predictor(model_id);
  const auto values = parse_case(request);
  ControlConfig config;
  try {
    config = control_config_from_json(object_field(request, "config"));
  } catch (const ConfigError& e) {
    throw invalid(e.what(), {{"field", "config"}});
  }
  DyadYearRecord record;
  record.values = values;
  return to_json(dyadwatch::control_multi(*predictor, record, config));
}

json Service::relevance(std::string_view model_id) const {
  const auto predictor = impl_->predictor(model_id);
  if (!predictor->ard()) {
    throw ServiceError(409, "relevance unavailable for this model kind",
                       {{"kind", std::string(to_string(predictor->kind()))}});
  }
  auto out = to_json(*predictor->ard());
  out["model_id"] = std::string(model_id);
  return out;
}

json Service::scenarios(std::string_view model_id) const {
  const auto predictor = impl_->predictor(model_id);
  const auto sweep = scenario_sweep(*predictor);
  return {{"model_id", std::string(model_id)}, {"scenarios", to_json(sweep)}};
}

json Service::start_campaign(std::string_view model_id, const json& request) {
  const auto predictor = impl_->predictor(model_id);
  if (!request.is_object()) throw invalid("campaign request must be a JSON object");
  const auto dataset_id = request.value("dataset", std::string());
  {
    std::lock_guard lock(impl_->mutex);
    if (!impl_->datasets.contains(dataset_id)) throw not_found("dataset", dataset_id);
  }
  Strategy strategy;
  ControlConfig config;
  std::size_t threads = 1;
  try {
    strategy = Strategy::parse(request.value("strategy", std::string("multi")), predictor->schema());
    config = control_config_from_json(object_field(request, "config"));
    if (request.contains("threads")) threads = std::max<std::size_t>(1, request.at("threads").get<std::size_t>());
  } catch (const ConfigError& e) {
    throw invalid(e.what());
  } catch (const json::exception& e) {
    throw invalid(e.what());
  }

  std::string job_id;
  json accepted;
  {
    std::lock_guard lock(impl_->mutex);
    auto req = request;
    req["model"] = std::string(model_id);
    accepted = impl_->new_job("campaign", req);
    job_id = accepted["job_id"].get<std::string>();
  }
  impl_->enqueue([this, job_id, dataset_id, predictor, strategy, config, threads] {
    auto& impl = *impl_;
    impl.update_job(job_id, [](json& j) { j["status"] = "running"; });
    try {
      const auto data = impl.load_dataset_by_id(dataset_id);
      const auto report = control_campaign(*predictor, data, strategy, config, threads);
      const auto report_path = impl.jobs_dir / (job_id + ".report.json");
      write_text_file(report_path, dump_json(to_json(report)));
      impl.update_job(job_id, [&](json& j) {
        j["status"] = "done";
        j["progress"] = 1.0;
        j["report"] = to_json(report, false);
        j["report_file"] = fs::relative(report_path, impl.config.artifact_dir).generic_string();
      });
    } catch (const std::exception& e) {
      impl.fail_job(job_id, e.what());
    }
  });
  return accepted;  // status as of submission
}

json Service::roc(std::string_view model_id, std::string_view dataset_id) const {
  const auto predictor = impl_->predictor(model_id);
  const auto data = impl_->load_dataset_by_id(std::string(dataset_id));
  const auto scores = predictor->probabilities(data);
  std::vector<int> labels;
  for (const auto& r : data.records) labels.push_back(r.outcome);
  if (std::count(labels.begin(), labels.end(), 1) == 0 || std::count(labels.begin(), labels.end(), 0) == 0) {
    throw invalid("ROC needs both outcomes in the dataset", {{"dataset", std::string(dataset_id)}});
  }
  auto out = to_json(dyadwatch::roc(scores, labels));
  out["model_id"] = std::string(model_id);
  out["dataset_id"] = std::string(dataset_id);
  out["confusion"] = to_json(confusion(scores, labels));
  return out;
}

json Service::register_model_file(const fs::path& artifact, std::string_view dataset_fingerprint) {
  Predictor predictor = [&] {
    try {
      return load_predictor(artifact);
    } catch (const NotFoundError& e) {
      throw ServiceError(404, e.what());
    } catch (const ConfigError& e) {
      throw invalid(e.what());
    }
  }();
  std::lock_guard lock(impl_->mutex);
  return impl_->register_model(predictor, {{"dataset_fingerprint", std::string(dataset_fingerprint)},
                                           {"source", artifact.filename().string()}});
}

void Service::wait_idle() {
  std::unique_lock lock(impl_->mutex);
  impl_->idle_cv.wait(lock, [&] { return impl_->queue.empty() && impl_->active == 0; });
}

}  // namespace dyadwatch
