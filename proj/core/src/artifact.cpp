#include "dyadwatch/artifact.hpp"

#include <fstream>
#include <sstream>

#include "dyadwatch/error.hpp"
#include "dyadwatch/mlp.hpp"
#include "dyadwatch/report.hpp"

namespace dyadwatch {

using nlohmann::json;

namespace {

WeightVector weights_from_json(const json& j, const MlpArchitecture& arch) {
  auto w = j.get<WeightVector>();
  if (w.size() != arch.weight_count()) {
    throw ConfigError("model artifact: expected " + std::to_string(arch.weight_count()) + " weights, found " +
                      std::to_string(w.size()));
  }
  return w;
}

}  // namespace

json to_json(const Predictor& predictor) {
  json j;
  j["format"] = kModelFormat;
  j["version"] = kArtifactVersion;
  j["kind"] = std::string(to_string(predictor.kind()));
  j["architecture"] = to_json(predictor.architecture());
  j["weight_layout"] = std::string(kWeightLayoutTag);
  j["schema"] = predictor.schema().names();
  j["scaling"] = to_json(predictor.scaling());
  j["alphas"] = predictor.alphas();
  if (const auto* m = std::get_if<MlpModel>(&predictor.network())) {
    j["weights"] = m->weights;
  } else {
    const auto& e = std::get<PosteriorEnsemble>(predictor.network());
    j["samples"] = e.samples;
    j["acceptance_rate"] = e.acceptance_rate;
    j["divergent"] = e.divergent;
    j["hmc"] = to_json(e.config);
  }
  if (predictor.ard()) j["ard"] = to_json(*predictor.ard());
  return j;
}

Predictor predictor_from_json(const json& doc) {
  try {
    if (doc.value("format", std::string()) != kModelFormat) throw ConfigError("model artifact: unrecognized format");
    if (doc.at("version").get<int>() != kArtifactVersion) {
      throw ConfigError("model artifact: unsupported version " + doc.at("version").dump());
    }
    if (doc.at("weight_layout").get<std::string>() != kWeightLayoutTag) {
      throw ConfigError("model artifact: unsupported weight layout");
    }
    const auto& schema = VariableSchema::standard();
    if (doc.at("schema").get<std::vector<std::string>>() != schema.names()) {
      throw ConfigError("model artifact: schema does not match the dyadic variable set");
    }
    const auto arch = architecture_from_json(doc.at("architecture"));
    const auto scaling = scaling_from_json(doc.at("scaling"));
    const auto kind = model_kind_from_string(doc.at("kind").get<std::string>());

    Predictor::Network network;
    if (kind == ModelKind::map_evidence) {
      network = MlpModel{arch, weights_from_json(doc.at("weights"), arch)};
    } else {
      PosteriorEnsemble e;
      e.arch = arch;
      for (const auto& s : doc.at("samples")) e.samples.push_back(weights_from_json(s, arch));
      e.acceptance_rate = doc.at("acceptance_rate").get<double>();
      e.divergent = doc.at("divergent").get<std::size_t>();
      e.config = hmc_config_from_json(doc.at("hmc"));
      network = std::move(e);
    }
    Predictor predictor(std::move(network), scaling, schema);
    predictor.set_alphas(doc.at("alphas").get<std::vector<double>>());
    if (doc.contains("ard")) predictor.set_ard(ard_from_json(doc.at("ard")));
    return predictor;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("model artifact: ") + e.what());
  }
}

std::string dump_json(const json& document) { return document.dump(2) + "\n"; }

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json_file(const std::filesystem::path& path) {
  const auto text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": invalid JSON: " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  // Write-then-rename so readers never observe a partial file.
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw Error("cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error("cannot replace " + path.string() + ": " + ec.message());
}

void save_predictor(const std::filesystem::path& path, const Predictor& predictor) {
  write_text_file(path, dump_json(to_json(predictor)));
}

Predictor load_predictor(const std::filesystem::path& path) { return predictor_from_json(read_json_file(path)); }

}  // namespace dyadwatch
