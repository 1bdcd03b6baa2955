#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "dyadwatch/predictor.hpp"

namespace dyadwatch {

inline constexpr int kArtifactVersion = 1;
inline constexpr const char* kModelFormat = "dyadwatch.model";

// Versioned model artifact. Doubles are written in shortest round-trip form,
// so load(save(m)) is bit-exact.
nlohmann::json to_json(const Predictor& predictor);
Predictor predictor_from_json(const nlohmann::json& document);

std::string dump_json(const nlohmann::json& document);  // 2-space indent, trailing newline
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

void save_predictor(const std::filesystem::path& path, const Predictor& predictor);
Predictor load_predictor(const std::filesystem::path& path);

}  // namespace dyadwatch
