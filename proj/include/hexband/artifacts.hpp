#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hexband/config.hpp"

namespace hexband {

// 16 significant digits, '.' decimal point, locale independent.
std::string format_number(double v);

// Comment header lines ("# key = value") echoing the config and its hash.
std::vector<std::string> csv_header(const ExperimentConfig& cfg);

void write_text_file(const std::string& path, const std::string& content);

void write_csv(const std::string& path, const std::vector<std::string>& comments,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<std::string>>& rows);

void write_json_file(const std::string& path, const nlohmann::json& j);

// Creates <out_root>/<command>/<config-hash>/ and returns it.
std::string artifact_dir(const std::string& out_root, const std::string& command,
                         const ExperimentConfig& cfg);

}  // namespace hexband
