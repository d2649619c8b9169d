#include "hexband/artifacts.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace hexband {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.16g", v);
  return buf;
}

std::vector<std::string> csv_header(const ExperimentConfig& cfg) {
  std::vector<std::string> lines;
  lines.push_back("# config_hash = " + cfg.hash());
  for (const auto& [k, v] : cfg.echo()) lines.push_back("# " + k + " = " + v);
  return lines;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

void write_csv(const std::string& path, const std::vector<std::string>& comments,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<std::string>>& rows) {
  std::string text;
  for (const auto& c : comments) text += c + "\n";
  for (size_t i = 0; i < columns.size(); ++i) {
    text += columns[i];
    text += i + 1 < columns.size() ? "," : "";
  }
  text += "\n";
  for (const auto& row : rows) {
    if (row.size() != columns.size())
      throw std::invalid_argument("write_csv: row width does not match the header");
    for (size_t i = 0; i < row.size(); ++i) {
      text += row[i];
      text += i + 1 < row.size() ? "," : "";
    }
    text += "\n";
  }
  write_text_file(path, text);
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

std::string artifact_dir(const std::string& out_root, const std::string& command,
                         const ExperimentConfig& cfg) {
  const std::filesystem::path dir =
      std::filesystem::path(out_root) / command / cfg.hash();
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace hexband
