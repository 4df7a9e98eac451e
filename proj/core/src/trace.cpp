#include "homebench/trace.hpp"

#include <fstream>

#include "homebench/error.hpp"

namespace homebench::trace {

std::string jsonl_bytes(const std::vector<Json>& lines) {
  std::string out;
  for (const auto& j : lines) {
    out += j.dump();
    out += '\n';
  }
  return out;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& lines) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ParseError("cannot write " + path.string());
  f << jsonl_bytes(lines);
}

std::vector<Json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open " + path.string());
  std::vector<Json> out;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(Json::parse(line));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(path.string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace homebench::trace
