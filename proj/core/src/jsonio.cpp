#include "homebench/jsonio.hpp"

#include <cstdio>
#include <fstream>

namespace homebench {

std::string canonical_dump(const Json& j) { return j.dump(2) + "\n"; }

Json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void save_json_file(const std::filesystem::path& path, const Json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot write " + path.string());
  out << canonical_dump(j);
}

void require_keys(const Json& obj, const std::set<std::string>& required,
                  const std::set<std::string>& optional,
                  const std::string& context) {
  if (!obj.is_object()) throw ParseError(context + ": expected object");
  for (const auto& key : required) {
    if (!obj.contains(key)) throw ParseError(context + ": missing field '" + key + "'");
  }
  for (const auto& [key, _] : obj.items()) {
    if (!required.count(key) && !optional.count(key)) {
      throw ParseError(context + ": unknown field '" + key + "'");
    }
  }
}

const Json& require_field(const Json& obj, const std::string& key,
                          const std::string& context) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError(context + ": missing field '" + key + "'");
  }
  return obj.at(key);
}

std::string content_hash(std::string_view bytes) {
  std::uint64_t h = fnv1a64(bytes);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace homebench
