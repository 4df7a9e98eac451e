#pragma once

#include <filesystem>
#include <set>
#include <string>

#include <json.hpp>

#include "homebench/error.hpp"
#include "homebench/rng.hpp"

namespace homebench {

// All files the harness writes use insertion-ordered objects and a fixed
// 2-space dump, so identical content means identical bytes.
using Json = nlohmann::ordered_json;

std::string canonical_dump(const Json& j);

Json load_json_file(const std::filesystem::path& path);
void save_json_file(const std::filesystem::path& path, const Json& j);

// Strict-object guard: parsing rejects keys outside the allowed set, so
// schema drift and typos fail loudly instead of being ignored.
void require_keys(const Json& obj, const std::set<std::string>& required,
                  const std::set<std::string>& optional,
                  const std::string& context);

const Json& require_field(const Json& obj, const std::string& key,
                          const std::string& context);

// 64-bit content hash rendered as 16 hex chars; used for observation digests
// and content-addressed archive directories.
std::string content_hash(std::string_view bytes);

}  // namespace homebench
