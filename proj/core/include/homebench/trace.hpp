#pragma once

#include <filesystem>
#include <vector>

#include "homebench/jsonio.hpp"

namespace homebench::trace {

// Episode traces are line-delimited JSON: one record per line, insertion
// order preserved, so a whole-file byte compare is a replay check.
void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& lines);
std::vector<Json> read_jsonl(const std::filesystem::path& path);
std::string jsonl_bytes(const std::vector<Json>& lines);

}  // namespace homebench::trace
