#pragma once

#include <stdexcept>
#include <string>

#include "json.hpp"

namespace pdm {

// Reports and the catalog file share one JSON dialect; ordered so that
// serialized output is byte-stable across runs.
using Json = nlohmann::ordered_json;

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& doc);

}  // namespace pdm
