#pragma once

#include "metricdft/error.hpp"
#include "metricdft/helium.hpp"
#include "metricdft/hooke.hpp"
#include "metricdft/ksinv.hpp"
#include "metricdft/system.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

namespace metricdft::io {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Version of this build, stamped into every output.
const char *build_id();

/// File written by a newer or unknown schema.
class SchemaError : public IoError {
public:
  using IoError::IoError;
};

json to_json(const hooke::HookeSolution &solution);
json to_json(const helium::HeliumSolution &solution);
/// KS document: the source document plus a "ks" block.
json to_json(const json &source, const ksinv::KsSystem &ks);

/// Rebuilds without re-solving. Numeric or missing-field problems raise
/// IoError naming the JSON path.
hooke::HookeSolution hooke_from(const json &doc);
helium::HeliumSolution helium_from(const json &doc);
/// Many-body record for "hooke"/"helium" documents, KS record for "ks".
SystemRecord record_from(const json &doc);

/// Pretty-printed UTF-8; doubles round-trip exactly.
void store(const json &doc, const std::filesystem::path &path);
json parse(const std::string &text, const std::string &origin);
json load(const std::filesystem::path &path);

} // namespace metricdft::io
