#pragma once

#include <string>
#include <string_view>

#include "depscan/error.hpp"
#include "json.hpp"

namespace depscan::detail {

inline constexpr int kSchemaVersion = 1;

inline const nlohmann::json& require(const nlohmann::json& doc,
                                     std::string_view key) {
  if (!doc.is_object()) {
    throw Error(ErrorKind::corrupt_payload, "expected an object");
  }
  const auto it = doc.find(key);
  if (it == doc.end()) {
    throw Error(ErrorKind::corrupt_payload,
                "missing field '" + std::string(key) + "'");
  }
  return *it;
}

template <typename T>
T require_as(const nlohmann::json& doc, std::string_view key) {
  try {
    return require(doc, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::corrupt_payload,
                "field '" + std::string(key) + "': " + e.what());
  }
}

// Validates the `version` (and `kind`, when given) header of a document.
inline void check_header(const nlohmann::json& doc, std::string_view kind) {
  if (!doc.is_object()) {
    throw Error(ErrorKind::corrupt_payload, "document is not an object");
  }
  const auto version = doc.find("version");
  if (version == doc.end() || !version->is_number_integer()) {
    throw Error(ErrorKind::corrupt_payload, "missing integer 'version'");
  }
  if (version->get<long long>() != kSchemaVersion) {
    throw Error(ErrorKind::version_unsupported,
                "schema version " + version->dump() + " is not supported");
  }
  if (!kind.empty()) {
    const auto k = doc.find("kind");
    if (k == doc.end() || !k->is_string() || k->get<std::string>() != kind) {
      throw Error(ErrorKind::corrupt_payload,
                  "expected document kind '" + std::string(kind) + "'");
    }
  }
}

}  // namespace depscan::detail
