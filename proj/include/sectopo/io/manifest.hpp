#pragma once

#include <cstdint>
#include <map>
#include <string>

#include <json.hpp>

namespace sectopo::io {

inline constexpr const char* kToolVersion = "1.0.0";

/// Everything needed to rerun a command: the effective config text holds
/// every key with its resolved value.
struct RunManifest {
    std::string tool_version = kToolVersion;
    std::string command;
    std::string effective_config;
    std::uint64_t seed = 0;
    std::string started_utc;
    std::string finished_utc;
    /// Input path -> hex SHA-256 of its bytes.
    std::map<std::string, std::string> input_digests;

    nlohmann::json to_json() const;
    static RunManifest from_json(const nlohmann::json& j);
};

std::string sha256_hex(const std::string& bytes);

/// ISO 8601 UTC time of now, to the second.
std::string utc_now();

} // namespace sectopo::io
