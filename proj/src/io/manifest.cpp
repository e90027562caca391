#include "sectopo/io/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

#include <openssl/evp.h>

#include "sectopo/errors.hpp"
#include "sectopo/io/results.hpp"

namespace sectopo::io {

nlohmann::json RunManifest::to_json() const {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["tool_version"] = tool_version;
    j["command"] = command;
    j["seed"] = seed;
    j["started_utc"] = started_utc;
    j["finished_utc"] = finished_utc;
    j["input_digests"] = input_digests;
    j["effective_config"] = effective_config;
    return j;
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("effective_config") || !j["effective_config"].is_string())
        throw ConfigError("manifest has no effective_config string", 0, "effective_config");
    RunManifest m;
    m.tool_version = j.value("tool_version", "");
    m.command = j.value("command", "");
    m.effective_config = j["effective_config"].get<std::string>();
    m.seed = j.value("seed", std::uint64_t{0});
    m.started_utc = j.value("started_utc", "");
    m.finished_utc = j.value("finished_utc", "");
    if (j.contains("input_digests")) m.input_digests = j["input_digests"].get<std::map<std::string, std::string>>();
    return m;
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 failed");
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace sectopo::io
