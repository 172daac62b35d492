#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>

namespace kbguard {

/// Engine startup configuration. Every referenced file must parse at startup;
/// the engine fails fast otherwise.
struct EngineConfig {
    std::filesystem::path kb_path;
    std::filesystem::path ontology_path;
    std::filesystem::path role_policy_path;
    std::chrono::seconds session_ttl{3600};
    std::string listen_address = "127.0.0.1:8080"; // service mode only
    std::optional<std::filesystem::path> audit_export_path;
};

/// Parses the `key = value` config format (`#` comments). Relative paths are
/// resolved against the config file's directory. Keys: kb_path,
/// ontology_path, role_policy_path, session_ttl_seconds, listen_address,
/// audit_export_path. Throws ConfigError.
EngineConfig load_config_file(const std::filesystem::path& path);

/// Splits "host:port"; throws ConfigError on a malformed address.
std::pair<std::string, int> split_listen_address(const std::string& address);

} // namespace kbguard
