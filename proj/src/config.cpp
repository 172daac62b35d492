#include "kbguard/config.hpp"

#include "kbguard/error.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <string>

namespace kbguard {

namespace {

std::string trim(const std::string& s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
    std::filesystem::path p(value);
    if (p.is_absolute()) return p;
    return base / p;
}

} // namespace

EngineConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());

    const std::filesystem::path base = path.has_parent_path() ? path.parent_path() : ".";
    EngineConfig config;
    std::set<std::string, std::less<>> seen;

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;

        const auto eq = stripped.find('=');
        const std::string where = path.string() + ":" + std::to_string(line_no);
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected `key = value`, got \"" + stripped + "\"");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": missing key before `=`");
        if (value.empty()) throw ConfigError(where + ": missing value for key \"" + key + "\"");
        if (!seen.insert(key).second)
            throw ConfigError(where + ": duplicate key \"" + key + "\"");

        if (key == "kb_path") {
            config.kb_path = resolve(base, value);
        } else if (key == "ontology_path") {
            config.ontology_path = resolve(base, value);
        } else if (key == "role_policy_path") {
            config.role_policy_path = resolve(base, value);
        } else if (key == "session_ttl_seconds") {
            long long ttl = 0;
            try {
                std::size_t pos = 0;
                ttl = std::stoll(value, &pos);
                if (pos != value.size()) throw std::invalid_argument(value);
            } catch (const std::exception&) {
                throw ConfigError(where + ": session_ttl_seconds must be an integer, got \"" +
                                  value + "\"");
            }
            if (ttl <= 0)
                throw ConfigError(where + ": session_ttl_seconds must be positive, got " + value);
            config.session_ttl = std::chrono::seconds(ttl);
        } else if (key == "listen_address") {
            split_listen_address(value); // validate eagerly
            config.listen_address = value;
        } else if (key == "audit_export_path") {
            config.audit_export_path = resolve(base, value);
        } else {
            throw ConfigError(where + ": unknown key \"" + key + "\"");
        }
    }

    if (config.kb_path.empty()) throw ConfigError(path.string() + ": missing required key kb_path");
    if (config.ontology_path.empty())
        throw ConfigError(path.string() + ": missing required key ontology_path");
    if (config.role_policy_path.empty())
        throw ConfigError(path.string() + ": missing required key role_policy_path");
    return config;
}

std::pair<std::string, int> split_listen_address(const std::string& address) {
    const auto colon = address.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == address.size())
        throw ConfigError("listen_address must be host:port, got \"" + address + "\"");
    const std::string host = address.substr(0, colon);
    const std::string port_text = address.substr(colon + 1);
    int port = 0;
    try {
        std::size_t pos = 0;
        port = std::stoi(port_text, &pos);
        if (pos != port_text.size()) throw std::invalid_argument(port_text);
    } catch (const std::exception&) {
        throw ConfigError("listen_address port must be numeric, got \"" + port_text + "\"");
    }
    if (port < 0 || port > 65535)
        throw ConfigError("listen_address port out of range: " + port_text);
    return {host, port};
}

} // namespace kbguard
