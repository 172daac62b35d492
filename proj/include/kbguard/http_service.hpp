#pragma once

#include "kbguard/audit.hpp"
#include "kbguard/enforcement.hpp"
#include "kbguard/session.hpp"

#include <json.hpp>

#include <memory>
#include <string>

namespace kbguard {

class Engine;

// Wire representation, shared by the service and its tests so both sides
// agree on field names. Terms carry their kind explicitly because an IRI and
// a literal with equal text are different terms.
nlohmann::json term_to_json(const Term& term);
Term term_from_json(const nlohmann::json& j);
nlohmann::json rows_to_json(const std::vector<Binding>& rows);
std::vector<Binding> rows_from_json(const nlohmann::json& j);
nlohmann::json outcome_to_json(const EnforcementOutcome& outcome);
nlohmann::json record_to_json(const AuditRecord& record);
/// Throws Error when required fields are missing or malformed.
AgentDescriptor descriptor_from_json(const nlohmann::json& j);

/// HTTP facade over an Engine.
///
///   POST /register  descriptor JSON -> 201 {session_id, agent_id, granted, expires_at_unix}
///   POST /query     {session_id, query} -> 200 outcome JSON
///   POST /revoke    {session_id} -> 200 {removed}
///   GET  /audit     ?agent_id=&event= -> 200 {records}
///   GET  /health    -> 200 {status}
///
/// Engine errors map to {error, message} bodies: unknown_token 401,
/// empty_grant 403, duplicate_agent 409, unknown_role 422, parse_error and
/// malformed bodies 400.
class HttpService {
public:
    explicit HttpService(Engine& engine);
    ~HttpService();

    HttpService(const HttpService&) = delete;
    HttpService& operator=(const HttpService&) = delete;

    /// Serve mode: binds and blocks until stop(). False if the bind failed.
    bool listen(const std::string& host, int port);

    /// Test mode: binds an ephemeral port and serves from a background
    /// thread. Returns the bound port, or -1 on failure.
    int start_on_any_port(const std::string& host);

    /// Stops the server and joins the background thread if one is running.
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace kbguard
