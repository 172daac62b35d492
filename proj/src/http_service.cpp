#include "kbguard/http_service.hpp"

#include "kbguard/engine.hpp"
#include "kbguard/error.hpp"

#include <httplib.h>

#include <thread>
#include <utility>

namespace kbguard {

using nlohmann::json;

nlohmann::json term_to_json(const Term& term) {
    return json{{"kind", term.kind == TermKind::Iri ? "iri" : "literal"}, {"text", term.text}};
}

Term term_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    const std::string text = j.at("text").get<std::string>();
    if (kind == "iri") return Term::iri(text);
    if (kind == "literal") return Term::literal(text);
    throw Error("term kind must be iri or literal, got \"" + kind + "\"");
}

nlohmann::json rows_to_json(const std::vector<Binding>& rows) {
    json out = json::array();
    for (const Binding& row : rows) {
        json obj = json::object();
        for (const auto& [var, term] : row) obj["?" + var.name] = term_to_json(term);
        out.push_back(std::move(obj));
    }
    return out;
}

std::vector<Binding> rows_from_json(const nlohmann::json& j) {
    std::vector<Binding> rows;
    for (const auto& obj : j) {
        Binding row;
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            std::string name = it.key();
            if (!name.empty() && name[0] == '?') name.erase(0, 1);
            row.emplace(Variable::named(name), term_from_json(it.value()));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

nlohmann::json outcome_to_json(const EnforcementOutcome& outcome) {
    json out{{"outcome", to_string(outcome.kind)}};
    if (outcome.kind == EnforcementOutcome::Kind::Allowed) out["rows"] = rows_to_json(outcome.rows);
    if (!outcome.reason.empty()) out["reason"] = outcome.reason;
    if (outcome.violating_predicate)
        out["violating_predicate"] = term_to_json(*outcome.violating_predicate);
    return out;
}

nlohmann::json record_to_json(const AuditRecord& record) {
    json out{{"sequence", record.sequence},
             {"timestamp", format_timestamp(record.timestamp)},
             {"agent_id", record.agent_id},
             {"event", to_string(record.event)},
             {"detail", record.detail}};
    out["predicate"] = record.predicate ? term_to_json(*record.predicate) : json(nullptr);
    return out;
}

AgentDescriptor descriptor_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error("register body must be a JSON object");
    AgentDescriptor desc;
    desc.agent_id = j.at("agent_id").get<std::string>();
    desc.role = RoleName::named(j.at("role").get<std::string>());
    const auto& requested = j.at("requested_predicates");
    if (!requested.is_array() || requested.empty())
        throw Error("requested_predicates must be a non-empty array");
    for (const auto& p : requested) desc.requested_predicates.insert(Term::iri(p.get<std::string>()));

    const auto read_terms = [&j](const char* key, std::set<Term>& into) {
        if (!j.contains(key)) return;
        for (const auto& element : j.at(key)) {
            if (element.is_string())
                into.insert(Term::iri(element.get<std::string>()));
            else
                into.insert(term_from_json(element));
        }
    };
    read_terms("intent_ids", desc.context.intent_ids);
    read_terms("domain_ids", desc.context.domain_ids);
    return desc;
}

namespace {

void send_error(httplib::Response& res, int status, const std::string& code,
                const std::string& message) {
    res.status = status;
    res.set_content(json{{"error", code}, {"message", message}}.dump(), "application/json");
}

// Runs a handler body and maps thrown engine errors onto the wire contract.
// Most-derived catch clauses come first; Error is the engine's base class.
template <typename Fn>
void dispatch(httplib::Response& res, Fn&& fn) {
    try {
        auto [status, body] = fn();
        res.status = status;
        res.set_content(body.dump(), "application/json");
    } catch (const nlohmann::json::exception& e) {
        send_error(res, 400, "bad_request", e.what());
    } catch (const ParseError& e) {
        send_error(res, 400, "parse_error", e.what());
    } catch (const UnknownTokenError& e) {
        send_error(res, 401, "unknown_token", e.what());
    } catch (const EmptyGrantError& e) {
        send_error(res, 403, "empty_grant", e.what());
    } catch (const DuplicateAgentError& e) {
        send_error(res, 409, "duplicate_agent", e.what());
    } catch (const UnknownRoleError& e) {
        send_error(res, 422, "unknown_role", e.what());
    } catch (const std::invalid_argument& e) {
        send_error(res, 400, "bad_request", e.what());
    } catch (const Error& e) {
        send_error(res, 400, "engine_error", e.what());
    } catch (const std::exception& e) {
        send_error(res, 500, "internal", e.what());
    }
}

} // namespace

struct HttpService::Impl {
    explicit Impl(Engine& e) : engine(e) { configure(); }

    void configure() {
        server.Post("/register", [this](const httplib::Request& req, httplib::Response& res) {
            dispatch(res, [&]() -> std::pair<int, json> {
                const AgentDescriptor desc = descriptor_from_json(json::parse(req.body));
                const Session session = engine.register_agent(desc);
                json granted = json::array();
                for (const Term& t : engine.granted_predicates(desc.agent_id))
                    granted.push_back(t.text);
                json body{{"session_id", session.session_id},
                          {"agent_id", desc.agent_id},
                          {"granted", std::move(granted)},
                          {"expires_at_unix",
                           std::chrono::system_clock::to_time_t(session.expires_at)}};
                return {201, std::move(body)};
            });
        });

        server.Post("/query", [this](const httplib::Request& req, httplib::Response& res) {
            dispatch(res, [&]() -> std::pair<int, json> {
                const json body = json::parse(req.body);
                const std::string session_id = body.at("session_id").get<std::string>();
                const std::string query_text = body.at("query").get<std::string>();
                return {200, outcome_to_json(engine.query(session_id, query_text))};
            });
        });

        server.Post("/revoke", [this](const httplib::Request& req, httplib::Response& res) {
            dispatch(res, [&]() -> std::pair<int, json> {
                const json body = json::parse(req.body);
                const std::size_t removed =
                    engine.revoke(body.at("session_id").get<std::string>());
                return {200, json{{"removed", removed}}};
            });
        });

        server.Get("/audit", [this](const httplib::Request& req, httplib::Response& res) {
            dispatch(res, [&]() -> std::pair<int, json> {
                AuditFilter filter;
                if (req.has_param("agent_id")) filter.agent_id = req.get_param_value("agent_id");
                if (req.has_param("event")) {
                    const auto kind = event_kind_from_string(req.get_param_value("event"));
                    if (!kind)
                        return {400, json{{"error", "bad_request"},
                                          {"message", "unknown event kind"}}};
                    filter.event = *kind;
                }
                json records = json::array();
                for (const AuditRecord& record : engine.audit_query(filter))
                    records.push_back(record_to_json(record));
                return {200, json{{"records", std::move(records)}}};
            });
        });

        server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(json{{"status", "ok"}}.dump(), "application/json");
        });
    }

    Engine& engine;
    httplib::Server server;
    std::thread worker;
};

HttpService::HttpService(Engine& engine) : impl_(std::make_unique<Impl>(engine)) {}

HttpService::~HttpService() { stop(); }

bool HttpService::listen(const std::string& host, int port) {
    return impl_->server.listen(host, port);
}

int HttpService::start_on_any_port(const std::string& host) {
    const int port = impl_->server.bind_to_any_port(host);
    if (port < 0) return -1;
    impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return port;
}

void HttpService::stop() {
    if (!impl_) return;
    impl_->server.stop();
    if (impl_->worker.joinable()) impl_->worker.join();
}

} // namespace kbguard
