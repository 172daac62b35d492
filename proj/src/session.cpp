#include "kbguard/session.hpp"

#include "kbguard/error.hpp"
#include "line_reader.hpp"

#include <algorithm>
#include <fstream>

namespace kbguard {

std::set<Term> AgentContext::all_ids() const {
    std::set<Term> out = intent_ids;
    out.insert(domain_ids.begin(), domain_ids.end());
    return out;
}

SessionManager::SessionManager(TripleStore& store, AuditLog& audit, std::chrono::seconds ttl)
    : store_(store), audit_(audit), ttl_(ttl) {
    std::random_device rd;
    std::seed_seq seed{rd(), rd(), rd(), rd()};
    rng_.seed(seed);
}

Session SessionManager::register_agent(const AgentDescriptor& desc,
                                       const RolePolicySet& policy, TimePoint now) {
    if (desc.agent_id.empty() ||
        desc.agent_id.find_first_of(" \t\r\n") != std::string::npos)
        throw Error("agent_id must be a non-empty bare token");

    std::lock_guard lock(mutex_);

    for (auto& [token, record] : sessions_) {
        if (record.session.agent.agent_id != desc.agent_id) continue;
        if (validate_locked(record, now) == SessionStatus::Active)
            throw DuplicateAgentError("agent '" + desc.agent_id +
                                      "' already has an active session");
    }

    auto policy_it = policy.find(desc.role);
    if (policy_it == policy.end())
        throw UnknownRoleError("role '" + desc.role.name + "' is not in the role policy");

    std::set<Term> granted;
    std::set_intersection(desc.requested_predicates.begin(), desc.requested_predicates.end(),
                          policy_it->second.allowed_predicates.begin(),
                          policy_it->second.allowed_predicates.end(),
                          std::inserter(granted, granted.begin()));
    if (granted.empty())
        throw EmptyGrantError("agent '" + desc.agent_id +
                              "': no requested predicate is allowed for role '" +
                              desc.role.name + "'");

    const GraphName profile_graph = GraphName::auth_profile(desc.agent_id);
    store_.retract_graph(profile_graph); // stale graph from a purged predecessor
    std::string granted_list;
    for (const Term& p : granted) {
        store_.insert(profile_graph, Triple::make(Term::iri(desc.agent_id),
                                                  vocab::can_access(), p,
                                                  KnowledgeClass::Dynamic));
        granted_list += granted_list.empty() ? p.text : " " + p.text;
    }

    Record record;
    record.session = Session{fresh_token_locked(), desc, SessionState::Active, now,
                             now + ttl_};
    Session snapshot = record.session;
    sessions_.emplace(snapshot.session_id, std::move(record));

    audit_.log(desc.agent_id, EventKind::Registration, std::nullopt,
               "granted: " + granted_list);
    return snapshot;
}

std::size_t SessionManager::revoke(const std::string& session_id, const std::string& reason) {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end())
        throw UnknownTokenError("unknown session token");
    return revoke_locked(it->second, reason);
}

SessionStatus SessionManager::validate(const std::string& session_id, TimePoint now) {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end())
        throw UnknownTokenError("unknown session token");
    return validate_locked(it->second, now);
}

SessionManager::EnforceView SessionManager::begin_enforce(const std::string& session_id,
                                                          TimePoint now) {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end())
        throw UnknownTokenError("unknown session token");

    EnforceView view;
    view.status = validate_locked(it->second, now);
    view.session = it->second.session;
    if (view.status == SessionStatus::Active) {
        const std::string& agent_id = view.session.agent.agent_id;
        TriplePattern grants{Term::iri(agent_id), vocab::can_access(),
                             Variable::named("p")};
        for (const Triple& t : store_.match(GraphName::auth_profile(agent_id), grants))
            view.granted.insert(t.object);
    }
    return view;
}

std::optional<Session> SessionManager::find(const std::string& session_id) const {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end()) return std::nullopt;
    return it->second.session;
}

SessionStatus SessionManager::validate_locked(Record& record, TimePoint now) {
    if (record.session.state == SessionState::Revoked) return SessionStatus::Revoked;
    if (now >= record.session.expires_at) {
        if (!record.profile_purged) {
            store_.retract_graph(GraphName::auth_profile(record.session.agent.agent_id));
            record.profile_purged = true;
            audit_.log(record.session.agent.agent_id, EventKind::Revocation, std::nullopt,
                       "session expired");
        }
        return SessionStatus::Expired;
    }
    return SessionStatus::Active;
}

std::size_t SessionManager::revoke_locked(Record& record, const std::string& reason) {
    if (record.session.state == SessionState::Revoked) return 0;
    record.session.state = SessionState::Revoked;
    std::size_t removed =
        store_.retract_graph(GraphName::auth_profile(record.session.agent.agent_id));
    record.profile_purged = true;
    audit_.log(record.session.agent.agent_id, EventKind::Revocation, std::nullopt, reason);
    return removed;
}

std::string SessionManager::fresh_token_locked() {
    static const char* hex = "0123456789abcdef";
    while (true) {
        std::string token;
        token.reserve(32);
        for (int word = 0; word < 2; ++word) {
            std::uint64_t v = rng_();
            for (int i = 60; i >= 0; i -= 4) token += hex[(v >> i) & 0xF];
        }
        if (!sessions_.count(token)) return token;
    }
}

namespace {

Term field_to_term(const detail::Field& f, const std::string& file, int line_no) {
    try {
        return f.quoted ? Term::literal(f.text) : Term::iri(f.text);
    } catch (const std::invalid_argument& e) {
        throw LoadError(file, line_no, e.what());
    }
}

} // namespace

RolePolicySet load_role_policy_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open role policy file: " + path.string());
    const std::string file = path.string();

    RolePolicySet policies;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = detail::split_fields(line, file, line_no);
        if (fields.empty()) continue;
        if (fields[0].text != "role" || fields[0].quoted)
            throw LoadError(file, line_no, "expected: role <name> <predicate> [...]");
        if (fields.size() < 3)
            throw LoadError(file, line_no, "role needs a name and at least one predicate");
        RoleName role = RoleName::named(fields[1].text);
        if (policies.count(role))
            throw LoadError(file, line_no, "duplicate role '" + role.name + "'");
        RolePolicy policy{role, {}};
        for (std::size_t i = 2; i < fields.size(); ++i) {
            if (fields[i].quoted)
                throw LoadError(file, line_no, "predicates are bare IRI tokens");
            policy.allowed_predicates.insert(field_to_term(fields[i], file, line_no));
        }
        policies.emplace(std::move(role), std::move(policy));
    }
    return policies;
}

AgentDescriptor load_agent_descriptor(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open agent descriptor: " + path.string());
    const std::string file = path.string();

    AgentDescriptor desc;
    bool saw_agent = false, saw_role = false;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = detail::split_fields(line, file, line_no);
        if (fields.empty()) continue;
        const std::string& key = fields[0].text;
        if (key == "agent") {
            if (fields.size() != 2 || fields[1].quoted)
                throw LoadError(file, line_no, "expected: agent <id>");
            desc.agent_id = fields[1].text;
            saw_agent = true;
        } else if (key == "role") {
            if (fields.size() != 2 || fields[1].quoted)
                throw LoadError(file, line_no, "expected: role <name>");
            desc.role = RoleName::named(fields[1].text);
            saw_role = true;
        } else if (key == "request" || key == "intent" || key == "domain") {
            if (fields.size() < 2)
                throw LoadError(file, line_no, "expected: " + key + " <id> [...]");
            for (std::size_t i = 1; i < fields.size(); ++i) {
                Term t = field_to_term(fields[i], file, line_no);
                if (key == "request") {
                    if (!t.is_iri())
                        throw LoadError(file, line_no, "predicates are bare IRI tokens");
                    desc.requested_predicates.insert(std::move(t));
                } else if (key == "intent") {
                    desc.context.intent_ids.insert(std::move(t));
                } else {
                    desc.context.domain_ids.insert(std::move(t));
                }
            }
        } else {
            throw LoadError(file, line_no, "unknown descriptor key '" + key + "'");
        }
    }
    if (!saw_agent) throw LoadError(file, 0, "descriptor is missing 'agent <id>'");
    if (!saw_role) throw LoadError(file, 0, "descriptor is missing 'role <name>'");
    if (desc.requested_predicates.empty())
        throw LoadError(file, 0, "descriptor requests no predicates");
    return desc;
}

std::string to_string(SessionStatus s) {
    switch (s) {
        case SessionStatus::Active: return "active";
        case SessionStatus::Revoked: return "revoked";
        case SessionStatus::Expired: return "expired";
    }
    return "?";
}

} // namespace kbguard
