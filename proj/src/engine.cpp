#include "kbguard/engine.hpp"

#include "kbguard/error.hpp"

namespace kbguard {

Engine::Engine(const EngineConfig& config)
    : config_(config), sessions_(store_, audit_, config.session_ttl) {
    if (config_.audit_export_path) audit_.enable_export(*config_.audit_export_path);
    load_kb_file(store_, config_.kb_path);
    ontology_ = load_ontology_file(config_.ontology_path);
    policies_ = load_role_policy_file(config_.role_policy_path);
}

Engine::Engine(const std::vector<Triple>& kb, Ontology ontology, RolePolicySet policies,
               std::chrono::seconds session_ttl)
    : ontology_(std::move(ontology)), policies_(std::move(policies)),
      sessions_(store_, audit_, session_ttl) {
    config_.session_ttl = session_ttl;
    for (const Triple& t : kb) store_.insert(GraphName::kb(), t);
}

Session Engine::register_agent(const AgentDescriptor& descriptor) {
    return sessions_.register_agent(descriptor, policies_, std::chrono::system_clock::now());
}

EnforcementOutcome Engine::query(const std::string& session_id, std::string_view query_text) {
    if (!sessions_.find(session_id)) throw UnknownTokenError(session_id);
    auto lock = session_lock(session_id);
    std::lock_guard<std::mutex> guard(*lock);
    return enforce(sessions_, session_id, query_text, store_, ontology_, audit_,
                   std::chrono::system_clock::now());
}

std::size_t Engine::revoke(const std::string& session_id) {
    if (!sessions_.find(session_id)) throw UnknownTokenError(session_id);
    auto lock = session_lock(session_id);
    std::lock_guard<std::mutex> guard(*lock);
    return sessions_.revoke(session_id, "revoked by operator");
}

std::vector<AuditRecord> Engine::audit_query(const AuditFilter& filter) const {
    return audit_.query_log(filter);
}

std::vector<Term> Engine::granted_predicates(const std::string& agent_id) const {
    const auto rows = store_.match(
        GraphName::auth_profile(agent_id),
        TriplePattern{Term::iri(agent_id), vocab::can_access(), Variable::named("p")});
    std::vector<Term> granted;
    granted.reserve(rows.size());
    for (const Triple& t : rows) granted.push_back(t.object);
    return granted;
}

std::shared_ptr<std::mutex> Engine::session_lock(const std::string& session_id) {
    std::lock_guard<std::mutex> guard(locks_mutex_);
    auto& slot = session_locks_[session_id];
    if (!slot) slot = std::make_shared<std::mutex>();
    return slot;
}

} // namespace kbguard
