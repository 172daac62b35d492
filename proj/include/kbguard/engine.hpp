#pragma once

#include "kbguard/audit.hpp"
#include "kbguard/config.hpp"
#include "kbguard/enforcement.hpp"
#include "kbguard/reasoner.hpp"
#include "kbguard/session.hpp"
#include "kbguard/store.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace kbguard {

/// Facade wiring the store, reasoner, session manager, audit log, and
/// enforcement pipeline behind one object. Safe for concurrent callers;
/// requests against the same session are serialized so the one-violation,
/// one-revocation audit shape holds even under racing clients.
class Engine {
public:
    /// Loads everything named by the config. Throws on the first bad file.
    explicit Engine(const EngineConfig& config);

    /// In-memory construction for embedding and tests: seeds the KB graph
    /// from `kb`, no files touched.
    Engine(const std::vector<Triple>& kb, Ontology ontology, RolePolicySet policies,
           std::chrono::seconds session_ttl);

    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    Session register_agent(const AgentDescriptor& descriptor);
    EnforcementOutcome query(const std::string& session_id, std::string_view query_text);
    /// Returns the number of retracted profile triples. Throws UnknownTokenError.
    std::size_t revoke(const std::string& session_id);
    std::vector<AuditRecord> audit_query(const AuditFilter& filter) const;

    /// Predicates currently granted to the agent, read from its profile graph.
    std::vector<Term> granted_predicates(const std::string& agent_id) const;

    const TripleStore& store() const { return store_; }
    const Ontology& ontology() const { return ontology_; }
    const RolePolicySet& role_policies() const { return policies_; }
    const EngineConfig& config() const { return config_; }
    SessionManager& sessions() { return sessions_; }
    const AuditLog& audit() const { return audit_; }

private:
    std::shared_ptr<std::mutex> session_lock(const std::string& session_id);

    EngineConfig config_;
    TripleStore store_;
    Ontology ontology_;
    RolePolicySet policies_;
    AuditLog audit_;
    SessionManager sessions_;

    std::mutex locks_mutex_;
    std::map<std::string, std::shared_ptr<std::mutex>> session_locks_;
};

} // namespace kbguard
