#pragma once

#include "kbguard/audit.hpp"
#include "kbguard/reasoner.hpp"
#include "kbguard/store.hpp"
#include "kbguard/term.hpp"

#include <chrono>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <string>

namespace kbguard {

using TimePoint = std::chrono::system_clock::time_point;

/// The agent's operational scope: the intent instances and domain ids its
/// query results are confined to. Both sets empty means the agent declared
/// no instance restriction, and only unassociated data survives pruning.
struct AgentContext {
    std::set<Term> intent_ids;
    std::set<Term> domain_ids;

    std::set<Term> all_ids() const;

    friend bool operator==(const AgentContext&, const AgentContext&) = default;
};

/// Registration input for one agent.
struct AgentDescriptor {
    std::string agent_id;
    RoleName role;
    std::set<Term> requested_predicates;
    AgentContext context;
};

enum class SessionState { Active, Revoked };

/// validate()'s view of a session; expired sessions behave as revoked for
/// enforcement but keep their distinct status.
enum class SessionStatus { Active, Revoked, Expired };

/// A live agent identity. State only ever moves Active -> Revoked;
/// re-registration creates a new session.
struct Session {
    std::string session_id;
    AgentDescriptor agent;
    SessionState state = SessionState::Active;
    TimePoint created_at;
    TimePoint expires_at;
};

struct RolePolicy {
    RoleName role;
    std::set<Term> allowed_predicates;
};

using RolePolicySet = std::map<RoleName, RolePolicy>;

/// Owns session lifecycle and the store-side authorization profiles.
///
/// State transitions are atomic and linearizable: the profile graph is only
/// written while the manager lock is held, so an enforcement snapshot taken
/// under the same lock observes either the full pre-revocation profile or a
/// revoked session, never a partially retracted profile.
class SessionManager {
public:
    SessionManager(TripleStore& store, AuditLog& audit, std::chrono::seconds ttl);

    /// Grants requested INTERSECT policy[role].allowed and materializes the
    /// grant as (agent_id, canAccess, p) triples in AuthProfile(agent_id).
    /// Throws DuplicateAgentError, UnknownRoleError, EmptyGrantError.
    Session register_agent(const AgentDescriptor& desc, const RolePolicySet& policy,
                           TimePoint now);

    /// Retracts the whole AuthProfile graph and marks the session revoked.
    /// Idempotent: a second call returns 0. Returns the number of assertions
    /// removed. Throws UnknownTokenError for an unknown session id.
    std::size_t revoke(const std::string& session_id, const std::string& reason);

    /// Lazily applies expiry: the first validate observing now >= expires_at
    /// retracts the profile exactly as revoke does.
    SessionStatus validate(const std::string& session_id, TimePoint now);

    /// Consistent (status, agent, granted) snapshot for one enforcement run.
    struct EnforceView {
        SessionStatus status = SessionStatus::Revoked;
        Session session;
        std::set<Term> granted;
    };
    EnforceView begin_enforce(const std::string& session_id, TimePoint now);

    std::optional<Session> find(const std::string& session_id) const;

    std::chrono::seconds ttl() const { return ttl_; }

private:
    struct Record {
        Session session;
        bool profile_purged = false;
    };

    SessionStatus validate_locked(Record& record, TimePoint now);
    std::size_t revoke_locked(Record& record, const std::string& reason);
    std::string fresh_token_locked();

    TripleStore& store_;
    AuditLog& audit_;
    std::chrono::seconds ttl_;
    mutable std::mutex mutex_;
    std::map<std::string, Record> sessions_;
    std::mt19937_64 rng_;
};

/// Line-oriented role policy: `role <name> <predicate> [<predicate> ...]`.
RolePolicySet load_role_policy_file(const std::filesystem::path& path);

/// Line-oriented agent descriptor:
///   agent <id>
///   role <name>
///   request <predicate> [...]     (repeatable)
///   intent <id> [...]             (optional, repeatable)
///   domain <id> [...]             (optional, repeatable)
AgentDescriptor load_agent_descriptor(const std::filesystem::path& path);

std::string to_string(SessionStatus s);

} // namespace kbguard
