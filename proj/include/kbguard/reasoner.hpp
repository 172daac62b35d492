#pragma once

#include "kbguard/store.hpp"
#include "kbguard/term.hpp"

#include <chrono>
#include <filesystem>
#include <set>
#include <string>
#include <utility>

namespace kbguard {

struct Session; // session.hpp

/// An agent role, compared case-sensitively.
struct RoleName {
    std::string name;

    static RoleName named(std::string name);

    friend auto operator<=>(const RoleName&, const RoleName&) = default;
};

/// The global security ontology: the sub-property hierarchy plus the roles
/// holding administrative ontology scope. Immutable after load; the loader
/// rejects cyclic hierarchies.
struct Ontology {
    /// (child, parent): granting the parent class grants the child predicate.
    std::set<std::pair<Term, Term>> sub_property_edges;
    std::set<RoleName> admin_scopes;

    bool is_admin_scope(const RoleName& role) const { return admin_scopes.count(role) > 0; }
};

/// An agent's materialized authorization profile. The store's
/// AuthProfile(agent_id) graph is the source of truth; this is a snapshot of
/// the canAccess objects found there.
struct AuthProfile {
    std::string agent_id;
    std::set<Term> granted;
    RoleName role;
};

/// Throws CycleError if the sub-property relation has a cycle.
void validate_acyclic(const Ontology& o);

/// The set of predicates reachable from `granted` by descending sub-property
/// edges: a predicate is accessible when it is granted directly or is a
/// (transitive) sub-property of a granted one. Pure and deterministic.
/// Throws CycleError when handed an ontology that skipped load validation.
std::set<Term> closure(const std::set<Term>& granted, const Ontology& o);

/// True iff `p` is in closure(agent.granted, o). `p` must be a constant
/// predicate; variables never reach this check.
bool inference_check(const AuthProfile& agent, const Term& p, const Ontology& o);

/// Reads the canAccess assertions of AuthProfile(agent_id) into a snapshot.
AuthProfile load_profile(const TripleStore& store, const std::string& agent_id,
                         RoleName role);

/// The per-pattern authorization decision: the requested (s, p, o) tuple is
/// authorized iff the session is live with its role bound and the predicate
/// passes the inference check against the session's stored profile. The
/// subject and object complete the requested tuple; object-side scoping is
/// applied later by result pruning. False is a decision, never an error.
bool auth_decision(const Session& session, const TripleStore& store,
                   const TermOrVar& subject, const Term& predicate,
                   const TermOrVar& object, const Ontology& onto,
                   std::chrono::system_clock::time_point now);

/// Loads the line-oriented ontology format:
///   sub <child> <parent>
///   admin-scope <role>
/// with `#` comments. Validates acyclicity. Throws LoadError / CycleError.
Ontology load_ontology_file(const std::filesystem::path& path);

} // namespace kbguard
