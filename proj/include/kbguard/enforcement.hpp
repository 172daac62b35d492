#pragma once

#include "kbguard/audit.hpp"
#include "kbguard/query.hpp"
#include "kbguard/reasoner.hpp"
#include "kbguard/session.hpp"
#include "kbguard/store.hpp"
#include "kbguard/term.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kbguard {

/// One query solution row: the full variable assignment for the query's
/// patterns (every pattern variable is bound, projected or not).
using Binding = std::map<Variable, Term>;

/// Row order used everywhere results surface: lexicographic over the row's
/// (variable name, bound term text) sequence, with the term kind as final
/// tie-break. Keeps outcomes reproducible.
bool row_less(const Binding& a, const Binding& b);

struct EnforcementOutcome {
    enum class Kind { Allowed, AccessDenied, SessionRevoked };

    Kind kind = Kind::AccessDenied;
    std::vector<Binding> rows;               // Allowed
    std::string reason;                      // AccessDenied
    std::optional<Term> violating_predicate; // SessionRevoked: first violation, loop order

    static EnforcementOutcome allowed(std::vector<Binding> rows);
    static EnforcementOutcome access_denied(std::string reason);
    static EnforcementOutcome session_revoked(Term violating_predicate);
};

enum class GuardResult { Pass, Deny };

/// The crawling guard: denies a variable-predicate pattern unless the
/// session's role holds administrative ontology scope.
GuardResult wildcard_guard(const TriplePattern& pattern, const Session& session,
                           const Ontology& onto);

/// Natural join of the query's patterns over the KB graph: a binding is
/// returned iff substituting it into every pattern yields a stored triple.
/// Rows are deduplicated and sorted by row_less.
std::vector<Binding> execute_query(const Query& q, const TripleStore& store);

/// Semantic result refinement: a row survives iff every ground subject of its
/// substituted patterns either has no associatedWithIntent/inDomain triple in
/// the KB, or has at least one whose object falls inside the agent's
/// intent/domain ids. Unassociated subjects are instance-neutral and always
/// survive.
std::vector<Binding> apply_contextual_pruning(const std::vector<Binding>& rows,
                                              const AgentContext& ctx,
                                              const TripleStore& store,
                                              const std::vector<TriplePattern>& patterns);

/// The full enforcement pipeline for one query:
///   1. a session that is not active is denied outright;
///   2. unparseable query text is denied (never a crash);
///   3. per pattern, in order: variable predicate -> denied unless admin
///      scope; failed inference check -> violation logged, session revoked,
///      SessionRevoked returned;
///   4. otherwise execute, prune to the agent's context, return Allowed.
///
/// Wildcard probes are denied without touching session state; inference
/// failures kill the session. Throws UnknownTokenError for an unknown id.
EnforcementOutcome enforce(SessionManager& sessions, const std::string& session_id,
                           std::string_view query_text, TripleStore& store,
                           const Ontology& onto, AuditLog& audit, TimePoint now);

std::string to_string(EnforcementOutcome::Kind k);

} // namespace kbguard
