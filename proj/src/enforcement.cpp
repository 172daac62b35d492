#include "kbguard/enforcement.hpp"

#include "kbguard/error.hpp"

#include <algorithm>
#include <set>

namespace kbguard {

bool row_less(const Binding& a, const Binding& b) {
    auto ai = a.begin(), bi = b.begin();
    for (; ai != a.end() && bi != b.end(); ++ai, ++bi) {
        if (ai->first.name != bi->first.name) return ai->first.name < bi->first.name;
        if (ai->second.text != bi->second.text) return ai->second.text < bi->second.text;
        if (ai->second.kind != bi->second.kind) return ai->second.kind < bi->second.kind;
    }
    return a.size() < b.size();
}

EnforcementOutcome EnforcementOutcome::allowed(std::vector<Binding> rows) {
    EnforcementOutcome o;
    o.kind = Kind::Allowed;
    o.rows = std::move(rows);
    return o;
}

EnforcementOutcome EnforcementOutcome::access_denied(std::string reason) {
    EnforcementOutcome o;
    o.kind = Kind::AccessDenied;
    o.reason = std::move(reason);
    return o;
}

EnforcementOutcome EnforcementOutcome::session_revoked(Term violating_predicate) {
    EnforcementOutcome o;
    o.kind = Kind::SessionRevoked;
    o.violating_predicate = std::move(violating_predicate);
    return o;
}

GuardResult wildcard_guard(const TriplePattern& pattern, const Session& session,
                           const Ontology& onto) {
    if (!is_variable(pattern.predicate)) return GuardResult::Pass;
    return onto.is_admin_scope(session.agent.role) ? GuardResult::Pass : GuardResult::Deny;
}

namespace {

TriplePattern substitute(const Binding& b, const TriplePattern& pattern) {
    auto pos = [&](const TermOrVar& p) -> TermOrVar {
        if (const Variable* v = as_variable(p)) {
            auto it = b.find(*v);
            if (it != b.end()) return it->second;
        }
        return p;
    };
    return TriplePattern{pos(pattern.subject), pos(pattern.predicate), pos(pattern.object)};
}

// Extends `b` with the bindings that make `pattern` equal `t`. Fails when a
// variable repeated inside the pattern would need two different terms.
bool extend(Binding& b, const TriplePattern& pattern, const Triple& t) {
    auto bind = [&](const TermOrVar& pos, const Term& val) {
        if (const Variable* v = as_variable(pos)) {
            auto [it, inserted] = b.emplace(*v, val);
            return inserted || it->second == val;
        }
        return true; // constants already matched
    };
    return bind(pattern.subject, t.subject) && bind(pattern.predicate, t.predicate) &&
           bind(pattern.object, t.object);
}

} // namespace

std::vector<Binding> execute_query(const Query& q, const TripleStore& store) {
    const GraphName kb = GraphName::kb();
    std::set<Binding> current{Binding{}};
    for (const TriplePattern& pattern : q.patterns) {
        std::set<Binding> next;
        for (const Binding& b : current) {
            TriplePattern ground = substitute(b, pattern);
            for (const Triple& t : store.match(kb, ground)) {
                Binding ext = b;
                if (extend(ext, ground, t)) next.insert(std::move(ext));
            }
        }
        current = std::move(next);
        if (current.empty()) break;
    }
    std::vector<Binding> rows(current.begin(), current.end());
    std::sort(rows.begin(), rows.end(), row_less);
    return rows;
}

namespace {

bool subject_survives(const Term& subject, const std::set<Term>& context_ids,
                      const TripleStore& store) {
    const GraphName kb = GraphName::kb();
    Variable any = Variable::named("ctx");
    bool associated = false;
    for (const Term* predicate : {&vocab::associated_with_intent(), &vocab::in_domain()}) {
        for (const Triple& t : store.match(kb, TriplePattern{subject, *predicate, any})) {
            associated = true;
            if (context_ids.count(t.object)) return true;
        }
    }
    return !associated;
}

} // namespace

std::vector<Binding> apply_contextual_pruning(const std::vector<Binding>& rows,
                                              const AgentContext& ctx,
                                              const TripleStore& store,
                                              const std::vector<TriplePattern>& patterns) {
    const std::set<Term> context_ids = ctx.all_ids();
    std::map<Term, bool> verdict_cache;
    auto survives = [&](const Term& subject) {
        auto it = verdict_cache.find(subject);
        if (it != verdict_cache.end()) return it->second;
        bool v = subject_survives(subject, context_ids, store);
        verdict_cache.emplace(subject, v);
        return v;
    };

    std::vector<Binding> out;
    for (const Binding& row : rows) {
        bool keep = true;
        for (const TriplePattern& pattern : patterns) {
            TriplePattern ground = substitute(row, pattern);
            const Term* subject = as_term(ground.subject);
            if (subject != nullptr && !survives(*subject)) {
                keep = false;
                break;
            }
        }
        if (keep) out.push_back(row);
    }
    return out;
}

EnforcementOutcome enforce(SessionManager& sessions, const std::string& session_id,
                           std::string_view query_text, TripleStore& store,
                           const Ontology& onto, AuditLog& audit, TimePoint now) {
    SessionManager::EnforceView view = sessions.begin_enforce(session_id, now);
    const std::string& agent_id = view.session.agent.agent_id;

    if (view.status != SessionStatus::Active) {
        std::string reason = "session " + to_string(view.status);
        audit.log(agent_id, EventKind::Denial, std::nullopt, reason);
        return EnforcementOutcome::access_denied(std::move(reason));
    }

    Query q;
    try {
        q = parse_query(query_text);
    } catch (const ParseError& e) {
        std::string reason = std::string("parse error: ") + e.what();
        audit.log(agent_id, EventKind::Denial, std::nullopt, reason);
        return EnforcementOutcome::access_denied(std::move(reason));
    }

    const std::vector<TriplePattern> patterns = extract_triple_patterns(q);
    const AuthProfile profile{agent_id, view.granted, view.session.agent.role};

    for (const TriplePattern& pattern : patterns) {
        if (is_variable(pattern.predicate)) {
            if (wildcard_guard(pattern, view.session, onto) == GuardResult::Deny) {
                std::string reason = "variable predicate " +
                                     to_string(pattern.predicate) + " (crawling guard)";
                audit.log(agent_id, EventKind::Denial, std::nullopt, reason);
                return EnforcementOutcome::access_denied(std::move(reason));
            }
            continue; // admin scope: no constant predicate to infer on
        }
        const Term& predicate = *as_term(pattern.predicate);
        if (!inference_check(profile, predicate, onto)) {
            audit.log(agent_id, EventKind::Violation, predicate,
                      "predicate outside the authorized closure");
            sessions.revoke(session_id, "triggered by violation of " + predicate.text);
            return EnforcementOutcome::session_revoked(predicate);
        }
    }

    std::vector<Binding> rows = execute_query(q, store);
    std::vector<Binding> pruned =
        apply_contextual_pruning(rows, view.session.agent.context, store, patterns);
    audit.log(agent_id, EventKind::Allowed, std::nullopt,
              std::to_string(pruned.size()) + " row(s)");
    return EnforcementOutcome::allowed(std::move(pruned));
}

std::string to_string(EnforcementOutcome::Kind k) {
    switch (k) {
        case EnforcementOutcome::Kind::Allowed: return "allowed";
        case EnforcementOutcome::Kind::AccessDenied: return "access_denied";
        case EnforcementOutcome::Kind::SessionRevoked: return "session_revoked";
    }
    return "?";
}

} // namespace kbguard
