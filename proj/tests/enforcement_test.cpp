#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kbguard/enforcement.hpp"
#include "kbguard/error.hpp"

#include "support/generators.hpp"
#include "support/oracles.hpp"

#include <algorithm>

using namespace kbguard;
using namespace kbguard::testing;

namespace {

std::set<Term> terms(std::initializer_list<const char*> names) {
    std::set<Term> out;
    for (const char* n : names) out.insert(Term::iri(n));
    return out;
}

Triple t(const char* s, const char* p, const char* o) {
    return Triple::make(Term::iri(s), Term::iri(p), Term::iri(o));
}

// A small world with one monitor, one admin, and context associations.
struct Fixture {
    TripleStore store;
    AuditLog audit;
    SessionManager sessions{store, audit, std::chrono::seconds(3600)};
    Ontology onto;
    TimePoint now = std::chrono::system_clock::now();
    Session monitor;
    Session admin;

    Fixture() {
        store.insert(GraphName::kb(), t("agentM", "monitors", "cell1"));
        store.insert(GraphName::kb(), t("agentM", "monitors", "cell2"));
        store.insert(GraphName::kb(), t("agentM", "observesKpi", "kpi1"));
        store.insert(GraphName::kb(), t("agentO", "actuates", "cell3"));
        store.insert(GraphName::kb(), t("cell1", "associatedWithIntent", "intent7"));
        store.insert(GraphName::kb(), t("cell2", "associatedWithIntent", "intent9"));
        store.insert(GraphName::kb(), t("cell3", "locatedIn", "regionSouth"));

        onto.sub_property_edges.emplace(Term::iri("observesKpi"), Term::iri("monitors"));
        onto.admin_scopes.insert(RoleName::named("Admin"));

        RolePolicySet policy;
        const RoleName monitor_role = RoleName::named("Monitor");
        const RoleName admin_role = RoleName::named("Admin");
        policy.emplace(monitor_role, RolePolicy{monitor_role, terms({"monitors"})});
        policy.emplace(admin_role,
                       RolePolicy{admin_role, terms({"monitors", "actuates", "locatedIn"})});

        AgentDescriptor m;
        m.agent_id = "agentM";
        m.role = monitor_role;
        m.requested_predicates = terms({"monitors", "actuates"});
        m.context.intent_ids = terms({"intent7"});
        monitor = sessions.register_agent(m, policy, now);

        AgentDescriptor a;
        a.agent_id = "agentA";
        a.role = admin_role;
        a.requested_predicates = terms({"monitors", "actuates", "locatedIn"});
        a.context.intent_ids = terms({"intent7", "intent9"});
        admin = sessions.register_agent(a, policy, now);
    }

    EnforcementOutcome run(const Session& s, const std::string& text) {
        return enforce(sessions, s.session_id, text, store, onto, audit, now);
    }

    std::size_t count(EventKind kind) {
        AuditFilter f;
        f.event = kind;
        return audit.query_log(f).size();
    }
};

} // namespace

TEST_CASE("wildcard_guard denies variable predicates for non-admin roles only") {
    Fixture f;
    const TriplePattern wildcard{Variable::named("x"), Variable::named("p"), Term::iri("cell1")};
    const TriplePattern constant{Variable::named("x"), Term::iri("monitors"),
                                 Variable::named("y")};
    const TriplePattern all_vars{Variable::named("x"), Variable::named("p"),
                                 Variable::named("y")};

    CHECK(wildcard_guard(wildcard, f.monitor, f.onto) == GuardResult::Deny);
    CHECK(wildcard_guard(constant, f.monitor, f.onto) == GuardResult::Pass);
    CHECK(wildcard_guard(constant, f.admin, f.onto) == GuardResult::Pass);
    CHECK(wildcard_guard(all_vars, f.admin, f.onto) == GuardResult::Pass);
    CHECK(wildcard_guard(all_vars, f.monitor, f.onto) == GuardResult::Deny);
}

TEST_CASE("execute_query: single pattern, single match") {
    TripleStore store;
    store.insert(GraphName::kb(), t("agentM", "monitors", "cell1"));
    const auto rows = execute_query(parse_query("SELECT ?x WHERE { ?x monitors cell1 . }"),
                                    store);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].at(Variable::named("x")) == Term::iri("agentM"));
}

TEST_CASE("execute_query over an empty store is empty") {
    TripleStore store;
    CHECK(execute_query(parse_query("SELECT ?x WHERE { ?x monitors cell1 . }"), store).empty());
}

TEST_CASE("execute_query joins patterns on shared variables") {
    TripleStore store;
    store.insert(GraphName::kb(), t("agentM", "monitors", "cell1"));
    store.insert(GraphName::kb(), t("agentM", "monitors", "cell2"));
    store.insert(GraphName::kb(), t("cell1", "locatedIn", "regionNorth"));

    const auto rows = execute_query(
        parse_query("SELECT ?c ?r WHERE { agentM monitors ?c . ?c locatedIn ?r . }"), store);
    REQUIRE(rows.size() == 1); // cell2 has no location, so the join drops it
    CHECK(rows[0].at(Variable::named("c")) == Term::iri("cell1"));
    CHECK(rows[0].at(Variable::named("r")) == Term::iri("regionNorth"));
}

TEST_CASE("execute_query enforces repeated-variable consistency") {
    TripleStore store;
    store.insert(GraphName::kb(), t("a", "knows", "b"));
    store.insert(GraphName::kb(), t("c", "knows", "c"));
    const auto rows = execute_query(parse_query("SELECT ?x WHERE { ?x knows ?x . }"), store);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].at(Variable::named("x")) == Term::iri("c"));
}

TEST_CASE("execute_query binds every pattern variable, projected or not") {
    TripleStore store;
    store.insert(GraphName::kb(), t("agentM", "monitors", "cell1"));
    const auto rows = execute_query(parse_query("SELECT ?x WHERE { ?x monitors ?o . }"), store);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].size() == 2);
    CHECK(rows[0].count(Variable::named("o")) == 1);
}

TEST_CASE("execute_query deduplicates and sorts rows") {
    TripleStore store;
    store.insert(GraphName::kb(), t("b", "p", "x"));
    store.insert(GraphName::kb(), t("a", "p", "x"));
    store.insert(GraphName::kb(), t("c", "p", "y"));
    // ?s is the only variable; the duplicate pattern may not duplicate rows.
    const auto rows =
        execute_query(parse_query("SELECT ?s WHERE { ?s p ?o . ?s p ?o . }"), store);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].at(Variable::named("s")) == Term::iri("a"));
    CHECK(rows[1].at(Variable::named("s")) == Term::iri("b"));
    CHECK(rows[2].at(Variable::named("s")) == Term::iri("c"));
    CHECK(std::is_sorted(rows.begin(), rows.end(), row_less));
}

TEST_CASE("execute_query equals the exhaustive-substitution oracle") {
    Rng rng(777);
    const auto nodes = make_node_vocab(7);
    const auto preds = make_pred_vocab(3);
    const std::vector<Variable> pool = {Variable::named("a"), Variable::named("b"),
                                        Variable::named("c")};
    for (int iter = 0; iter < 80; ++iter) {
        TripleStore store;
        std::vector<Triple> kb = random_triples(rng, 1 + pick_index(rng, 30), nodes, preds);
        for (const Triple& tr : kb) store.insert(GraphName::kb(), tr);

        Query q;
        const std::size_t n = 1 + pick_index(rng, 2);
        for (std::size_t i = 0; i < n; ++i)
            q.patterns.push_back(random_pattern(rng, nodes, preds, pool, 0.5, 0.3));
        if (oracle_pattern_variables(q.patterns).empty())
            q.patterns[0].subject = pool[0];
        q.projected = {oracle_pattern_variables(q.patterns)[0]};

        std::vector<SolutionRow> expected = oracle_solutions(kb, q.patterns);
        std::sort(expected.begin(), expected.end(), row_less);
        CHECK(execute_query(q, store) == expected);
    }
}

TEST_CASE("pruning keeps rows whose subjects match the declared context") {
    Fixture f;
    const Query q = parse_query("SELECT ?o WHERE { cell1 associatedWithIntent ?o . }");
    const auto rows = execute_query(q, f.store);
    REQUIRE(rows.size() == 1);

    SUBCASE("matching intent keeps the row") {
        AgentContext ctx;
        ctx.intent_ids = terms({"intent7"});
        CHECK(apply_contextual_pruning(rows, ctx, f.store, q.patterns).size() == 1);
    }
    SUBCASE("mismatched intent prunes the row") {
        AgentContext ctx;
        ctx.intent_ids = terms({"intent9"});
        CHECK(apply_contextual_pruning(rows, ctx, f.store, q.patterns).empty());
    }
    SUBCASE("intent and domain ids are one pool") {
        // The association is an intent, but the id sits in domain_ids; the
        // union semantics still keep the row.
        AgentContext ctx;
        ctx.domain_ids = terms({"intent7"});
        CHECK(apply_contextual_pruning(rows, ctx, f.store, q.patterns).size() == 1);
    }
}

TEST_CASE("unassociated subjects survive any context, including an empty one") {
    Fixture f;
    const Query q = parse_query("SELECT ?r WHERE { cell3 locatedIn ?r . }");
    const auto rows = execute_query(q, f.store);
    REQUIRE(rows.size() == 1);

    CHECK(apply_contextual_pruning(rows, AgentContext{}, f.store, q.patterns).size() == 1);
    AgentContext ctx;
    ctx.intent_ids = terms({"intent9"});
    CHECK(apply_contextual_pruning(rows, ctx, f.store, q.patterns).size() == 1);
}

TEST_CASE("with an empty context only unassociated subjects survive") {
    Fixture f;
    const Query q = parse_query("SELECT ?s ?o WHERE { ?s monitors ?o . }");
    const auto rows = execute_query(q, f.store);
    REQUIRE(rows.size() == 2);
    // agentM has no association triples, so both rows survive; the subjects
    // cell1/cell2 appear only in object position and do not count.
    CHECK(apply_contextual_pruning(rows, AgentContext{}, f.store, q.patterns).size() == 2);
}

TEST_CASE("pruning inspects every pattern subject of the row") {
    Fixture f;
    // Two patterns: one subject unassociated (agentM), one associated (cell1
    // via ?c binding). The row survives only if the context covers cell1.
    const Query q =
        parse_query("SELECT ?c WHERE { agentM monitors ?c . ?c associatedWithIntent ?i . }");
    const auto rows = execute_query(q, f.store);
    REQUIRE(rows.size() == 2); // cell1/intent7 and cell2/intent9

    AgentContext ctx;
    ctx.intent_ids = terms({"intent7"});
    const auto pruned = apply_contextual_pruning(rows, ctx, f.store, q.patterns);
    REQUIRE(pruned.size() == 1);
    CHECK(pruned[0].at(Variable::named("c")) == Term::iri("cell1"));
}

TEST_CASE("pruning output is a subsequence of its input") {
    Rng rng(4321);
    const auto nodes = make_node_vocab(6);
    const auto preds = make_pred_vocab(3);
    for (int iter = 0; iter < 50; ++iter) {
        TripleStore store;
        std::vector<Triple> kb = random_triples(rng, 20, nodes, preds);
        // Sprinkle context associations.
        for (int i = 0; i < 5; ++i) {
            kb.push_back(Triple::make(pick_term(rng, nodes),
                                      chance(rng, 0.5) ? vocab::associated_with_intent()
                                                       : vocab::in_domain(),
                                      pick_term(rng, nodes)));
        }
        for (const Triple& tr : kb) store.insert(GraphName::kb(), tr);

        Query q;
        q.patterns.push_back(random_pattern(rng, nodes, preds, {Variable::named("a")}, 0.6, 0.0));
        q.projected = {};
        AgentContext ctx;
        ctx.intent_ids = random_term_subset(rng, nodes, 2);
        ctx.domain_ids = random_term_subset(rng, nodes, 2);

        const auto rows = execute_query(q, store);
        const auto pruned = apply_contextual_pruning(rows, ctx, store, q.patterns);
        CHECK(pruned.size() <= rows.size());
        // Order-preserving subsequence.
        std::size_t cursor = 0;
        for (const Binding& row : pruned) {
            while (cursor < rows.size() && !(rows[cursor] == row)) ++cursor;
            REQUIRE(cursor < rows.size());
            ++cursor;
        }
        // And equal to the direct survival-rule oracle.
        const std::set<Term> ids = ctx.all_ids();
        CHECK(pruned == oracle_prune(rows, q.patterns, ids, kb));
    }
}

TEST_CASE("enforce: authorized query is allowed with pruned rows") {
    Fixture f;
    const auto outcome = f.run(f.monitor, "SELECT ?c WHERE { agentM monitors ?c . }");
    REQUIRE(outcome.kind == EnforcementOutcome::Kind::Allowed);
    // agentM (subject) is unassociated; rows bind cell1 and cell2 as objects.
    CHECK(outcome.rows.size() == 2);
    CHECK(f.count(EventKind::Allowed) == 1);
    CHECK(f.count(EventKind::Violation) == 0);
}

TEST_CASE("enforce: sub-property predicates are allowed through the closure") {
    Fixture f;
    const auto outcome = f.run(f.monitor, "SELECT ?k WHERE { agentM observesKpi ?k . }");
    CHECK(outcome.kind == EnforcementOutcome::Kind::Allowed);
    REQUIRE(outcome.rows.size() == 1);
    CHECK(outcome.rows[0].at(Variable::named("k")) == Term::iri("kpi1"));
}

TEST_CASE("enforce: out-of-closure predicate revokes the session") {
    Fixture f;
    const auto outcome = f.run(f.monitor, "SELECT ?x WHERE { ?x actuates ?y . }");
    REQUIRE(outcome.kind == EnforcementOutcome::Kind::SessionRevoked);
    REQUIRE(outcome.violating_predicate.has_value());
    CHECK(*outcome.violating_predicate == Term::iri("actuates"));

    SUBCASE("the profile graph is retracted") {
        CHECK(f.store.graph_size(GraphName::auth_profile("agentM")) == 0);
    }
    SUBCASE("one violation and one revocation are logged, in order") {
        CHECK(f.count(EventKind::Violation) == 1);
        CHECK(f.count(EventKind::Revocation) == 1);
        AuditFilter filter;
        filter.agent_id = "agentM";
        const auto records = f.audit.query_log(filter);
        // registration, violation, revocation
        REQUIRE(records.size() == 3);
        CHECK(records[1].event == EventKind::Violation);
        REQUIRE(records[1].predicate.has_value());
        CHECK(*records[1].predicate == Term::iri("actuates"));
        CHECK(records[2].event == EventKind::Revocation);
        CHECK(records[1].sequence < records[2].sequence);
    }
    SUBCASE("every subsequent query is denied") {
        for (const char* text : {"SELECT ?c WHERE { agentM monitors ?c . }",
                                 "SELECT ?x WHERE { ?x actuates ?y . }", "garbage"}) {
            const auto after = f.run(f.monitor, text);
            CHECK(after.kind == EnforcementOutcome::Kind::AccessDenied);
        }
        // The failed retry adds no second violation.
        CHECK(f.count(EventKind::Violation) == 1);
    }
}

TEST_CASE("enforce: the first out-of-closure predicate in loop order is reported") {
    Fixture f;
    const auto outcome = f.run(
        f.monitor,
        "SELECT ?x WHERE { ?x monitors ?y . ?x locatedIn ?z . ?x actuates ?w . }");
    REQUIRE(outcome.kind == EnforcementOutcome::Kind::SessionRevoked);
    CHECK(*outcome.violating_predicate == Term::iri("locatedIn"));
    CHECK(f.count(EventKind::Violation) == 1);
}

TEST_CASE("enforce: wildcard probe is denied without touching the session") {
    Fixture f;
    const auto outcome = f.run(f.monitor, "SELECT ?p WHERE { agentM ?p cell1 . }");
    REQUIRE(outcome.kind == EnforcementOutcome::Kind::AccessDenied);
    CHECK(outcome.reason.find("crawling") != std::string::npos);

    // No sanction: session alive, profile intact, no violation/revocation.
    CHECK(f.sessions.validate(f.monitor.session_id, f.now) == SessionStatus::Active);
    CHECK(f.store.graph_size(GraphName::auth_profile("agentM")) == 1);
    CHECK(f.count(EventKind::Denial) == 1);
    CHECK(f.count(EventKind::Violation) == 0);
    CHECK(f.count(EventKind::Revocation) == 0);

    const auto again = f.run(f.monitor, "SELECT ?c WHERE { agentM monitors ?c . }");
    CHECK(again.kind == EnforcementOutcome::Kind::Allowed);
}

TEST_CASE("enforce: the wildcard guard fires before the inference check") {
    Fixture f;
    // actuates is out of closure, but the wildcard pattern comes first.
    const auto outcome =
        f.run(f.monitor, "SELECT ?p WHERE { agentM ?p cell1 . agentM actuates ?y . }");
    CHECK(outcome.kind == EnforcementOutcome::Kind::AccessDenied);
    CHECK(f.sessions.validate(f.monitor.session_id, f.now) == SessionStatus::Active);
}

TEST_CASE("enforce: admin scope may crawl, and results are still pruned") {
    Fixture f;
    const auto outcome = f.run(f.admin, "SELECT ?p ?o WHERE { agentM ?p ?o . }");
    REQUIRE(outcome.kind == EnforcementOutcome::Kind::Allowed);
    // agentM is the only ground subject and carries no association, so all
    // three facts about it come back.
    CHECK(outcome.rows.size() == 3);

    // Crawling into associated subjects respects the admin's own context.
    const auto assoc = f.run(f.admin, "SELECT ?p ?o WHERE { cell1 ?p ?o . }");
    REQUIRE(assoc.kind == EnforcementOutcome::Kind::Allowed);
    CHECK(assoc.rows.size() == 1); // intent7 is inside the admin context
}

TEST_CASE("enforce: admin wildcard still revokes on constant out-of-closure predicates") {
    Fixture f;
    // Crawling is open to admins, but a constant predicate outside the
    // granted closure is still a violation.
    const auto outcome =
        f.run(f.admin, "SELECT ?x WHERE { ?x associatedWithIntent ?y . }");
    CHECK(outcome.kind == EnforcementOutcome::Kind::SessionRevoked);
}

TEST_CASE("enforce: malformed query text is a denial, not a crash") {
    Fixture f;
    const auto outcome = f.run(f.monitor, "SELECT SELECT WHERE {{{");
    REQUIRE(outcome.kind == EnforcementOutcome::Kind::AccessDenied);
    CHECK(outcome.reason.find("parse error") != std::string::npos);
    CHECK(f.sessions.validate(f.monitor.session_id, f.now) == SessionStatus::Active);
    CHECK(f.count(EventKind::Denial) == 1);
}

TEST_CASE("enforce: expired sessions are denied with a lazy profile purge") {
    Fixture f;
    const auto outcome = enforce(f.sessions, f.monitor.session_id,
                                 "SELECT ?c WHERE { agentM monitors ?c . }", f.store, f.onto,
                                 f.audit, f.monitor.expires_at);
    REQUIRE(outcome.kind == EnforcementOutcome::Kind::AccessDenied);
    CHECK(outcome.reason == "session expired");
    CHECK(f.store.graph_size(GraphName::auth_profile("agentM")) == 0);
}

TEST_CASE("enforce: unknown token is an error, not a denial") {
    Fixture f;
    CHECK_THROWS_AS(f.run(Session{"feedfacefeedfacefeedfacefeedface", {}, SessionState::Active,
                                  f.now, f.now},
                          "SELECT ?c WHERE { agentM monitors ?c . }"),
                    UnknownTokenError);
}

TEST_CASE("enforce is deterministic, row order included") {
    Fixture f;
    const char* text = "SELECT ?c WHERE { agentM monitors ?c . }";
    const auto first = f.run(f.monitor, text);
    const auto second = f.run(f.monitor, text);
    REQUIRE(first.kind == EnforcementOutcome::Kind::Allowed);
    REQUIRE(second.kind == EnforcementOutcome::Kind::Allowed);
    CHECK(first.rows == second.rows);
}
