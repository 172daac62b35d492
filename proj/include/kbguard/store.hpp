#pragma once

#include "kbguard/term.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <shared_mutex>
#include <string>
#include <vector>

namespace kbguard {

/// Whether a fact is deployment-time (static) or runtime (dynamic) knowledge.
enum class KnowledgeClass { Static, Dynamic };

/// One stored fact. Subject and predicate are always constant IRIs.
struct Triple {
    Term subject;
    Term predicate;
    Term object;
    KnowledgeClass knowledge_class = KnowledgeClass::Static;

    /// Validates the IRI-position invariants.
    static Triple make(Term subject, Term predicate, Term object,
                       KnowledgeClass kc = KnowledgeClass::Static);

    friend auto operator<=>(const Triple&, const Triple&) = default;
};

/// Names one partition of the store: the knowledge base, the security
/// ontology, or one agent's authorization profile.
struct GraphName {
    enum class Kind { Kb, Ontology, AuthProfile };

    Kind kind = Kind::Kb;
    std::string agent_id; // empty unless kind == AuthProfile

    static GraphName kb() { return {Kind::Kb, {}}; }
    static GraphName ontology() { return {Kind::Ontology, {}}; }
    static GraphName auth_profile(std::string agent_id) {
        return {Kind::AuthProfile, std::move(agent_id)};
    }

    friend auto operator<=>(const GraphName&, const GraphName&) = default;
};

/// In-memory triple store partitioned into named graphs.
///
/// Graphs are sets keyed on (subject, predicate, object): re-inserting an
/// existing fact is a no-op and the original knowledge_class is kept.
/// Thread safety: any number of concurrent readers or one writer; a graph
/// retraction is atomic, so a concurrent match sees the full graph or none
/// of it, never a partial state.
class TripleStore {
public:
    /// Idempotent; the graph is created on first insert.
    void insert(const GraphName& graph, const Triple& t);

    /// Removes every triple in `graph` and returns how many were removed.
    /// Retracting an absent graph returns 0.
    std::size_t retract_graph(const GraphName& graph);

    /// Returns the triples in `graph` unifying with `pattern`, position-wise:
    /// a variable matches any term, a constant matches an equal term. A
    /// variable repeated across positions matches each position independently;
    /// cross-position consistency is the query engine's concern.
    /// Results are in deterministic (sorted) order.
    std::vector<Triple> match(const GraphName& graph, const TriplePattern& pattern) const;

    std::size_t graph_size(const GraphName& graph) const;

private:
    struct TripleKey {
        Term subject;
        Term predicate;
        Term object;
        friend auto operator<=>(const TripleKey&, const TripleKey&) = default;
    };
    using Graph = std::map<TripleKey, KnowledgeClass>;

    mutable std::shared_mutex mutex_;
    std::map<GraphName, Graph> graphs_;
};

/// True iff `t` unifies with `pattern` position-wise.
bool matches(const Triple& t, const TriplePattern& pattern);

/// Loads the line-oriented KB format into the KB graph:
///   <subject> <predicate> <object> [static|dynamic]
/// IRIs are bare tokens, object literals are double-quoted, `#` starts a
/// comment, and the class defaults to static. Returns the number of distinct
/// triples loaded. Throws LoadError on malformed lines.
std::size_t load_kb_file(TripleStore& store, const std::filesystem::path& path);

std::string to_string(const GraphName& g);
std::string to_string(KnowledgeClass kc);

} // namespace kbguard
