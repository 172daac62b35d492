#pragma once

#include "kbguard/term.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kbguard {

/// A parsed agent query: a projection list plus a conjunction of triple
/// patterns. Every projected variable appears in at least one pattern.
struct Query {
    std::vector<Variable> projected;
    std::vector<TriplePattern> patterns;

    friend bool operator==(const Query&, const Query&) = default;
};

/// Parses the agent query grammar:
///
///   SELECT ?v1 ?v2 ... WHERE { s p o . s p o . ... }
///
/// Keywords are case-insensitive, each pattern position is a variable
/// (`?name`), a bare IRI token, or a double-quoted literal, and `.`
/// terminates every pattern. Variable predicates parse successfully; they
/// are rejected later, at enforcement.
///
/// Throws ParseError (with 1-based line/column) on malformed input, including
/// a projected variable that is bound in no pattern.
Query parse_query(std::string_view text);

/// The query's constituent triple patterns, in source order, duplicates kept.
std::vector<TriplePattern> extract_triple_patterns(const Query& q);

/// Each pattern's predicate position paired with its pattern index, in order.
std::vector<std::pair<std::size_t, TermOrVar>>
requested_predicates(const std::vector<TriplePattern>& p_req);

/// Renders a query in the grammar above; parse_query(to_string(q)) == q.
std::string to_string(const Query& q);

} // namespace kbguard
