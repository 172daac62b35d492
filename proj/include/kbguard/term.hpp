#pragma once

#include <compare>
#include <string>
#include <variant>

namespace kbguard {

enum class TermKind { Iri, Literal };

/// A constant graph term: a bare IRI token or a quoted literal.
///
/// Equality and ordering are over (kind, text); an IRI and a literal with the
/// same text are distinct terms.
struct Term {
    TermKind kind = TermKind::Iri;
    std::string text;

    static Term iri(std::string text);
    static Term literal(std::string text);

    bool is_iri() const { return kind == TermKind::Iri; }

    friend auto operator<=>(const Term&, const Term&) = default;
};

/// A query variable. `name` excludes the `?` sigil and is never empty.
struct Variable {
    std::string name;

    static Variable named(std::string name);

    friend auto operator<=>(const Variable&, const Variable&) = default;
};

/// One position of a triple pattern: either a constant term or a variable.
using TermOrVar = std::variant<Term, Variable>;

inline bool is_variable(const TermOrVar& t) {
    return std::holds_alternative<Variable>(t);
}

inline const Term* as_term(const TermOrVar& t) {
    return std::get_if<Term>(&t);
}

inline const Variable* as_variable(const TermOrVar& t) {
    return std::get_if<Variable>(&t);
}

/// A triple template where any of the three positions may be a variable.
/// Equality is position-wise.
struct TriplePattern {
    TermOrVar subject;
    TermOrVar predicate;
    TermOrVar object;

    friend auto operator<=>(const TriplePattern&, const TriplePattern&) = default;
};

/// Renders a term the way the KB format and query grammar spell it:
/// bare token for IRIs, double-quoted (with \" and \\ escapes) for literals.
std::string to_string(const Term& t);
std::string to_string(const Variable& v);
std::string to_string(const TermOrVar& t);
std::string to_string(const TriplePattern& p);

/// Reserved predicate IRIs the engine itself interprets.
namespace vocab {
const Term& can_access();            // grants stored in AuthProfile graphs
const Term& associated_with_intent(); // context association, intent side
const Term& in_domain();              // context association, domain side
} // namespace vocab

} // namespace kbguard
