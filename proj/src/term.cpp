#include "kbguard/term.hpp"

#include <cctype>
#include <stdexcept>

namespace kbguard {

namespace {

bool contains_whitespace(const std::string& s) {
    for (unsigned char c : s) {
        if (std::isspace(c)) return true;
    }
    return false;
}

} // namespace

Term Term::iri(std::string text) {
    if (text.empty()) throw std::invalid_argument("IRI term must be non-empty");
    if (contains_whitespace(text))
        throw std::invalid_argument("IRI term must not contain whitespace: '" + text + "'");
    return Term{TermKind::Iri, std::move(text)};
}

Term Term::literal(std::string text) {
    if (text.empty()) throw std::invalid_argument("literal term must be non-empty");
    return Term{TermKind::Literal, std::move(text)};
}

Variable Variable::named(std::string name) {
    if (name.empty()) throw std::invalid_argument("variable name must be non-empty");
    return Variable{std::move(name)};
}

std::string to_string(const Term& t) {
    if (t.kind == TermKind::Iri) return t.text;
    std::string out = "\"";
    for (char c : t.text) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

std::string to_string(const Variable& v) {
    return "?" + v.name;
}

std::string to_string(const TermOrVar& t) {
    if (const Variable* v = as_variable(t)) return to_string(*v);
    return to_string(*as_term(t));
}

std::string to_string(const TriplePattern& p) {
    return to_string(p.subject) + " " + to_string(p.predicate) + " " + to_string(p.object);
}

namespace vocab {

const Term& can_access() {
    static const Term t = Term::iri("canAccess");
    return t;
}

const Term& associated_with_intent() {
    static const Term t = Term::iri("associatedWithIntent");
    return t;
}

const Term& in_domain() {
    static const Term t = Term::iri("inDomain");
    return t;
}

} // namespace vocab

} // namespace kbguard
