#include "kbguard/query.hpp"

#include "kbguard/error.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace kbguard {

namespace {

struct Token {
    enum class Kind { LBrace, RBrace, Dot, Var, Iri, Literal, End };
    Kind kind;
    std::string text;
    int line;
    int column;
};

bool is_word_char(unsigned char c) {
    return std::isalnum(c) || c == '_';
}

bool ci_equals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    }
    return true;
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> tokens;
        while (true) {
            Token t = next();
            bool end = t.kind == Token::Kind::End;
            tokens.push_back(std::move(t));
            if (end) break;
        }
        return tokens;
    }

private:
    Token next() {
        if (pending_dot_) {
            pending_dot_ = false;
            return {Token::Kind::Dot, ".", pending_dot_line_, pending_dot_column_};
        }
        skip_whitespace();
        int line = line_, column = column_;
        if (pos_ >= src_.size()) return {Token::Kind::End, "", line, column};

        unsigned char c = src_[pos_];
        if (c == '{') {
            advance();
            return {Token::Kind::LBrace, "{", line, column};
        }
        if (c == '}') {
            advance();
            return {Token::Kind::RBrace, "}", line, column};
        }
        if (c == '"') return lex_literal(line, column);
        if (c == '?') return lex_variable(line, column);
        return lex_bare(line, column);
    }

    Token lex_literal(int line, int column) {
        advance(); // opening quote
        std::string text;
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '\n')
                throw ParseError("newline inside literal", line_, column_);
            if (c == '\\' && pos_ + 1 < src_.size() &&
                (src_[pos_ + 1] == '"' || src_[pos_ + 1] == '\\')) {
                text += src_[pos_ + 1];
                advance();
                advance();
                continue;
            }
            if (c == '"') {
                advance();
                if (text.empty()) throw ParseError("empty literal", line, column);
                return {Token::Kind::Literal, std::move(text), line, column};
            }
            text += c;
            advance();
        }
        throw ParseError("unterminated literal", line, column);
    }

    Token lex_variable(int line, int column) {
        advance(); // sigil
        std::string name;
        while (pos_ < src_.size() && is_word_char(src_[pos_])) {
            name += src_[pos_];
            advance();
        }
        if (name.empty()) throw ParseError("empty variable name after '?'", line, column);
        return {Token::Kind::Var, std::move(name), line, column};
    }

    Token lex_bare(int line, int column) {
        std::string text;
        while (pos_ < src_.size()) {
            unsigned char c = src_[pos_];
            if (std::isspace(c) || c == '{' || c == '}' || c == '"' || c == '?') break;
            text += static_cast<char>(c);
            advance();
        }
        if (text == ".") return {Token::Kind::Dot, ".", line, column};
        // A glued terminator ("cell1.") splits into the IRI and the dot.
        if (text.size() > 1 && text.back() == '.') {
            text.pop_back();
            pending_dot_ = true;
            pending_dot_line_ = line;
            pending_dot_column_ = column + static_cast<int>(text.size());
        }
        return {Token::Kind::Iri, std::move(text), line, column};
    }

    void skip_whitespace() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
            advance();
    }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
    bool pending_dot_ = false;
    int pending_dot_line_ = 1;
    int pending_dot_column_ = 1;
};

class TokenStream {
public:
    explicit TokenStream(std::string_view src) : tokens_(Lexer(src).run()) {}

    const Token& peek() const { return tokens_[index_]; }
    Token take() { return tokens_[std::min(index_++, tokens_.size() - 1)]; }

private:
    std::vector<Token> tokens_;
    std::size_t index_ = 0;
};

[[noreturn]] void fail(const Token& t, const std::string& expected) {
    std::string got = t.kind == Token::Kind::End ? "end of input" : "'" + t.text + "'";
    throw ParseError("expected " + expected + ", got " + got, t.line, t.column);
}

TermOrVar position_from(const Token& t) {
    switch (t.kind) {
        case Token::Kind::Var: return Variable::named(t.text);
        case Token::Kind::Iri: return Term::iri(t.text);
        case Token::Kind::Literal: return Term::literal(t.text);
        default: fail(t, "a term or variable");
    }
}

} // namespace

Query parse_query(std::string_view text) {
    TokenStream ts(text);

    Token kw = ts.take();
    if (kw.kind != Token::Kind::Iri || !ci_equals(kw.text, "SELECT"))
        fail(kw, "'SELECT'");

    Query q;
    std::vector<Token> projected_tokens;
    while (ts.peek().kind == Token::Kind::Var) {
        Token v = ts.take();
        q.projected.push_back(Variable::named(v.text));
        projected_tokens.push_back(std::move(v));
    }
    if (q.projected.empty()) fail(ts.peek(), "at least one projected variable");

    Token where = ts.take();
    if (where.kind != Token::Kind::Iri || !ci_equals(where.text, "WHERE"))
        fail(where, "'WHERE'");
    Token open = ts.take();
    if (open.kind != Token::Kind::LBrace) fail(open, "'{'");

    while (ts.peek().kind != Token::Kind::RBrace) {
        TriplePattern p;
        p.subject = position_from(ts.take());
        p.predicate = position_from(ts.take());
        p.object = position_from(ts.take());
        Token dot = ts.take();
        if (dot.kind != Token::Kind::Dot) fail(dot, "'.' terminating the pattern");
        q.patterns.push_back(std::move(p));
    }
    if (q.patterns.empty()) fail(ts.peek(), "at least one triple pattern");
    ts.take(); // '}'

    Token end = ts.take();
    if (end.kind != Token::Kind::End) fail(end, "end of input");

    std::set<Variable> bound;
    for (const TriplePattern& p : q.patterns) {
        for (const TermOrVar* pos : {&p.subject, &p.predicate, &p.object}) {
            if (const Variable* v = as_variable(*pos)) bound.insert(*v);
        }
    }
    for (std::size_t i = 0; i < q.projected.size(); ++i) {
        if (!bound.count(q.projected[i])) {
            const Token& t = projected_tokens[i];
            throw ParseError("projected variable ?" + t.text + " is bound in no pattern",
                             t.line, t.column);
        }
    }
    return q;
}

std::vector<TriplePattern> extract_triple_patterns(const Query& q) {
    return q.patterns;
}

std::vector<std::pair<std::size_t, TermOrVar>>
requested_predicates(const std::vector<TriplePattern>& p_req) {
    std::vector<std::pair<std::size_t, TermOrVar>> out;
    out.reserve(p_req.size());
    for (std::size_t i = 0; i < p_req.size(); ++i) out.emplace_back(i, p_req[i].predicate);
    return out;
}

std::string to_string(const Query& q) {
    std::string out = "SELECT";
    for (const Variable& v : q.projected) out += " " + to_string(v);
    out += " WHERE {";
    for (const TriplePattern& p : q.patterns) out += " " + to_string(p) + " .";
    out += " }";
    return out;
}

} // namespace kbguard
