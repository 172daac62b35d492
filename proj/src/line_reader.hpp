#pragma once

// Shared helper for the line-oriented text formats (KB, ontology, role
// policy, agent descriptors, scenarios). Splits a line into whitespace
// separated fields, honouring double-quoted literals (with backslash
// escapes for quote and backslash) and `#` comments outside quotes.

#include "kbguard/error.hpp"

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace kbguard::detail {

struct Field {
    std::string text;
    bool quoted = false;
};

inline std::vector<Field> split_fields(std::string_view line, const std::string& file,
                                       int line_no) {
    std::vector<Field> fields;
    std::size_t i = 0;
    while (i < line.size()) {
        unsigned char c = line[i];
        if (std::isspace(c)) {
            ++i;
            continue;
        }
        if (c == '#') break;
        if (c == '"') {
            std::string text;
            ++i;
            bool closed = false;
            while (i < line.size()) {
                char q = line[i];
                if (q == '\\' && i + 1 < line.size() &&
                    (line[i + 1] == '"' || line[i + 1] == '\\')) {
                    text += line[i + 1];
                    i += 2;
                    continue;
                }
                if (q == '"') {
                    closed = true;
                    ++i;
                    break;
                }
                text += q;
                ++i;
            }
            if (!closed) throw LoadError(file, line_no, "unterminated quoted literal");
            fields.push_back({std::move(text), true});
            continue;
        }
        std::string text;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) &&
               line[i] != '#' && line[i] != '"') {
            text += line[i];
            ++i;
        }
        fields.push_back({std::move(text), false});
    }
    return fields;
}

} // namespace kbguard::detail
