#pragma once

#include <stdexcept>
#include <string>

namespace kbguard {

/// Base class for all engine errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Query text rejected by the parser. Positions are 1-based.
class ParseError : public Error {
public:
    ParseError(const std::string& message, int line, int column)
        : Error(message + " (line " + std::to_string(line) + ", column " +
                std::to_string(column) + ")"),
          line_(line),
          column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

/// A data file (KB, ontology, role policy, descriptor, scenario) failed to load.
class LoadError : public Error {
public:
    LoadError(const std::string& file, int line, const std::string& message)
        : Error(file + ":" + std::to_string(line) + ": " + message) {}
    explicit LoadError(const std::string& message) : Error(message) {}
};

/// The sub-property relation contains a cycle.
class CycleError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class ScriptError : public Error {
public:
    using Error::Error;
};

// Registration and session errors surfaced through the service API.
class DuplicateAgentError : public Error {
public:
    using Error::Error;
};

class UnknownRoleError : public Error {
public:
    using Error::Error;
};

class EmptyGrantError : public Error {
public:
    using Error::Error;
};

class UnknownTokenError : public Error {
public:
    using Error::Error;
};

} // namespace kbguard
