#include "kbguard/scenario.hpp"

#include "kbguard/engine.hpp"
#include "kbguard/error.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace kbguard {

namespace {

// Whitespace tokenizer that can also hand back the untouched rest of the
// line, which query steps need because query text contains spaces.
class LineScanner {
public:
    explicit LineScanner(const std::string& line) : line_(line) {}

    std::optional<std::string> next_token() {
        skip_spaces();
        if (pos_ >= line_.size()) return std::nullopt;
        const std::size_t start = pos_;
        while (pos_ < line_.size() && !std::isspace(static_cast<unsigned char>(line_[pos_])))
            ++pos_;
        return line_.substr(start, pos_ - start);
    }

    std::string remainder() {
        skip_spaces();
        std::size_t end = line_.size();
        while (end > pos_ && std::isspace(static_cast<unsigned char>(line_[end - 1]))) --end;
        return line_.substr(pos_, end - pos_);
    }

private:
    void skip_spaces() {
        while (pos_ < line_.size() && std::isspace(static_cast<unsigned char>(line_[pos_])))
            ++pos_;
    }

    const std::string& line_;
    std::size_t pos_ = 0;
};

[[noreturn]] void fail(const std::filesystem::path& path, int line, const std::string& message) {
    throw ScriptError(path.string() + ":" + std::to_string(line) + ": " + message);
}

EnforcementOutcome::Kind parse_expectation(const std::string& word,
                                           const std::filesystem::path& path, int line) {
    if (word == "allowed") return EnforcementOutcome::Kind::Allowed;
    if (word == "denied") return EnforcementOutcome::Kind::AccessDenied;
    if (word == "revoked") return EnforcementOutcome::Kind::SessionRevoked;
    fail(path, line, "expectation must be allowed, denied, or revoked, got \"" + word + "\"");
}

} // namespace

ScenarioScript load_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScriptError("cannot open scenario file: " + path.string());
    const std::filesystem::path base = path.has_parent_path() ? path.parent_path() : ".";

    ScenarioScript script;
    std::set<std::string> registered;

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        LineScanner scan(line);
        const auto directive = scan.next_token();
        if (!directive || (*directive)[0] == '#') continue;

        ScenarioStep step;
        step.line = line_no;

        if (*directive == "register") {
            const auto file = scan.next_token();
            if (!file) fail(path, line_no, "register needs a descriptor path");
            if (scan.next_token()) fail(path, line_no, "register takes exactly one argument");
            std::filesystem::path descriptor_path(*file);
            if (!descriptor_path.is_absolute()) descriptor_path = base / descriptor_path;
            step.kind = ScenarioStep::Kind::Register;
            try {
                step.descriptor = load_agent_descriptor(descriptor_path);
            } catch (const Error& e) {
                fail(path, line_no, std::string("bad descriptor: ") + e.what());
            }
            registered.insert(step.descriptor.agent_id);
        } else if (*directive == "query") {
            const auto agent = scan.next_token();
            const auto expect = scan.next_token();
            if (!agent || !expect) fail(path, line_no, "query needs <agent> <expectation> <query>");
            step.kind = ScenarioStep::Kind::Query;
            step.agent_id = *agent;
            step.expected = parse_expectation(*expect, path, line_no);
            step.query_text = scan.remainder();
            if (step.query_text.empty()) fail(path, line_no, "query text is empty");
            if (!registered.count(step.agent_id))
                fail(path, line_no, "agent \"" + step.agent_id + "\" is not registered yet");
        } else if (*directive == "revoke") {
            const auto agent = scan.next_token();
            if (!agent) fail(path, line_no, "revoke needs an agent id");
            if (scan.next_token()) fail(path, line_no, "revoke takes exactly one argument");
            step.kind = ScenarioStep::Kind::Revoke;
            step.agent_id = *agent;
            if (!registered.count(step.agent_id))
                fail(path, line_no, "agent \"" + step.agent_id + "\" is not registered yet");
        } else if (*directive == "assert-audit") {
            const auto event = scan.next_token();
            const auto count = scan.next_token();
            if (!event || !count) fail(path, line_no, "assert-audit needs <event> <count>");
            if (scan.next_token()) fail(path, line_no, "assert-audit takes exactly two arguments");
            step.kind = ScenarioStep::Kind::AssertAudit;
            const auto kind = event_kind_from_string(*event);
            if (!kind) fail(path, line_no, "unknown audit event \"" + *event + "\"");
            step.event = *kind;
            try {
                std::size_t pos = 0;
                step.expected_count = std::stoull(*count, &pos);
                if (pos != count->size()) throw std::invalid_argument(*count);
            } catch (const std::exception&) {
                fail(path, line_no, "assert-audit count must be a number, got \"" + *count + "\"");
            }
        } else {
            fail(path, line_no, "unknown directive \"" + *directive + "\"");
        }

        script.steps.push_back(std::move(step));
    }
    return script;
}

ScenarioResult run_scenario(const ScenarioScript& script, Engine& engine) {
    ScenarioResult result;
    std::ostringstream report;
    std::map<std::string, std::string> tokens; // agent id -> session id

    std::size_t index = 0;
    for (const ScenarioStep& step : script.steps) {
        ++index;
        const std::string label = "step " + std::to_string(index) + " (line " +
                                  std::to_string(step.line) + ")";
        switch (step.kind) {
        case ScenarioStep::Kind::Register: {
            try {
                const Session session = engine.register_agent(step.descriptor);
                tokens[step.descriptor.agent_id] = session.session_id;
                report << label << ": registered " << step.descriptor.agent_id << "\n";
            } catch (const Error& e) {
                result.passed = false;
                report << label << ": FAILED: registration of " << step.descriptor.agent_id
                       << " threw: " << e.what() << "\n";
                result.report = report.str();
                return result;
            }
            break;
        }
        case ScenarioStep::Kind::Query: {
            const EnforcementOutcome outcome =
                engine.query(tokens.at(step.agent_id), step.query_text);
            if (outcome.kind != step.expected) {
                result.passed = false;
                report << label << ": FAILED: expected " << to_string(step.expected) << ", got "
                       << to_string(outcome.kind);
                if (!outcome.reason.empty()) report << " (" << outcome.reason << ")";
                report << "\n";
                result.report = report.str();
                return result;
            }
            report << label << ": " << step.agent_id << " -> " << to_string(outcome.kind) << "\n";
            break;
        }
        case ScenarioStep::Kind::Revoke: {
            const std::size_t removed = engine.revoke(tokens.at(step.agent_id));
            report << label << ": revoked " << step.agent_id << " (" << removed
                   << " profile triple(s) retracted)\n";
            break;
        }
        case ScenarioStep::Kind::AssertAudit: {
            AuditFilter filter;
            filter.event = step.event;
            const std::size_t actual = engine.audit_query(filter).size();
            if (actual != step.expected_count) {
                result.passed = false;
                report << label << ": FAILED: expected " << step.expected_count << " "
                       << to_string(step.event) << " record(s), found " << actual << "\n";
                result.report = report.str();
                return result;
            }
            report << label << ": audit has " << actual << " " << to_string(step.event)
                   << " record(s)\n";
            break;
        }
        }
    }

    report << "scenario passed (" << script.steps.size() << " step(s))\n";
    result.report = report.str();
    return result;
}

ScenarioResult run_scenario(const ScenarioScript& script, const EngineConfig& config) {
    Engine engine(config);
    return run_scenario(script, engine);
}

} // namespace kbguard
