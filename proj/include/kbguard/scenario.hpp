#pragma once

#include "kbguard/audit.hpp"
#include "kbguard/config.hpp"
#include "kbguard/enforcement.hpp"
#include "kbguard/session.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace kbguard {

class Engine;

/// One line of a scenario script. Scripts drive a fresh engine through a
/// register/query/revoke sequence and assert on the audit trail.
struct ScenarioStep {
    enum class Kind { Register, Query, Revoke, AssertAudit };

    Kind kind;
    int line = 0;

    AgentDescriptor descriptor; // Register: parsed eagerly at script load

    std::string agent_id;              // Query, Revoke
    EnforcementOutcome::Kind expected; // Query
    std::string query_text;            // Query

    EventKind event = EventKind::Violation; // AssertAudit
    std::size_t expected_count = 0;         // AssertAudit
};

struct ScenarioScript {
    std::vector<ScenarioStep> steps;
};

/// Parses a scenario script. Directives: `register <descriptor-path>`,
/// `query <agent> allowed|denied|revoked <query text>`, `revoke <agent>`,
/// `assert-audit <event> <count>`. Descriptor paths resolve against the
/// script's directory and are loaded immediately. Agents must be registered
/// by an earlier step before they are queried or revoked. Throws ScriptError.
ScenarioScript load_scenario_file(const std::filesystem::path& path);

struct ScenarioResult {
    bool passed = true;
    std::string report; // human-readable step-by-step summary
};

/// Replays the script against `engine`. Stops at the first mismatched
/// expectation; the report names the failing step and both outcomes.
ScenarioResult run_scenario(const ScenarioScript& script, Engine& engine);

/// Convenience wrapper: builds a fresh engine from `config`, then replays.
ScenarioResult run_scenario(const ScenarioScript& script, const EngineConfig& config);

} // namespace kbguard
