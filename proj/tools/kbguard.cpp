// kbguard command line front end.
//
// Exit codes: 0 success / query allowed, 1 denial or failed scenario step,
// 2 usage, config, or script errors.

#include "kbguard/config.hpp"
#include "kbguard/engine.hpp"
#include "kbguard/error.hpp"
#include "kbguard/http_service.hpp"
#include "kbguard/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitDenied = 1;
constexpr int kExitUsage = 2;

int run_serve(const std::string& config_path) {
    const kbguard::EngineConfig config = kbguard::load_config_file(config_path);
    kbguard::Engine engine(config);
    const auto [host, port] = kbguard::split_listen_address(config.listen_address);
    kbguard::HttpService service(engine);
    std::cout << "kbguard listening on " << host << ":" << port << std::endl;
    if (!service.listen(host, port)) {
        std::cerr << "error: cannot bind " << config.listen_address << std::endl;
        return kExitUsage;
    }
    return kExitSuccess;
}

int run_check(const std::string& config_path) {
    const kbguard::EngineConfig config = kbguard::load_config_file(config_path);
    kbguard::Engine engine(config);
    std::cout << "kb triples:          " << engine.store().graph_size(kbguard::GraphName::kb())
              << "\n"
              << "ontology edges:      " << engine.ontology().sub_property_edges.size() << "\n"
              << "admin scopes:        " << engine.ontology().admin_scopes.size() << "\n"
              << "roles:               " << engine.role_policies().size() << "\n"
              << "session ttl seconds: " << config.session_ttl.count() << "\n"
              << "config ok" << std::endl;
    return kExitSuccess;
}

int run_scenario_cmd(const std::string& config_path, const std::string& script_path) {
    const kbguard::EngineConfig config = kbguard::load_config_file(config_path);
    const kbguard::ScenarioScript script = kbguard::load_scenario_file(script_path);
    const kbguard::ScenarioResult result = kbguard::run_scenario(script, config);
    std::cout << result.report;
    return result.passed ? kExitSuccess : kExitDenied;
}

int run_query(const std::string& config_path, const std::string& agent_path,
              const std::string& query_text) {
    const kbguard::EngineConfig config = kbguard::load_config_file(config_path);
    kbguard::Engine engine(config);
    const kbguard::AgentDescriptor descriptor = kbguard::load_agent_descriptor(agent_path);

    kbguard::Session session;
    try {
        session = engine.register_agent(descriptor);
    } catch (const kbguard::Error& e) {
        std::cout << "outcome: registration refused (" << e.what() << ")" << std::endl;
        return kExitDenied;
    }

    const kbguard::EnforcementOutcome outcome = engine.query(session.session_id, query_text);
    std::cout << "outcome: " << kbguard::to_string(outcome.kind);
    if (!outcome.reason.empty()) std::cout << " (" << outcome.reason << ")";
    std::cout << "\n";
    if (outcome.kind == kbguard::EnforcementOutcome::Kind::Allowed) {
        for (const auto& row : outcome.rows) {
            bool first = true;
            for (const auto& [var, term] : row) {
                if (!first) std::cout << "  ";
                first = false;
                std::cout << "?" << var.name << "=" << kbguard::to_string(term);
            }
            std::cout << "\n";
        }
        std::cout << outcome.rows.size() << " row(s)" << std::endl;
        return kExitSuccess;
    }
    return kExitDenied;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"kbguard: zero-trust authorization engine for knowledge graph queries"};
    app.require_subcommand(1);

    std::string config_path;
    std::string script_path;
    std::string agent_path;
    std::string query_text;

    CLI::App* serve = app.add_subcommand("serve", "run the HTTP service");
    serve->add_option("--config", config_path, "engine config file")->required();

    CLI::App* check = app.add_subcommand("check", "load the config and print corpus stats");
    check->add_option("--config", config_path, "engine config file")->required();

    CLI::App* scenario = app.add_subcommand("scenario", "replay a scenario script");
    scenario->add_option("--config", config_path, "engine config file")->required();
    scenario->add_option("script", script_path, "scenario script file")->required();

    CLI::App* query = app.add_subcommand("query", "register an agent and run one query");
    query->add_option("--config", config_path, "engine config file")->required();
    query->add_option("--agent", agent_path, "agent descriptor file")->required();
    query->add_option("query", query_text, "query text")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitSuccess : kExitUsage;
    }

    try {
        if (serve->parsed()) return run_serve(config_path);
        if (check->parsed()) return run_check(config_path);
        if (scenario->parsed()) return run_scenario_cmd(config_path, script_path);
        if (query->parsed()) return run_query(config_path, agent_path, query_text);
    } catch (const kbguard::Error& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kExitUsage;
    }
    return kExitUsage;
}
