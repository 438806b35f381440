// SPDX-License-Identifier: Apache-2.0
#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mcpsolver/agent/agent.hpp"
#include "mcpsolver/mcp/session.hpp"

namespace mcpsolver::cli {

namespace {

struct ServerFlags {
    std::string mode;
    double max_timeout = 30.0;
    std::string mzn_exe;
    std::string smt_exe;
    std::string mzn_solver = "gecode";
};

void add_server_flags(CLI::App& cmd, ServerFlags& f) {
    cmd.add_option("--mode", f.mode, "Solver mode: minizinc | sat | smt (legacy aliases: pysat = sat, z3 = smt)")
        ->required()
        ->multi_option_policy(CLI::MultiOptionPolicy::Throw);
    cmd.add_option("--max-timeout", f.max_timeout, "Upper bound for solve_model timeouts in seconds")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd.add_option("--mzn-exe", f.mzn_exe, "MiniZinc executable (default: $MCP_SOLVER_MZN, then PATH)");
    cmd.add_option("--smt-exe", f.smt_exe, "SMT solver executable (default: $MCP_SOLVER_SMT, then z3 on PATH)");
    cmd.add_option("--mzn-solver", f.mzn_solver, "MiniZinc solver tag")->capture_default_str();
}

BackendOptions backend_options(const ServerFlags& f) {
    BackendOptions o;
    if (!f.mzn_exe.empty()) o.paths.minizinc = f.mzn_exe;
    if (!f.smt_exe.empty()) o.paths.smt = f.smt_exe;
    o.mzn_solver_tag = f.mzn_solver;
    return o;
}

std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string stats_line(const agent::UsageStats& s) {
    return "C=" + std::to_string(s.clear_count) + " A=" + std::to_string(s.add_count) +
           " R=" + std::to_string(s.replace_count) + " D=" + std::to_string(s.delete_count) +
           " G=" + std::to_string(s.get_count) + " S=" + std::to_string(s.solve_count) +
           " tokens_in=" + std::to_string(s.tokens_in) + " tokens_out=" + std::to_string(s.tokens_out);
}

Json report_json(const agent::RunReport& r) {
    Json j = Json::object();
    j["solution"] = r.last.solution ? to_json(*r.last.solution) : Json(nullptr);
    j["verdict"] = to_json(r.verdict);
    j["stats"] = to_json(r.stats);
    j["steps"] = r.last.transcript.steps.size();
    j["attempts"] = r.attempts;
    j["model"] = r.last.transcript.final_model_text;
    j["aborted"] = r.last.aborted ? Json(*r.last.aborted) : Json(nullptr);
    return j;
}

void print_human(const agent::RunReport& r, std::ostream& out) {
    const auto& t = r.last.transcript;
    out << "Attempts: " << r.attempts << "\n";
    out << "Steps: " << t.steps.size() << " (tool calls: " << r.last.stats.tool_calls() << ")\n";
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        const auto& step = t.steps[i];
        out << "  [" << (i + 1) << "]";
        if (!step.assistant_text.empty()) out << " " << step.assistant_text.substr(0, 100);
        for (std::size_t k = 0; k < step.tool_calls.size(); ++k)
            out << "\n      " << step.tool_calls[k].name << (step.tool_outcomes[k].is_error ? " -> error" : " -> ok");
        out << "\n";
    }
    if (r.last.aborted) out << "Agent aborted: " << *r.last.aborted << "\n";
    out << "Model:\n" << t.final_model_text << "\n";
    if (r.last.solution) {
        const auto& s = *r.last.solution;
        out << "Solution: " << to_json(s).dump() << "\n";
        out << "Status: " << to_string(s.status) << "\n";
        if (s.objective) out << "Objective: " << to_json(s)["objective"].dump() << "\n";
    } else {
        out << "Solution: none\n";
    }
    out << "Verdict: " << to_string(r.verdict.verdict) << " - " << r.verdict.explanation << "\n";
    out << "Stats: " << stats_line(r.stats) << "\n";
}

int serve(const ServerFlags& f, BackendMode mode, std::istream& in, std::ostream& out, std::ostream& err) {
    mcp::SessionConfig cfg;
    cfg.max_timeout_s = f.max_timeout;
    cfg.default_timeout_s = std::min(cfg.default_timeout_s, f.max_timeout);
    mcp::Session session(make_backend(mode, backend_options(f)), cfg);
    err << "mcp-solver: serving " << to_string(mode) << " mode on stdio\n";
    return mcp::run_stdio(session, in, out);
}

}  // namespace

int run(const std::vector<std::string>& args, const std::string& self_exe, std::istream& in, std::ostream& out,
        std::ostream& err) {
    CLI::App app{"MCP server for constraint solving, plus a one-shot agent client", "mcp-solver"};
    app.require_subcommand(1);

    ServerFlags serve_flags;
    auto* serve_cmd = app.add_subcommand("serve", "Run the MCP server on stdio with one solver mode");
    add_server_flags(*serve_cmd, serve_flags);

    ServerFlags client_flags;
    std::string problem_path;
    std::string script_path;
    bool live = false;
    int step_limit = agent::kDefaultStepLimit;
    int retries = 0;
    bool json_out = false;
    bool in_process = false;
    auto* client_cmd = app.add_subcommand("client", "Solve a problem with the agent and reviewer");
    add_server_flags(*client_cmd, client_flags);
    client_cmd->add_option("--problem", problem_path, "Problem description file")->required();
    auto* script_opt = client_cmd->add_option("--script", script_path, "Scripted connector transcript (JSON)");
    auto* live_opt = client_cmd->add_flag("--live", live, "Use the live LLM named by MCP_CLIENT_LLM_*");
    script_opt->excludes(live_opt);
    client_cmd->add_option("--step-limit", step_limit, "Maximum agent steps")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    client_cmd->add_option("--retries", retries, "Re-runs after an incorrect verdict")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    client_cmd->add_flag("--json", json_out, "Print one JSON document instead of the human summary");
    client_cmd->add_flag("--in-process", in_process, "Run the server in this process instead of spawning it");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    const ServerFlags& flags = serve_cmd->parsed() ? serve_flags : client_flags;
    auto mode = parse_mode(flags.mode);
    if (!mode) {
        err << "error: unknown mode '" << flags.mode << "' (expected minizinc, sat or smt)\n";
        return 2;
    }

    if (serve_cmd->parsed()) {
        try {
            return serve(flags, *mode, in, out, err);
        } catch (const std::exception& e) {
            err << "error: " << e.what() << "\n";
            return 2;
        }
    }

    if (script_path.empty() && !live) {
        err << "error: client needs --script <file> or --live\n";
        return 2;
    }
    try {
        std::string problem = read_text(problem_path);
        std::unique_ptr<agent::LlmConnector> connector;
        if (live) {
            connector = std::make_unique<agent::LiveConnector>(agent::LiveConfig::from_environment());
        } else {
            Json script = Json::parse(read_text(script_path), nullptr, false);
            if (script.is_discarded()) throw std::runtime_error(script_path + " is not valid JSON");
            connector = std::make_unique<agent::ScriptedConnector>(agent::ScriptedConnector::from_json(script));
        }

        std::unique_ptr<mcp::Session> session;
        std::unique_ptr<agent::McpClient> server;
        if (in_process) {
            mcp::SessionConfig cfg;
            cfg.max_timeout_s = flags.max_timeout;
            cfg.default_timeout_s = std::min(cfg.default_timeout_s, flags.max_timeout);
            session = std::make_unique<mcp::Session>(make_backend(*mode, backend_options(flags)), cfg);
            server = std::make_unique<agent::InProcessClient>(*session);
        } else {
            std::vector<std::string> argv = {self_exe,        "serve", "--mode", std::string(to_string(*mode)),
                                             "--max-timeout", std::to_string(flags.max_timeout),
                                             "--mzn-solver",  flags.mzn_solver};
            if (!flags.mzn_exe.empty()) argv.insert(argv.end(), {"--mzn-exe", flags.mzn_exe});
            if (!flags.smt_exe.empty()) argv.insert(argv.end(), {"--smt-exe", flags.smt_exe});
            server = std::make_unique<agent::SpawnedClient>(argv);
        }
        server->initialize();
        auto report = agent::run_with_review(problem, *connector, *server, step_limit, retries);
        server->shutdown();

        if (json_out)
            out << report_json(report).dump(2) << "\n";
        else
            print_human(report, out);
        return report.verdict.verdict == agent::Verdict::incorrect ? 1 : 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace mcpsolver::cli
