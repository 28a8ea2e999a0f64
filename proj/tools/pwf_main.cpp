#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <exception>
#include <string>

#include "pwf/scenario.hpp"

namespace {

// exit codes: 0 ok, 2 schema violation, 3 numeric failure, 4 I/O failure
constexpr int exit_ok = 0;
constexpr int exit_schema = 2;
constexpr int exit_numeric = 3;
constexpr int exit_io = 4;

int cmd_run(const std::string& config_path) {
    try {
        auto manifest = pwf::run_scenario_file(config_path);
        std::printf("scenario '%s' completed in %.2f s, %zu file(s) emitted\n",
                    manifest.scenario.c_str(), manifest.wall_time_s, manifest.files.size());
        for (const auto& [key, value] : manifest.diagnostics.items())
            std::printf("  %s: %s\n", key.c_str(), value.dump().c_str());
        return exit_ok;
    } catch (const pwf::SchemaError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_schema;
    } catch (const pwf::IoError& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return exit_io;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return exit_numeric;
    }
}

int cmd_selftest() {
    try {
        auto rep = pwf::selftest();
        for (const auto& c : rep.checks)
            std::printf("%s  %-34s [%s]\n", c.passed ? "pass" : "FAIL", c.name.c_str(),
                        c.detail.c_str());
        std::printf("%d/%zu checks passed in %.1f s\n",
                    static_cast<int>(std::count_if(rep.checks.begin(), rep.checks.end(),
                                                   [](const auto& c) { return c.passed; })),
                    rep.checks.size(), rep.wall_time_s);
        return rep.all_passed() ? exit_ok : exit_numeric;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "selftest aborted: %s\n", e.what());
        return exit_numeric;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"photon wave-function numerics: propagation, scattering and "
                 "down-conversion scenarios"};
    app.set_version_flag("--version", std::string("pwf ") + pwf::tool_version);
    app.require_subcommand(1);

    std::string config_path;
    auto* run_cmd = app.add_subcommand("run", "execute a scenario configuration");
    run_cmd->add_option("config", config_path, "JSON scenario configuration")
        ->required()
        ->check(CLI::ExistingFile);

    auto* selftest_cmd = app.add_subcommand("selftest", "run the reduced invariant battery");
    auto* schema_cmd = app.add_subcommand("schema", "print the configuration schema");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_schema;
    }

    if (run_cmd->parsed()) return cmd_run(config_path);
    if (selftest_cmd->parsed()) return cmd_selftest();
    if (schema_cmd->parsed()) {
        std::printf("%s\n", pwf::config_schema_text().c_str());
        return exit_ok;
    }
    return exit_schema;
}
