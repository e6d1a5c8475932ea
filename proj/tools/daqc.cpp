#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "daqc/cli.hpp"
#include "daqc/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Digital-analog quantum compiler and simulator"};
    app.set_version_flag("--version", daqc::version_string());
    app.require_subcommand(1);

    const std::map<std::string, std::string> about{
        {"compile", "compile an Ising Hamiltonian into a DAQC schedule"},
        {"simulate", "run a compiled Ising schedule under noise"},
        {"qft", "QFT fidelity for the digital, sDAQC and bDAQC paradigms"},
        {"qpe", "phase estimation of a single-qubit phase"},
        {"hhl", "HHL linear solve with amplitude encoding"},
        {"qaoa", "MAX-CUT QAOA in ideal or digital-analog form"},
        {"cr", "cross-resonance protocols and commutator bounds"},
        {"mitigate", "two-axis zero-noise extrapolation of the bDAQC QFT"},
    };
    std::string config_path;
    std::map<std::string, std::map<std::string, std::string>> flags;
    for (const auto& cmd : daqc::cli_commands()) {
        CLI::App* sub = app.add_subcommand(cmd, about.at(cmd));
        sub->add_option("--config", config_path, "JSON config file; flags override its keys");
        for (const auto& key : daqc::command_keys(cmd)) {
            std::string flag = "--" + key.name;
            for (auto& c : flag)
                if (c == '_') c = '-';
            sub->add_option_function<std::string>(
                flag, [&flags, cmd, name = key.name](const std::string& v) { flags[cmd][name] = v; }, key.help);
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const std::string cmd = app.get_subcommands().front()->get_name();
    nlohmann::json raw = nlohmann::json::object();
    if (!config_path.empty()) {
        std::ifstream f(config_path);
        if (!f) {
            std::cerr << "error: cli-harness: cannot open " << config_path << '\n';
            return 2;
        }
        raw = nlohmann::json::parse(f, nullptr, false);
        if (raw.is_discarded() || !raw.is_object()) {
            std::cerr << "error: cli-harness: config is not a JSON object\n";
            return 2;
        }
        if (raw.contains("command") && raw["command"] != cmd) {
            std::cerr << "error: cli-harness: config command does not match " << cmd << '\n';
            return 2;
        }
    }
    raw["command"] = cmd;
    try {
        const auto keys = daqc::command_keys(cmd);
        for (const auto& [name, text] : flags[cmd])
            for (const auto& k : keys)
                if (k.name == name) raw[name] = daqc::flag_value(k, text);
    } catch (const daqc::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return daqc::run(raw, std::cerr);
}
