#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "tdqho/app.hpp"
#include "tdqho/errors.hpp"

using namespace tdqho;

namespace {

struct Overrides {
    std::string config_path;
    std::string scenario;
    std::optional<double> omega_d, strength, gamma, horizon, oracle_dt, threshold, abs_floor;
    std::optional<int> samples, oracle_n;
    std::vector<double> alpha;
    std::string out;
    std::string mode;
    bool density = false;
    std::string sweep;
    std::string branch = "theta_p_zero";
};

nlohmann::json read_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config: cannot open " + path);
    try {
        return nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: " + path + ": " + e.what());
    }
}

RunConfig build_config(const Overrides& o) {
    RunConfig c;
    if (!o.config_path.empty()) c = run_config_from_json(read_json(o.config_path));
    if (!o.scenario.empty() && (!c.scenario || c.scenario->name != o.scenario))
        c.scenario = scenario_preset(o.scenario);
    auto need = [&](const char* flag, const char* name) {
        if (!c.scenario || c.scenario->name != name)
            throw ConfigError(std::string(flag) + " applies to --scenario " + name);
    };
    if (o.omega_d) need("--omega-d", "driven"), c.scenario->driven.drive_frequency = *o.omega_d;
    if (o.strength) need("--strength", "driven"), c.scenario->driven.strength = *o.strength;
    if (o.gamma) need("--gamma", "ck"), c.scenario->ck.gamma = *o.gamma;
    if (o.horizon) c.horizon = o.horizon;
    if (o.samples) c.samples = *o.samples;
    if (o.oracle_n) c.oracle.n = *o.oracle_n;
    if (o.oracle_dt) c.oracle.dt = o.oracle_dt;
    if (o.threshold) c.threshold = *o.threshold;
    if (o.abs_floor) c.abs_floor = o.abs_floor;
    if (!o.out.empty()) c.out_dir = o.out;
    if (!o.mode.empty()) c.compare_mode = o.mode;
    if (o.density) c.density.enabled = true;
    if (!o.alpha.empty()) {
        c.initial.kind = InitialStateSpec::Kind::Coherent;
        c.initial.alpha = {o.alpha[0], o.alpha.size() > 1 ? o.alpha[1] : 0.0};
    }
    c.check();
    return c;
}

void add_run_options(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config_path, "JSON run config or parameter document");
    cmd->add_option("--scenario", o.scenario, "Preset: driven | ck")->check(CLI::IsMember({"driven", "ck"}));
    cmd->add_option("--omega-d", o.omega_d, "Drive frequency (driven)");
    cmd->add_option("--strength", o.strength, "Drive strength (driven)");
    cmd->add_option("--gamma", o.gamma, "Mass growth rate (ck)");
    cmd->add_option("--horizon", o.horizon, "Final time T");
    cmd->add_option("--samples", o.samples, "Grid points on [0, T]");
    cmd->add_option("--alpha", o.alpha, "Coherent initial amplitude: re [im]")->expected(1, 2);
    cmd->add_option("--out", o.out, "Output directory");
}

void add_oracle_options(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--oracle-n", o.oracle_n, "Fock basis size");
    cmd->add_option("--oracle-dt", o.oracle_dt, "Oracle time step");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-dependent quadratic oscillator toolkit"};
    app.require_subcommand(1);
    Overrides o;

    auto* validate_cmd = app.add_subcommand("validate", "Check admissibility of a parameter set");
    add_run_options(validate_cmd, o);

    auto* static_cmd = app.add_subcommand("static-diag", "Diagonalise a time-independent Hamiltonian");
    static_cmd->add_option("--config", o.config_path, "StaticParams JSON")->required();
    static_cmd->add_option("--branch", o.branch, "theta_p_zero | theta_x_zero");

    auto* evolve_cmd = app.add_subcommand("evolve", "Analytic pipeline, moments CSV");
    add_run_options(evolve_cmd, o);
    evolve_cmd->add_flag("--density", o.density, "Also write the position density grid");

    auto* oracle_cmd = app.add_subcommand("oracle", "Fock-basis reference propagation");
    add_run_options(oracle_cmd, o);
    add_oracle_options(oracle_cmd, o);

    auto* compare_cmd = app.add_subcommand("compare", "Pipeline vs oracle, or exact vs RWA");
    add_run_options(compare_cmd, o);
    add_oracle_options(compare_cmd, o);
    compare_cmd->add_option("--threshold", o.threshold, "Relative error threshold");
    compare_cmd->add_option("--abs-floor", o.abs_floor, "Absolute error floor");
    compare_cmd->add_option("--mode", o.mode, "oracle | rwa")->check(CLI::IsMember({"oracle", "rwa"}));

    auto* sweep_cmd = app.add_subcommand("sweep", "Summary over one scenario parameter");
    add_run_options(sweep_cmd, o);
    sweep_cmd->add_option("--sweep", o.sweep, "param:lo:hi:count")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (static_cmd->parsed())
            return run_static_diag(static_params_from_json(read_json(o.config_path)), o.branch, std::cout);
        const RunConfig config = build_config(o);
        if (validate_cmd->parsed()) return run_validate(config, std::cout);
        if (evolve_cmd->parsed()) return run_evolve(config, std::cout);
        if (oracle_cmd->parsed()) return run_oracle(config, std::cout);
        if (compare_cmd->parsed()) return run_compare(config, std::cout);
        return run_sweep(config, parse_sweep_axis(o.sweep), std::cout);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ValidityError& e) {
        std::cerr << "validity error: " << e.what() << '\n';
        return kExitValidity;
    } catch (const SingularityError& e) {
        std::cerr << "validity error: " << e.what() << '\n';
        return kExitValidity;
    } catch (const PreconditionError& e) {
        std::cerr << "validity error: " << e.what() << '\n';
        return kExitValidity;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
