#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "delaycert/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Certificates and simulations for cooperative infinite-delay systems"};
    app.require_subcommand(1);

    delaycert::RunRequest req;
    std::uint64_t seed = 0;
    double horizon = 0.0;
    double step = 0.0;
    std::string out_dir;

    const struct {
        const char* name;
        const char* help;
    } commands[] = {
        {"check", "build the certificate only"},
        {"simulate", "integrate the ensemble and write trajectory CSVs"},
        {"bounds", "explicit bounds: m0/M0, equilibria, u* and the first bounding box"},
        {"iterate", "run the bounding iteration of the stage-structured model"},
        {"verify", "certificate, simulation and verdicts"},
        {"probe", "sample the quasimonotone condition"},
    };
    for (const auto& c : commands) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        sub->add_option("config", req.config_path, "experiment config (JSON)")->required();
        sub->add_option("--seed", seed, "override analysis.seed");
        sub->add_option("--horizon", horizon, "override integrator.horizon");
        sub->add_option("--step", step, "override integrator.step");
        sub->add_option("--out-dir", out_dir, "override output.dir");
        sub->add_flag("--allow-inconclusive", req.allow_inconclusive, "do not fail on inconclusive verdicts");
        sub->callback([&req, sub, &seed, &horizon, &step, &out_dir] {
            req.command = sub->get_name();
            if (sub->count("--seed")) req.seed = seed;
            if (sub->count("--horizon")) req.horizon = horizon;
            if (sub->count("--step")) req.step = step;
            if (sub->count("--out-dir")) req.out_dir = out_dir;
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : delaycert::kExitConfig;
    }
    return delaycert::run(req, std::cout, std::cerr);
}
