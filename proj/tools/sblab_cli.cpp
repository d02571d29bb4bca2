#include "sblab/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <optional>

int main(int argc, char** argv)
{
    CLI::App app{"Numerical verification lab for heat-kernel Segal-Bargmann transforms on H^3 and S^3"};
    app.require_subcommand(1);

    std::vector<double> t, s;
    std::string family, out, config_path;
    std::optional<double> ell, tol;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> ids = sblab::experiment_ids();
    ids.push_back("all");
    for (const auto& id : ids) {
        auto* sub = app.add_subcommand(id, id == "all" ? "run every experiment" : "run the " + id + " experiment");
        sub->add_option("--t", t, "time values")->delimiter(',');
        sub->add_option("--family", family, "test family")->check(CLI::IsMember({"gaussian", "spline"}));
        sub->add_option("--s", s, "Gaussian widths")->delimiter(',');
        sub->add_option("--ell", ell, "offset of the centre from x");
        sub->add_option("--out", out, "CSV report path (JSON summary at <out>.json)");
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--seed", seed, "seed recorded in the reports");
        sub->add_option("--tol", tol, "override every row tolerance");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    const std::string id = app.get_subcommands().front()->get_name();

    try {
        sblab::ExperimentConfig cfg;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw sblab::ConfigError("cannot read config " + config_path);
            nlohmann::json j;
            try {
                in >> j;
            } catch (const nlohmann::json::exception& e) {
                throw sblab::ConfigError(std::string("config is not valid JSON: ") + e.what());
            }
            cfg = sblab::config_from_json(j);
        }
        cfg.experiment = id;
        if (!t.empty()) cfg.t = t;
        if (!s.empty()) cfg.s = s;
        if (!family.empty()) cfg.family = family;
        if (!out.empty()) cfg.out = out;
        if (ell) cfg.ell = *ell;
        if (tol) cfg.tol = *tol;
        if (seed) cfg.seed = *seed;
        cfg.validate();

        const auto run = sblab::run_all(cfg);
        sblab::write_outputs(run, cfg);
        for (const auto& rep : run.reports) {
            std::printf("%-15s %3d passed %3d failed %10.1f ms\n", rep.experiment.c_str(), rep.passed(), rep.failed(),
                        rep.wall_ms);
        }
        std::printf("total           %3d passed %3d failed %10.1f ms\n", run.passed(), run.failed(), run.wall_ms);
        if (cfg.out.empty()) std::fputs(sblab::to_csv(run.reports).c_str(), stdout);
        return run.all_pass() ? 0 : 1;
    } catch (const sblab::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
