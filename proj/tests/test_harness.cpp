#include <doctest.h>

#include "sblab/harness.hpp"
#include "sblab/heat.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace sblab;

namespace {

constexpr double kPi = std::numbers::pi;

ExperimentConfig quick(const std::string& id)
{
    ExperimentConfig c;
    c.experiment = id;
    return c;
}

// Both sides of the p_C isometry for a radial profile on H^3 at time t.
std::pair<double, double> pc_sides(const RadialProfile& f, double t)
{
    const auto h3 = RootSystemSpec::a1();
    auto lhs_g = [&](double r) {
        const double v = f(r) * std::sinh(r);
        return v * v;
    };
    const double lhs = 4.0 * kPi * quad::gk21(lhs_g, 0.0, f.reach(), {0.0, 1e-12}, 8).value;
    const HoloRadialExtension G(f, t, h3);
    const auto& gl = quad::gauss_legendre(96);
    auto angular = [&](double a, double b) {
        double s = 0.0;
        for (int i = 0; i < 96; ++i) {
            const cplx w2(a * a - b * b, 2.0 * a * b * gl.x[i]);
            s += gl.w[i] * std::norm(G.reduced(w2, a * a / (2.0 * t)));
        }
        // e^{ct} |G|^2 e^{-b^2/t} = |reduced|^2: the e^{-ct/2} in G cancels the e^{ct} weight.
        return s / std::pow(kPi * t, 1.5);
    };
    const double amax = std::sqrt((1.0 + t) * std::log(1e16));
    const double bmax = std::max(quad::gaussian_vs_exp_cutoff(t), std::sqrt(t * (1.0 + t) * std::log(1e16)));
    const double rhs = quad::integrate_pc_reduced_angular(angular, {amax, bmax}, {0.0, 1e-6}).value;
    return {lhs, rhs};
}

} // namespace

TEST_SUITE("harness") {

TEST_CASE("report rows switch to absolute error near zero")
{
    VerificationReport rep;
    rep.experiment = "x";
    rep.add({{"k", 1}}, 1.0 + 1e-9, 1.0, 1e-8);
    rep.add({{"k", 2}}, 1e-12, 0.0, 1e-10);
    rep.add({{"k", 3}}, 2.0, 1.0, 1e-3);
    rep.add({{"k", 4}}, 1.5, 1.0, 1e-3, 1000.0);
    CHECK(rep.rows[0].pass);
    CHECK_FALSE(rep.rows[0].absolute);
    CHECK(rep.rows[1].absolute);
    CHECK(rep.rows[1].pass);
    CHECK_FALSE(rep.rows[2].pass);
    CHECK(rep.rows[3].rel_err == doctest::Approx(5e-4));
    CHECK(rep.rows[3].pass);
    CHECK(rep.passed() == 3);
    CHECK(rep.failed() == 1);
    rep.override_tolerance(0.0);
    CHECK(rep.passed() == 0);
}

TEST_CASE("config parsing and validation")
{
    const auto j = nlohmann::json::parse(R"({"experiment": "unwrap", "t": [0.1, 1], "s": 0.5, "ell": 0.5, "seed": 7})");
    const ExperimentConfig c = config_from_json(j);
    CHECK(c.experiment == "unwrap");
    CHECK(c.t == std::vector<double>{0.1, 1.0});
    CHECK(c.s == std::vector<double>{0.5});
    CHECK(c.seed == 7u);
    CHECK(config_from_json(config_to_json(c)).t == c.t);

    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"bogus": 1})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"t": [-1]})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"family": "cubic"})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"t": "soon"})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"r_grid": 2})")), ConfigError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"tol": -1})")), ConfigError);
    CHECK(experiment_ids().size() == 8);
}

TEST_CASE("unknown experiment id is a configuration error with no writes")
{
    const std::string out = "harness_unknown.csv";
    std::filesystem::remove(out);
    ExperimentConfig c = quick("no-such-experiment");
    c.out = out;
    CHECK_THROWS_AS(run_all(c), ConfigError);
    CHECK_THROWS_AS(run_experiment("all", quick("all")), ConfigError);
    CHECK_FALSE(std::filesystem::exists(out));
    CHECK_FALSE(std::filesystem::exists(out + ".json"));
}

TEST_CASE("tolerance zero fails with complete diagnostics")
{
    ExperimentConfig c = quick("unwrap");
    c.tol = 0.0;
    const RunSummary run = run_all(c);
    CHECK_FALSE(run.all_pass());
    CHECK(run.passed() < static_cast<int>(run.reports.front().rows.size()));
    const auto js = summary_json(run, c);
    CHECK(js["failed"].get<int>() == run.failed());
    CHECK(js["experiments"][0]["diagnostics"].contains("truncation"));
    for (const auto& row : run.reports.front().rows) {
        CHECK(std::isfinite(row.lhs));
        CHECK(std::isfinite(row.rhs));
    }
}

TEST_CASE("CSV and JSON outputs")
{
    ExperimentConfig c = quick("intertwine");
    c.out = "harness_intertwine.csv";
    const RunSummary run = run_all(c);
    CHECK(run.all_pass());
    write_outputs(run, c);
    std::ifstream in(c.out);
    std::string header;
    std::getline(in, header);
    CHECK(header == "experiment,param_json,lhs,rhs,abs_err,rel_err,pass");
    int lines = 0;
    for (std::string line; std::getline(in, line);) {
        ++lines;
        CHECK(line.rfind("intertwine,\"{", 0) == 0);
        CHECK(line.substr(line.size() - 5) == ",true");
    }
    CHECK(lines == static_cast<int>(run.reports.front().rows.size()));
    std::ifstream js(c.out + ".json");
    const auto summary = nlohmann::json::parse(js);
    CHECK(summary["passed"].get<int>() == lines);
    CHECK(summary["failed"].get<int>() == 0);
    CHECK(summary.contains("wall_ms"));
    std::filesystem::remove(c.out);
    std::filesystem::remove(c.out + ".json");
}

TEST_CASE("cheap experiments are byte-identical across runs")
{
    for (const char* id : {"unwrap", "s3-compact", "intertwine"}) {
        const auto a = to_csv(run_all(quick(id)).reports);
        const auto b = to_csv(run_all(quick(id)).reports);
        CHECK(a == b);
    }
}

TEST_CASE("isometry sides scale quadratically")
{
    const auto h3 = RootSystemSpec::a1();
    const RadialProfile f = RadialProfile::gaussian_over_delta(1.0, h3);
    const auto [l1, r1] = pc_sides(f, 0.5);
    const auto [l2, r2] = pc_sides(f.scaled(2.0), 0.5);
    CHECK(l2 == doctest::Approx(4.0 * l1).epsilon(1e-14));
    CHECK(r2 == doctest::Approx(4.0 * r1).epsilon(1e-12));
    CHECK(r1 == doctest::Approx(l1).epsilon(1e-4));
    CHECK(l1 == doctest::Approx(std::pow(kPi, 1.5)).epsilon(1e-10));
}

}
