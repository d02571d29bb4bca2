#include <doctest.h>

#include "sblab/rootsys.hpp"
#include "sblab/sinhc.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

using namespace sblab;

namespace {

constexpr double kPi = std::numbers::pi;

RootSystemSpec a1xa1()
{
    RootSystemSpec s;
    s.rank = 2;
    s.positive_roots = {{1.0, 0.0}, {0.0, 1.0}};
    s.weyl_order = 4;
    return s;
}

// sinh(x)/x by direct summation in long double, the independent oracle.
long double sinhc_series(long double x)
{
    long double term = 1.0L, sum = 1.0L;
    for (int k = 1; k < 40; ++k) {
        term *= x * x / ((2.0L * k) * (2.0L * k + 1.0L));
        sum += term;
    }
    return sum;
}

} // namespace

TEST_SUITE("rootsys") {

TEST_CASE("rho and c for the empty, A1 and A1xA1 systems")
{
    const auto flat = RootSystemSpec::euclidean(3);
    CHECK(rho(flat) == std::vector<double>{0.0, 0.0, 0.0});
    CHECK(c_constant(flat) == 0.0);

    const auto a1 = RootSystemSpec::a1();
    CHECK(rho(a1) == std::vector<double>{1.0});
    CHECK(c_constant(a1) == 1.0);

    const auto two = a1xa1();
    CHECK(rho(two) == std::vector<double>{1.0, 1.0});
    CHECK(c_constant(two) == doctest::Approx(2.0));
    // c of an orthogonal union is the sum of the parts
    CHECK(c_constant(two) == doctest::Approx(2.0 * c_constant(a1)));
}

TEST_CASE("delta_a, eta_a and j_half_a examples")
{
    const auto a1 = RootSystemSpec::a1();
    CHECK(delta_a(a1, {0.0}) == cplx(1.0, 0.0));
    CHECK(delta_a(a1, {1.0}).real() == doctest::Approx(static_cast<double>(sinhc_series(1.0L))).epsilon(1e-15));
    CHECK(delta_a(a1, {1.0}).real() == doctest::Approx(1.17520119).epsilon(1e-8));
    CHECK(std::abs(delta_a(a1, {cplx(0.0, kPi)})) < 1e-16);

    CHECK(eta_a(a1, {0.0}) == cplx(0.0, 0.0));
    CHECK(eta_a(a1, {1.0}).real() == doctest::Approx(std::sinh(1.0)));
    CHECK(eta_a(a1, {-1.0}).real() == doctest::Approx(-std::sinh(1.0)));

    CHECK(j_half_a(a1, {0.0}) == cplx(1.0, 0.0));
    CHECK(std::abs(j_half_a(a1, {kPi})) < 1e-16);

    CHECK(delta_a(RootSystemSpec::euclidean(2), {cplx(3.0, 1.0), 2.0}) == cplx(1.0, 0.0));
}

TEST_CASE("j_half(Y) equals delta(iY) for real Y")
{
    const auto two = a1xa1();
    for (double y1 = -4.0; y1 <= 4.0; y1 += 0.37) {
        for (double y2 : {-2.2, 0.0, 0.3, 1.9}) {
            const cplx j = j_half_a(two, {y1, y2});
            const cplx d = delta_a(two, {cplx(0.0, y1), cplx(0.0, y2)});
            CHECK(std::abs(j - d) <= 1e-12 * std::max(1.0, std::abs(j)));
        }
    }
}

TEST_CASE("series and closed form agree at the switch radius")
{
    for (double phase = 0.0; phase < 2.0 * kPi; phase += 0.3) {
        const cplx z = std::polar(kSeriesSwitchRadius, phase);
        const cplx series = detail::even_series(z * z, 1.0);
        const cplx closed = std::sinh(z) / z;
        CHECK(std::abs(series - closed) < 1e-13);
        const cplx s2 = detail::even_series(z * z, -1.0);
        CHECK(std::abs(s2 - std::sin(z) / z) < 1e-13);
    }
}

TEST_CASE("validation rejects broken systems")
{
    RootSystemSpec s = RootSystemSpec::a1();
    CHECK_NOTHROW(s.validate());
    s.positive_roots = {{0.0}};
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = a1xa1();
    s.positive_roots.push_back({2.0, 0.0});
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = RootSystemSpec::a1();
    s.multiplicity = 1;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = RootSystemSpec::a1();
    s.weyl_order = 3;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = RootSystemSpec::euclidean(2);
    s.weyl_order = 2;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("root systems load from JSON")
{
    const auto j = nlohmann::json::parse(R"({"rank": 1, "positive_roots": [[1.0]], "weyl_order": 2})");
    const auto s = root_system_from_json(j);
    CHECK(s.rank == 1);
    CHECK(c_constant(s) == 1.0);

    const std::string path = "rootsys_test.json";
    std::ofstream(path) << R"({"rank": 2, "positive_roots": [], "weyl_order": 1})";
    const auto flat = load_root_system(path);
    CHECK(flat.positive_roots.empty());
    CHECK(c_constant(flat) == 0.0);
    std::remove(path.c_str());

    CHECK_THROWS(root_system_from_json(nlohmann::json::parse(R"({"rank": 1, "positive_roots": [[0.0]], "weyl_order": 2})")));
}

}
