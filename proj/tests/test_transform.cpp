#include <doctest.h>

#include "sblab/transform.hpp"
#include "sblab/sinhc.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace sblab;

namespace {

constexpr double kPi = std::numbers::pi;
const RootSystemSpec kH3 = RootSystemSpec::a1();
const quad::Tolerance kTight{1e-300, 1e-12};

} // namespace

TEST_SUITE("transform") {

TEST_CASE("stabiliser average: trivial offset, constants, Monte Carlo")
{
    const RadialProfile f = RadialProfile::gaussian_over_delta(1.0, kH3);
    const RadialProfile same = kx_average({0.0, f});
    for (double r : {0.0, 0.5, 2.0}) CHECK(std::abs(same(r) - f(r)) <= 1e-12 * f(r));

    const RadialProfile flat = RadialProfile::custom([](double r) { return r < 10.0 ? 2.5 : 0.0; },
                                                     RadialProfile::Tail::compact, 10.0, "constant");
    const RadialProfile avg = kx_average({1.0, flat});
    for (double r : {0.0, 1.0, 5.0}) CHECK(avg(r) == doctest::Approx(2.5).epsilon(1e-14));

    // u = cos(angle) is uniform on [-1, 1] for directions uniform on the sphere.
    const RadialProfile off = kx_average({1.0, f});
    std::mt19937_64 rng(20250101);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const int n = 1000000;
    double sum = 0.0, sum2 = 0.0;
    for (int k = 0; k < n; ++k) {
        const double zeta = hyperbolic_cos_distance(1.0, 1.0, U(rng)).real();
        const double v = f(std::acosh(std::max(1.0, zeta)));
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / n, se = std::sqrt((sum2 / n - mean * mean) / n);
    CHECK(std::abs(off(1.0) - mean) <= 3.0 * se);
}

TEST_CASE("radial inversion at the basepoint")
{
    CHECK(invert_radial_at_basepoint(RadialProfile::zero(), 0.5, kH3) == 0.0);
    const RadialProfile g = RadialProfile::gaussian_over_delta(1.0, kH3);
    CHECK(std::abs(invert_radial_at_basepoint(g, 0.5, kH3, kTight) - g(0.0)) < 1e-6);
    const RadialProfile bump = RadialProfile::spline_bump(1.0, 3);
    std::vector<double> rec;
    for (double t : {0.25, 0.5, 1.0}) rec.push_back(invert_radial_at_basepoint(bump, t, kH3, kTight));
    for (double v : rec) {
        CHECK(std::abs(v - 1.0) < 1e-4);
        CHECK(std::abs(v - rec.front()) < 1e-5);
    }
}

TEST_CASE("singularity cancellation at b = pi")
{
    const RadialProfile f = RadialProfile::gaussian_over_delta(1.0, kH3);
    const HoloRadialExtension G(f, 0.5, kH3);
    const cplx at_pi = G(cplx(-kPi * kPi, 0.0));
    CHECK(std::isfinite(at_pi.real()));
    CHECK(std::abs(at_pi) > 0.0);
    // G / delta blows up like 1/(pi - b) next to the zero of delta
    const double b1 = kPi - 1e-3, b2 = kPi - 1e-4;
    const double phi1 = std::abs(G(cplx(-b1 * b1, 0.0)) / sinc(b1));
    const double phi2 = std::abs(G(cplx(-b2 * b2, 0.0)) / sinc(b2));
    CHECK(phi2 / phi1 == doctest::Approx(10.0).epsilon(1e-2));
}

TEST_CASE("tube functional: literal and radialised routes")
{
    const RadialProfile f = RadialProfile::gaussian_over_delta(1.0, kH3);
    const double t = 0.5;
    // coincident centres: the literal integral is the truncated radial inversion
    const HoloRadialExtension G(f, t, kH3, kTight);
    for (double R : {0.3, 1.2, 2.5}) {
        CHECK(std::abs(tube_functional_small_R({0.0, f}, t, R, kTight) - invert_radial_truncated(G, R, kTight)) < 1e-12);
    }
    const OffsetRadialFunction fx{1.0, f};
    CHECK(std::abs(tube_functional_small_R(fx, t, 0.5, kTight) - tube_functional_continued(fx, t, 0.5, kTight)) < 1e-6);
    CHECK(tube_functional_small_R(fx, t, 0.0) == 0.0);
    CHECK(std::abs(tube_functional_continued(fx, t, 1e-3, kTight)) < 1e-8);

    const double rs = singular_radius(1.0);
    CHECK(rs == doctest::Approx(std::acos(-1.0 / std::cosh(1.0))).epsilon(1e-10));
    CHECK_THROWS_AS((void)tube_functional_small_R(fx, t, rs + 0.1), SingularRegionError);
}

TEST_CASE("tube functional sweep is cumulative")
{
    const RadialProfile f = RadialProfile::gaussian_over_delta(1.0, kH3);
    const double t = 0.5;
    const OffsetRadialFunction fx{1.0, f};
    const HoloRadialExtension Gx(kx_average(fx), t, kH3, kTight);
    const std::vector<double> radii{0.5, 1.5, 3.0, r_max(t)};
    const auto sweep = tube_functional_sweep(Gx, radii, kTight);
    for (std::size_t i = 0; i < radii.size(); ++i)
        CHECK(sweep[i] == doctest::Approx(invert_radial_truncated(Gx, radii[i], kTight)).epsilon(1e-10));
    CHECK(std::abs(sweep.back() - fx.value_at_x()) < 1e-4);
    CHECK_THROWS_AS((void)tube_functional_sweep(Gx, {1.0, 0.5}), std::invalid_argument);
}

TEST_CASE("a_C extension: oddness and agreement with the radial route")
{
    for (const RadialProfile& f : {RadialProfile::gaussian_over_delta(1.0, kH3), RadialProfile::spline_bump(1.0, 3)}) {
        const double t = 0.5;
        const HoloRadialExtension G(f, t, kH3, kTight);
        for (double x : {0.3, 1.0, 2.2}) {
            const double eta_f = std::sinh(x) * G.real_slice(x);
            const cplx ac = sb_aC_extension(f, t, x, kH3, kTight);
            CHECK(std::abs(ac.real() - eta_f) <= 1e-8 * std::abs(eta_f));
        }
        for (cplx z : {cplx(0.4, 0.3), cplx(1.5, -2.0)}) {
            const cplx v = sb_aC_extension(f, t, z, kH3, kTight);
            CHECK(std::abs(sb_aC_extension(f, t, -z, kH3, kTight) + v) <= 1e-13 * std::max(1.0, std::abs(v)));
        }
    }
    // eta f = r e^{-r^2/2s} for the Gaussian family, so (eta F)(z) = e^{-t/2} (s/(s+t))^{3/2} z e^{-z^2/2(s+t)}.
    const double s = 1.0, t = 0.5;
    const RadialProfile g = RadialProfile::gaussian_over_delta(s, kH3);
    for (cplx z : {cplx(0.7, 0.0), cplx(1.0, 1.0)}) {
        const cplx expect = std::exp(-t / 2.0) * std::pow(s / (s + t), 1.5) * z * std::exp(-z * z / (2.0 * (s + t)));
        CHECK(std::abs(sb_aC_extension(g, t, z, kH3, kTight) - expect) <= 1e-10 * std::abs(expect));
    }
}

}
