#include <doctest.h>

#include "sblab/heat.hpp"
#include "sblab/sinhc.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace sblab;

namespace {

constexpr double kPi = std::numbers::pi;
const RootSystemSpec kH3 = RootSystemSpec::a1();

OddFunction gaussian_odd()
{
    return {[](double s) { return s * std::exp(-0.5 * s * s); }, std::numeric_limits<double>::infinity(), 0.0};
}

double sphere_mass(double (*rho)(double, double, int), double t)
{
    auto g = [&](double th) {
        const double s = std::sin(th);
        return rho(th, t, 0) * 4.0 * kPi * s * s;
    };
    return quad::gk21(g, 0.0, kPi, {0.0, 1e-13}, 4).value;
}

} // namespace

TEST_SUITE("heat") {

TEST_CASE("complex 1-D heat evolution of s e^{-s^2/2}")
{
    const OddFunction h = gaussian_odd();
    for (double t : {0.25, 1.0}) {
        for (cplx z : {cplx(0.3, 0.0), cplx(1.2, 0.8), cplx(-0.5, 2.0), cplx(2.0, -1.5)}) {
            const cplx expect = std::pow(t + 1.0, -1.5) * z * std::exp(-z * z / (2.0 * (t + 1.0)));
            const cplx got = heat1d_complex(h, t, z);
            CHECK(std::abs(got - expect) <= 1e-11 * std::max(1.0, std::abs(expect)));
            CHECK(std::abs(heat1d_complex(h, t, -z) + got) <= 1e-13 * std::max(1.0, std::abs(got)));
        }
        CHECK(heat1d_complex(h, t, 0.9).imag() == 0.0);
        const cplx z(0.4, 1.1);
        CHECK(std::abs(heat1d_complex_scaled(h, t, z) - heat1d_complex(h, t, z) * std::exp(-1.21 / (2.0 * t))) < 1e-13);
    }
}

TEST_CASE("3-D radial heat evolution")
{
    const RadialProfile g = RadialProfile::gaussian(1.0);
    for (double t : {0.1, 0.5, 2.0}) {
        for (double r : {0.0, 0.4, 1.5, 3.0}) {
            const double expect = std::pow(1.0 + t, -1.5) * std::exp(-r * r / (2.0 * (1.0 + t)));
            CHECK(heat3d_radial_complex(g, t, {r * r}).real() == doctest::Approx(expect).epsilon(1e-12));
        }
    }
    // removable singularity at the origin
    const cplx at0 = heat3d_radial_complex(RadialProfile::spline_bump(1.0, 3), 0.3, {0.0});
    CHECK(std::isfinite(at0.real()));
    CHECK(at0.real() > 0.0);
    // short time recovers the profile
    const RadialProfile bump = RadialProfile::spline_bump(1.0, 3);
    for (double r : {0.0, 0.3, 0.6}) CHECK(std::abs(heat3d_radial_complex(bump, 1e-4, {r * r}).real() - bump(r)) < 1e-3);
}

TEST_CASE("3-D radial heat evolution against a Monte Carlo convolution")
{
    const RadialProfile bump = RadialProfile::spline_bump(1.0, 3);
    const double t = 0.3;
    std::mt19937_64 rng(20250101);
    std::normal_distribution<double> N(0.0, std::sqrt(t));
    const int n = 1000000;
    for (double r : {0.0, 0.5, 1.0}) {
        double sum = 0.0, sum2 = 0.0;
        for (int k = 0; k < n; ++k) {
            const double x = r + N(rng), y = N(rng), z = N(rng);
            const double v = bump(std::sqrt(x * x + y * y + z * z));
            sum += v;
            sum2 += v * v;
        }
        const double mean = sum / n, se = std::sqrt((sum2 / n - mean * mean) / n);
        const double quad = heat3d_radial_complex(bump, t, {r * r}).real();
        CHECK(std::abs(quad - mean) <= 3.0 * se);
    }
}

TEST_CASE("holomorphic extension of the Gaussian-over-delta family")
{
    const RadialProfile f = RadialProfile::gaussian_over_delta(1.0, kH3);
    for (double t : {0.25, 0.5}) {
        const HoloRadialExtension G = sb_radial_extension(f, t, kH3);
        for (cplx w2 : {cplx(0.0, 0.0), cplx(1.0, 0.0), cplx(-4.0, 0.0), cplx(2.0, 3.0)}) {
            const cplx expect = std::exp(-t / 2.0) * std::pow(1.0 + t, -1.5) * std::exp(-w2 / (2.0 * (1.0 + t)));
            CHECK(std::abs(G(w2) - expect) <= 1e-11 * std::abs(expect));
        }
        CHECK(G(cplx(0.7, 0.0)).imag() == 0.0);
    }
}

TEST_CASE("batched reduced integrals match the adaptive ones")
{
    for (const RadialProfile& f : {RadialProfile::gaussian_over_delta(0.5, kH3), RadialProfile::spline_bump(1.0, 3)}) {
        for (double t : {0.25, 1.0}) {
            const HoloRadialExtension G(f, t, kH3, {1e-300, 1e-13});
            std::vector<cplx> w2;
            std::vector<double> shift;
            for (double a : {0.0, 0.5, 2.0, 4.0})
                for (double b : {0.0, 1.0, 3.0})
                    for (double u : {-0.9, 0.2, 1.0}) {
                        w2.emplace_back(a * a - b * b, 2.0 * a * b * u);
                        shift.push_back(a * a / (2.0 * t));
                    }
            const auto batch = G.reduced_batch(w2, shift);
            for (std::size_t i = 0; i < w2.size(); ++i) {
                const cplx adaptive = G.reduced(w2[i], shift[i]);
                CHECK(std::abs(batch[i] - adaptive) < 1e-12);
            }
        }
    }
}

TEST_CASE("real slice solves the H^3 heat equation")
{
    const RadialProfile f = RadialProfile::gaussian_over_delta(1.0, kH3);
    const double t = 0.5;
    const HoloRadialExtension G(f, t, kH3);
    for (double r : {0.0, 0.3, 1.0, 2.0, 3.5}) {
        const double via_g = G.real_slice(r);
        CHECK(std::abs(h3_heat_evolve(f, t, r, {1e-15, 1e-11}) - via_g) <= 1e-6 * std::abs(via_g));
    }
}

TEST_CASE("H^3 heat kernel: mass, origin and semigroup")
{
    for (double t : {0.25, 1.0}) {
        auto g = [t](double r) {
            const double s = std::sinh(r);
            return h3_heat_kernel(r, t) * 4.0 * kPi * s * s;
        };
        CHECK(quad::gk21(g, 0.0, 40.0, {0.0, 1e-14}, 8).value == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(h3_heat_kernel(0.0, t) == doctest::Approx(std::exp(-t / 2.0) * std::pow(2.0 * kPi * t, -1.5)));
    }
    const RadialProfile f = RadialProfile::spline_bump(1.0, 3);
    const double t = 0.4;
    const HoloRadialExtension half(f, t / 2.0, kH3), full(f, t, kH3);
    const RadialProfile evolved = RadialProfile::custom([&half](double r) { return half.real_slice(r); },
                                                        RadialProfile::Tail::gaussian, 1.0 + std::sqrt(76.0 * t / 2.0),
                                                        "half-step");
    for (double r : {0.2, 1.0}) {
        CHECK(std::abs(h3_heat_evolve(evolved, t / 2.0, r, {1e-15, 1e-10}) - full.real_slice(r)) <=
              1e-7 * full.real_slice(r));
    }
}

TEST_CASE("fiber density and the signed measure")
{
    for (double t : {0.25, 1.0}) {
        const double gauss = std::pow(2.0 * kPi * t, -1.5);
        CHECK(gangolli_fiber_density({0, 0, 0}, t, kH3) == doctest::Approx(std::exp(-t / 2.0) * gauss));
        CHECK(sigma_density({0, 0, 0}, t) == doctest::Approx(std::exp(t / 2.0) * gauss));
        CHECK(sigma_density({0, 0, 1.5 * kPi}, t) < 0.0);

        auto nu = [t](double b) { return gangolli_fiber_density({b, 0, 0}, t, kH3) * 4.0 * kPi * b * b; };
        auto sg = [t](double b) { return sigma_density({0, b, 0}, t) * 4.0 * kPi * b * b; };
        const double bmax = std::sqrt(2.0 * t * 40.0) + 2.0 * t + 2.0;
        CHECK(quad::gk21(nu, 0.0, bmax, {0.0, 1e-14}, 8).value == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(quad::gk21(sg, 0.0, bmax, {0.0, 1e-14}, 8).value == doctest::Approx(1.0).epsilon(1e-10));

        for (double r : {0.1, 1.0, 2.5}) {
            const double d = std::sinh(r) / r;
            CHECK(gangolli_fiber_density({0, 0, r}, t, kH3) == doctest::Approx(h3_heat_kernel(r, t) * d * d).epsilon(1e-12));
        }
    }
}

TEST_CASE("S^3 heat kernel: theta series, spectral series and push-forward")
{
    CHECK(std::abs(s3_heat_theta(kPi / 2.0, 1.0, 8) - s3_heat_spectral(kPi / 2.0, 1.0)) < 1e-10);
    CHECK(std::abs(s3_heat_theta(kPi / 2.0, 0.5) - s3_heat_spectral(kPi / 2.0, 0.5)) < 1e-10);
    for (double t : {0.1, 0.25, 1.0}) {
        CHECK(sphere_mass(s3_heat_theta, t) == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(sphere_mass(s3_heat_spectral, t) == doctest::Approx(1.0).epsilon(1e-8));
        for (double th = 0.05; th < kPi; th += 0.1) {
            const double theta = s3_heat_theta(th, t);
            CHECK(std::abs(pushforward_sigma(th, t) - theta) <= 1e-13 * theta);
            CHECK(pushforward_sigma(th, t) > 0.0);
        }
    }
    CHECK(s3_heat_spectral(1.0, 40.0) == doctest::Approx(1.0 / (2.0 * kPi * kPi)).epsilon(1e-12));
    // endpoints come from extrapolation and stay finite
    CHECK(s3_heat_theta(0.0, 0.5) == doctest::Approx(s3_heat_spectral(0.0, 0.5)).epsilon(1e-8));
    CHECK(s3_heat_theta(kPi, 0.5) == doctest::Approx(s3_heat_spectral(kPi, 0.5)).epsilon(1e-8));
}

TEST_CASE("too short truncations are rejected")
{
    CHECK_THROWS_AS((void)s3_heat_theta(1.0, 20.0, 1), TruncationError);
    CHECK_THROWS_AS((void)s3_heat_spectral(1.0, 0.01, 2), TruncationError);
    CHECK(s3_lattice_truncation(0.1) >= 1);
    CHECK(s3_mode_truncation(0.1) > s3_mode_truncation(1.0));
}

TEST_CASE("push-forward of sigma against binned Monte Carlo")
{
    // Y ~ N(0, t I) with weight e^{t/2} sin|Y|/|Y| samples sigma_t; fold |Y| onto [0, pi].
    const double t = 1.0;
    const int n = 2000000, bins = 16;
    std::mt19937_64 rng(20250101);
    std::normal_distribution<double> N(0.0, std::sqrt(t));
    std::vector<double> sum(bins, 0.0), sum2(bins, 0.0);
    for (int k = 0; k < n; ++k) {
        const double x = N(rng), y = N(rng), z = N(rng);
        const double b = std::sqrt(x * x + y * y + z * z);
        const double w = std::exp(0.5 * t) * std::sin(b) / b;
        double th = std::fmod(b, 2.0 * kPi);
        if (th > kPi) th = 2.0 * kPi - th;
        const int i = std::min(bins - 1, static_cast<int>(th / kPi * bins));
        sum[i] += w;
        sum2[i] += w * w;
    }
    for (int i = 0; i < bins; ++i) {
        const double lo = kPi * i / bins, hi = kPi * (i + 1) / bins;
        auto g = [t](double th) {
            const double s = std::sin(th);
            return s3_heat_theta(th, t) * 4.0 * kPi * s * s;
        };
        const double exact = quad::gk21(g, lo, hi, {0.0, 1e-12}).value;
        const double mean = sum[i] / n, se = std::sqrt((sum2[i] / n - mean * mean) / n);
        CHECK(std::abs(mean - exact) <= 3.0 * se + 1e-12);
    }
}

}
