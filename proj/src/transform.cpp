#include "sblab/transform.hpp"

#include "sblab/sinhc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sblab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeltaGuard = 1e-10;

OddFunction eta_weighted(const RadialProfile& f, const RootSystemSpec& spec)
{
    OddFunction h;
    h.h = [f, spec](double s) { return eta_a(spec, {cplx(s, 0.0)}).real() * f(s); };
    h.support = f.tail() == RadialProfile::Tail::compact ? f.reach() : std::numeric_limits<double>::infinity();
    h.centre = f.centre();
    return h;
}

} // namespace

RadialProfile kx_average(const OffsetRadialFunction& f, int order)
{
    if (!(f.ell >= 0.0)) throw std::invalid_argument("offset must be nonnegative");
    if (order < 64) throw std::invalid_argument("averaging order must be at least 64");
    const double ell = f.ell;
    const RadialProfile base = f.profile;
    const bool compact = base.tail() == RadialProfile::Tail::compact;
    const double supp = base.reach();
    auto avg = [base, ell, order, compact, supp](double r) {
        double lo = -1.0;
        if (compact && ell > 0.0 && r > 0.0) {
            // d < supp  <=>  u > (cosh ell cosh r - cosh supp) / (sinh ell sinh r)
            const double u0 = (std::cosh(ell) * std::cosh(r) - std::cosh(supp)) / (std::sinh(ell) * std::sinh(r));
            if (u0 >= 1.0) return 0.0;
            lo = std::max(-1.0, u0);
        }
        auto g = [&](double u) {
            const cplx zeta = hyperbolic_cos_distance(ell, cplx(r, 0.0), u);
            const double d2 = std::max(0.0, arccosh_squared(cplx(std::max(1.0, zeta.real()), 0.0)).real());
            return base(std::sqrt(d2));
        };
        return 0.5 * quad::gl_integrate(g, lo, 1.0, order);
    };
    const auto tail = base.tail();
    const double reach = base.reach() + ell;
    return RadialProfile::custom(avg, tail, reach, base.tag() + "-averaged", base.smoothness(),
                                 base.centre() + ell, base.width());
}

double r_max(double t) { return std::sqrt(80.0 * t) + 10.0; }

double invert_radial_between(const HoloRadialExtension& G, double lo, double hi, const quad::Tolerance& tol)
{
    if (hi <= lo) return 0.0;
    const double t = G.t();
    const double pref = std::exp(0.5 * G.c() * t) * std::pow(2.0 * kPi * t, -1.5) * 4.0 * kPi;
    auto integrand = [&](double b) { return G.imaginary_slice_damped(b) * b * b; };
    // The integrand oscillates in b at frequencies up to (extent of h)/t.
    const double extent = std::min(G.profile().reach(), G.profile().centre() + std::sqrt(76.0 * t));
    const double omega = extent / t;
    const int panels = 1 + static_cast<int>(omega * (hi - lo) / (2.0 * kPi));
    return pref * quad::gk21(integrand, lo, hi, tol, panels).value;
}

double invert_radial_truncated(const HoloRadialExtension& G, double R, const quad::Tolerance& tol)
{
    return invert_radial_between(G, 0.0, R, tol);
}

double invert_radial_at_basepoint(const RadialProfile& f, double t, const RootSystemSpec& spec,
                                  const quad::Tolerance& tol)
{
    if (f.kind() == RadialProfile::Kind::zero) return 0.0;
    const HoloRadialExtension G(f, t, spec, tol);
    const double pref = std::exp(0.5 * G.c() * t) * std::pow(2.0 * kPi * t, -1.5) * 4.0 * kPi;
    auto integrand = [&](double b) { return G.imaginary_slice_damped(b) * b * b; };
    if (f.tail() == RadialProfile::Tail::gaussian) {
        // Gaussian profile of variance s: the integrand decays like exp(-b^2 s / (2 t (s + t))).
        const double s = f.width() > 0.0 ? f.width() : 1.0;
        const double bmax = std::max(r_max(t), std::sqrt(80.0 * t * (s + t) / s) + 2.0);
        return invert_radial_truncated(G, bmax, tol);
    }
    // Compact support of radius rho: the b-integrand oscillates with half period pi t / rho
    // and decays algebraically. Integrate to a few periods, then accelerate the cycles.
    const double half = kPi * t / f.reach();
    const double b0 = half * std::ceil(r_max(t) / half);
    const double head = invert_radial_truncated(G, b0, tol);
    quad::Tolerance tail_tol = tol;
    tail_tol.abs = std::max(tol.abs, 1e-13 * std::abs(head) / pref);
    const auto tail = quad::integrate_oscillatory_tail(integrand, b0, half, tail_tol);
    return head + pref * tail.value;
}

double singular_radius(double ell)
{
    auto singular = [ell](double b) {
        const cplx zeta = hyperbolic_cos_distance(ell, cplx(0.0, b), 0.0);
        if (zeta.real() <= -1.0) return true;
        return std::abs(sinhc_of_square(arccosh_squared(zeta))) < kDeltaGuard;
    };
    double lo = 0.0, hi = kPi;
    if (!singular(hi)) return hi;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (singular(mid) ? hi : lo) = mid;
    }
    return lo;
}

double tube_functional_small_R(const OffsetRadialFunction& f, double t, double R, const quad::Tolerance& tol)
{
    if (!(R >= 0.0)) throw std::invalid_argument("radius must be nonnegative");
    if (R == 0.0) return 0.0;
    const double rs = singular_radius(f.ell);
    if (R >= rs) throw SingularRegionError("tube radius reaches the singular set", rs);
    const RootSystemSpec spec = RootSystemSpec::a1();
    const HoloRadialExtension G1(f.profile, t, spec, tol);
    const double c = G1.c();
    const double pref = std::exp(0.5 * c * t) * std::pow(2.0 * kPi * t, -1.5) * 2.0 * kPi;
    const double ch = std::cosh(f.ell), sh = std::sinh(f.ell);

    // Phi(zeta) = G1(d^2)/delta(d^2), d = arccosh zeta: F continued to exp_x(iY).
    auto phi = [&](double b, double u) -> double {
        const cplx zeta = f.ell == 0.0 ? cplx(std::cos(b), 0.0) : cplx(ch * std::cos(b), -sh * std::sin(b) * u);
        const cplx d2 = arccosh_squared(zeta);
        const cplx del = sinhc_of_square(d2);
        if (std::abs(del) < kDeltaGuard) throw SingularRegionError("delta vanishes inside the tube", b);
        return (G1(d2) / del).real();
    };
    quad::Tolerance inner = tol;
    inner.rel = tol.rel * 0.1;
    auto b_integrand = [&](double b) {
        const double u_int = f.ell == 0.0 ? 2.0 * phi(b, 0.0) : quad::gk21(
            [&](double u) { return phi(b, u); }, -1.0, 1.0, inner).value;
        return u_int * sinc(b) * std::exp(-b * b / (2.0 * t)) * b * b;
    };
    return pref * quad::gk21(b_integrand, 0.0, R, tol).value;
}

std::vector<double> tube_functional_sweep(const HoloRadialExtension& Gx, std::vector<double> radii,
                                          const quad::Tolerance& tol)
{
    if (!std::is_sorted(radii.begin(), radii.end())) throw std::invalid_argument("radii must increase");
    std::vector<double> out;
    out.reserve(radii.size());
    const double t = Gx.t();
    const double pref = std::exp(0.5 * Gx.c() * t) * std::pow(2.0 * kPi * t, -1.5) * 4.0 * kPi;
    double acc = 0.0, prev = 0.0;
    for (double R : radii) {
        if (R < 0.0) throw std::invalid_argument("radius must be nonnegative");
        // Each piece is accurate relative to the running total, not to its own (decaying) size.
        quad::Tolerance piece = tol;
        piece.abs = std::max(tol.abs, tol.rel * std::abs(acc) / pref);
        acc += invert_radial_between(Gx, prev, R, piece);
        prev = R;
        out.push_back(acc);
    }
    return out;
}

double tube_functional_continued(const OffsetRadialFunction& f, double t, double R, const quad::Tolerance& tol)
{
    if (!(R >= 0.0)) throw std::invalid_argument("radius must be nonnegative");
    const HoloRadialExtension Gx(kx_average(f), t, RootSystemSpec::a1(), tol);
    return invert_radial_truncated(Gx, R, tol);
}

cplx sb_aC_extension(const RadialProfile& f, double t, cplx z, const RootSystemSpec& spec, const quad::Tolerance& tol)
{
    return std::exp(-0.5 * c_constant(spec) * t) * heat1d_complex(eta_weighted(f, spec), t, z, tol);
}

cplx sb_aC_extension_scaled(const RadialProfile& f, double t, cplx z, const RootSystemSpec& spec,
                            const quad::Tolerance& tol)
{
    return std::exp(-0.5 * c_constant(spec) * t) * heat1d_complex_scaled(eta_weighted(f, spec), t, z, tol);
}

} // namespace sblab
