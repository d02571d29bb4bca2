#include "sblab/heat.hpp"

#include "sblab/sinhc.hpp"

#include <cmath>
#include <numbers>

namespace sblab {

namespace {

constexpr double kPi = std::numbers::pi;
// e^{-39} ~ 1e-17: Gaussian factors beyond this many widths are dropped.
constexpr double kGaussLog = 38.0;

bool same_roots(const RootSystemSpec& a, const RootSystemSpec& b)
{
    return a.rank == b.rank && a.positive_roots == b.positive_roots;
}

} // namespace

double radial_delta(const RootSystemSpec& spec, double r)
{
    double p = 1.0;
    for (const auto& a : spec.positive_roots) {
        if (a.size() != 1) throw std::invalid_argument("radial delta needs a rank-one root system");
        p *= sinhc(a[0] * r);
    }
    return p;
}

RadialProfile::RadialProfile() = default;

RadialProfile RadialProfile::zero() { return {}; }

RadialProfile RadialProfile::gaussian(double s)
{
    if (!(s > 0.0)) throw std::invalid_argument("gaussian width must be positive");
    RadialProfile p;
    p.kind_ = Kind::gaussian;
    p.tail_ = Tail::gaussian;
    p.s_ = s;
    p.reach_ = std::sqrt(2.0 * s * (kGaussLog + 1.0));
    p.tag_ = "gaussian";
    return p;
}

RadialProfile RadialProfile::gaussian_over_delta(double s, const RootSystemSpec& spec)
{
    RadialProfile p = gaussian(s);
    p.kind_ = Kind::gaussian_over_delta;
    p.spec_ = std::make_shared<const RootSystemSpec>(spec);
    p.tag_ = "gaussian-over-delta";
    return p;
}

RadialProfile RadialProfile::spline_bump(double rho, int m)
{
    if (!(rho > 0.0) || m < 1) throw std::invalid_argument("spline bump needs rho > 0 and m >= 1");
    RadialProfile p;
    p.kind_ = Kind::spline_bump;
    p.tail_ = Tail::compact;
    p.s_ = rho;
    p.power_ = m;
    p.reach_ = rho;
    p.smoothness_ = m - 1;
    p.tag_ = "spline";
    return p;
}

RadialProfile RadialProfile::sampled(std::vector<double> x, std::vector<double> y, double support)
{
    const std::size_t n = x.size();
    if (n < 3 || y.size() != n) throw std::invalid_argument("sampled profile needs at least 3 matching nodes");
    if (x[0] != 0.0) throw std::invalid_argument("sampled profile must start at r = 0");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x[i] > x[i - 1])) throw std::invalid_argument("sampled nodes must increase");

    // Clamped spline, zero slope at both ends.
    std::vector<double> m(n), u(n);
    m[0] = -0.5;
    u[0] = (3.0 / (x[1] - x[0])) * ((y[1] - y[0]) / (x[1] - x[0]));
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double sig = (x[i] - x[i - 1]) / (x[i + 1] - x[i - 1]);
        const double p = sig * m[i - 1] + 2.0;
        m[i] = (sig - 1.0) / p;
        const double d = (y[i + 1] - y[i]) / (x[i + 1] - x[i]) - (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
        u[i] = (6.0 * d / (x[i + 1] - x[i - 1]) - sig * u[i - 1]) / p;
    }
    const double hn = x[n - 1] - x[n - 2];
    const double qn = 0.5;
    const double un = (3.0 / hn) * (0.0 - (y[n - 1] - y[n - 2]) / hn);
    m[n - 1] = (un - qn * u[n - 2]) / (qn * m[n - 2] + 1.0);
    for (std::size_t k = n - 1; k-- > 0;) m[k] = m[k] * m[k + 1] + u[k];

    RadialProfile p;
    p.kind_ = Kind::sampled;
    p.tail_ = Tail::compact;
    p.reach_ = std::min(support, x.back());
    p.s_ = support;
    p.smoothness_ = 1;
    p.tag_ = "sampled";
    p.spline_ = std::make_shared<const Spline>(Spline{std::move(x), std::move(y), std::move(m)});
    return p;
}

RadialProfile RadialProfile::custom(std::function<double(double)> f, Tail tail, double reach, std::string tag,
                                    int smoothness, double centre, double width)
{
    RadialProfile p;
    p.s_ = width;
    p.kind_ = Kind::custom;
    p.tail_ = tail;
    p.reach_ = reach;
    p.smoothness_ = smoothness;
    p.centre_ = centre;
    p.tag_ = std::move(tag);
    p.fn_ = std::make_shared<const std::function<double(double)>>(std::move(f));
    return p;
}

RadialProfile RadialProfile::scaled(double k) const
{
    RadialProfile p = *this;
    p.scale_ *= k;
    return p;
}

double RadialProfile::operator()(double r) const
{
    r = std::abs(r);
    switch (kind_) {
    case Kind::zero:
        return 0.0;
    case Kind::gaussian:
        return scale_ * std::exp(-r * r / (2.0 * s_));
    case Kind::gaussian_over_delta:
        return scale_ * std::exp(-r * r / (2.0 * s_)) / radial_delta(*spec_, r);
    case Kind::spline_bump: {
        if (r >= s_) return 0.0;
        const double q = 1.0 - (r / s_) * (r / s_);
        return scale_ * std::pow(q, power_);
    }
    case Kind::sampled: {
        if (r >= s_) return 0.0;
        const auto& sp = *spline_;
        if (r > sp.x.back()) throw InterpolationRangeError("radius beyond the sampled grid");
        auto it = std::upper_bound(sp.x.begin(), sp.x.end(), r);
        std::size_t hi = std::min<std::size_t>(static_cast<std::size_t>(it - sp.x.begin()), sp.x.size() - 1);
        const std::size_t lo = hi - 1;
        const double h = sp.x[hi] - sp.x[lo];
        const double a = (sp.x[hi] - r) / h, b = (r - sp.x[lo]) / h;
        const double v = a * sp.y[lo] + b * sp.y[hi] +
                         ((a * a * a - a) * sp.m[lo] + (b * b * b - b) * sp.m[hi]) * h * h / 6.0;
        return scale_ * v;
    }
    case Kind::custom:
        return scale_ * (*fn_)(r);
    }
    return 0.0;
}

double RadialProfile::delta_weighted(const RootSystemSpec& spec, double r) const
{
    if (kind_ == Kind::gaussian_over_delta && same_roots(*spec_, spec)) {
        return scale_ * std::exp(-r * r / (2.0 * s_));
    }
    return radial_delta(spec, r) * (*this)(r);
}

namespace {

// e^{-s^2/2t - shift} sinh(w s/t)/w, folded so that neither exponential overflows.
struct ReducedKernel {
    cplx w, inv_2w, shift;
    double inv_t;
    bool real_shift;

    ReducedKernel(cplx w2, cplx sh, double t)
        : w(std::sqrt(w2)), inv_2w(1.0 / (2.0 * w)), shift(sh), inv_t(1.0 / t), real_shift(sh.imag() == 0.0) {}

    [[nodiscard]] cplx operator()(double s) const
    {
        const double q = s * inv_t;
        const double zr = w.real() * q, zi = w.imag() * q;
        const double g = -0.5 * s * q;
        if (zr * zr + zi * zi < kSeriesSwitchRadius * kSeriesSwitchRadius)
            return std::exp(g - shift) * q * sinhc(cplx(zr, zi));
        if (real_shift) {
            const double base = g - shift.real();
            if (base + std::abs(zr) < 700.0) {
                // e^{base} (e^z - e^{-z}) with real exponentials and one sincos
                const double ep = std::exp(base + zr), em = std::exp(base - zr);
                const double c = std::cos(zi), sn = std::sin(zi);
                return cplx((ep - em) * c, (ep + em) * sn) * inv_2w;
            }
        }
        const cplx z(zr, zi);
        return (std::exp(z + g - shift) - std::exp(-z + g - shift)) * inv_2w;
    }
};

double reduced_upper(const OddFunction& h, double t, double x)
{
    return std::min(h.support, std::max(x, h.centre) + std::sqrt(2.0 * t * kGaussLog));
}

} // namespace

cplx reduced_heat_integral(const OddFunction& h, double t, cplx w2, cplx shift, const quad::Tolerance& tol)
{
    if (!(t > 0.0)) throw std::invalid_argument("time must be positive");
    const ReducedKernel k(w2, shift, t);
    const double upper = reduced_upper(h, t, std::abs(k.w.real()));
    if (!(upper > 0.0)) return 0.0;
    auto integrand = [&](double s) -> cplx {
        const double hs = h.h(s);
        return hs == 0.0 ? cplx(0.0) : hs * k(s);
    };
    // Start with panels of about 1.5 oscillation periods.
    const double omega = std::abs(k.w.imag()) / t;
    const int panels = 1 + static_cast<int>(omega * upper / (3.0 * kPi));
    const auto r = quad::gk21<cplx>(integrand, 0.0, upper, tol, panels);
    return r.value * (2.0 / std::sqrt(2.0 * kPi * t));
}

std::vector<cplx> reduced_heat_integral_batch(const OddFunction& h, double t, const std::vector<cplx>& w2,
                                              const std::vector<double>& shift)
{
    if (!(t > 0.0)) throw std::invalid_argument("time must be positive");
    if (w2.size() != shift.size()) throw std::invalid_argument("one shift per point");
    std::vector<ReducedKernel> kernels;
    kernels.reserve(w2.size());
    double x = 0.0, omega = 0.0;
    for (std::size_t i = 0; i < w2.size(); ++i) {
        kernels.emplace_back(w2[i], shift[i], t);
        x = std::max(x, std::abs(kernels.back().w.real()));
        omega = std::max(omega, std::abs(kernels.back().w.imag()) / t);
    }
    std::vector<cplx> out(w2.size(), 0.0);
    const double upper = reduced_upper(h, t, x);
    if (!(upper > 0.0)) return out;
    // Panel half-width: at most 1.5 Gaussian widths and 16 radians of the fastest oscillation.
    double half = std::min(1.5 * std::sqrt(t), 1.5);
    if (omega > 0.0) half = std::min(half, kBatchRadians / omega);
    const int panels = static_cast<int>(std::ceil(upper / (2.0 * half)));
    const double hw = upper / (2.0 * panels);
    const auto& gl = quad::gauss_legendre(kBatchOrder);
    for (int p = 0; p < panels; ++p) {
        const double c = (2 * p + 1) * hw;
        for (int j = 0; j < kBatchOrder; ++j) {
            const double s = c + hw * gl.x[j];
            const double hs = h.h(s) * gl.w[j];
            if (hs == 0.0) continue;
            for (std::size_t i = 0; i < kernels.size(); ++i) out[i] += hs * kernels[i](s);
        }
    }
    const double norm = hw * 2.0 / std::sqrt(2.0 * kPi * t);
    for (auto& v : out) v *= norm;
    return out;
}

cplx heat1d_complex(const OddFunction& h, double t, cplx z, const quad::Tolerance& tol)
{
    const cplx z2 = z * z;
    return z * std::exp(-z2 / (2.0 * t)) * reduced_heat_integral(h, t, z2, 0.0, tol);
}

cplx heat1d_complex_scaled(const OddFunction& h, double t, cplx z, const quad::Tolerance& tol)
{
    // e^{-z^2/2t} e^{-y^2/2t} = e^{-x^2/2t} e^{-ixy/t}; the real part goes into the shift.
    const double x = z.real(), y = z.imag();
    const cplx phase = std::exp(cplx(0.0, -x * y / t));
    return z * phase * reduced_heat_integral(h, t, z * z, x * x / (2.0 * t), tol);
}

cplx heat3d_radial_complex(const RadialProfile& u0, double t, ComplexRadiusSquared w2, const quad::Tolerance& tol)
{
    OddFunction h{[&u0](double s) { return s * u0(s); },
                  u0.tail() == RadialProfile::Tail::compact ? u0.reach() : std::numeric_limits<double>::infinity(),
                  u0.centre()};
    return reduced_heat_integral(h, t, w2.value, w2.value / (2.0 * t), tol);
}

HoloRadialExtension::HoloRadialExtension(RadialProfile f, double t, const RootSystemSpec& spec,
                                         const quad::Tolerance& tol)
    : f_(std::move(f)), t_(t), spec_(spec), c_(c_constant(spec)), tol_(tol)
{
    if (!(t > 0.0)) throw std::invalid_argument("time must be positive");
    const RadialProfile* fp = &f_;
    const RootSystemSpec* sp = &spec_;
    h_.h = [fp, sp](double s) { return s * fp->delta_weighted(*sp, s); };
    h_.support = f_.tail() == RadialProfile::Tail::compact ? f_.reach() : std::numeric_limits<double>::infinity();
    // delta f is exactly Gaussian here, so h is below 1e-17 of its peak beyond the reach.
    if (f_.kind() == RadialProfile::Kind::gaussian_over_delta && same_roots(*f_.family_spec(), spec_))
        h_.support = f_.reach();
    h_.centre = f_.centre();
}

cplx HoloRadialExtension::reduced(cplx w2, cplx shift) const
{
    return reduced_heat_integral(h_, t_, w2, shift, tol_);
}

std::vector<cplx> HoloRadialExtension::reduced_batch(const std::vector<cplx>& w2, const std::vector<double>& shift) const
{
    return reduced_heat_integral_batch(h_, t_, w2, shift);
}

cplx HoloRadialExtension::operator()(cplx w2) const
{
    return std::exp(-0.5 * c_ * t_) * reduced(w2, w2 / (2.0 * t_));
}

double HoloRadialExtension::imaginary_slice_damped(double b) const
{
    return std::exp(-0.5 * c_ * t_) * reduced(cplx(-b * b, 0.0)).real();
}

double HoloRadialExtension::real_slice(double r) const
{
    return (*this)(cplx(r * r, 0.0)).real() / radial_delta(spec_, r);
}

HoloRadialExtension sb_radial_extension(const RadialProfile& f, double t, const RootSystemSpec& spec,
                                        const quad::Tolerance& tol)
{
    return HoloRadialExtension(f, t, spec, tol);
}

namespace {

// H^3 heat kernel as a function of the squared distance.
double h3_kernel_of_square(double d2, double t)
{
    return std::exp(-0.5 * t) * std::pow(2.0 * kPi * t, -1.5) * std::exp(-d2 / (2.0 * t)) /
           sinhc_of_square(cplx(d2, 0.0)).real();
}

} // namespace

double h3_heat_kernel(double r, double t)
{
    return std::exp(-0.5 * t) * std::pow(2.0 * kPi * t, -1.5) * std::exp(-r * r / (2.0 * t)) / sinhc(r);
}

double h3_heat_evolve(const RadialProfile& f, double t, double r, const quad::Tolerance& tol)
{
    const double hi = f.tail() == RadialProfile::Tail::compact
                          ? f.reach()
                          : std::max(f.reach(), r) + std::sqrt(2.0 * t * kGaussLog) + 5.0;
    auto shell = [&](double rho) {
        const double fr = f(rho);
        if (fr == 0.0) return 0.0;
        double avg;
        if (r == 0.0) {
            avg = h3_heat_kernel(rho, t);
        } else {
            const double ch = std::cosh(r) * std::cosh(rho), sh = std::sinh(r) * std::sinh(rho);
            auto k = [&](double u) {
                const double zeta = std::max(1.0, ch - sh * u);
                return h3_kernel_of_square(arccosh_squared(cplx(zeta, 0.0)).real(), t);
            };
            avg = 0.5 * quad::gk21(k, -1.0, 1.0, tol).value;
        }
        const double sh = std::sinh(rho);
        return 4.0 * kPi * sh * sh * fr * avg;
    };
    // split at rho = r where the angular average peaks
    double v = 0.0;
    if (r > 0.0 && r < hi) v = quad::gk21(shell, 0.0, r, tol).value + quad::gk21(shell, r, hi, tol).value;
    else v = quad::gk21(shell, 0.0, hi, tol).value;
    return v;
}

double gangolli_fiber_density(const Vec3& Y, double t, const RootSystemSpec& spec)
{
    const double b2 = Y[0] * Y[0] + Y[1] * Y[1] + Y[2] * Y[2];
    const double c = c_constant(spec);
    return std::exp(-0.5 * c * t) * radial_delta(spec, std::sqrt(b2)) * std::exp(-b2 / (2.0 * t)) *
           std::pow(2.0 * kPi * t, -1.5);
}

double sigma_density(const Vec3& Y, double t)
{
    const double b2 = Y[0] * Y[0] + Y[1] * Y[1] + Y[2] * Y[2];
    return std::exp(0.5 * t) * sinc(std::sqrt(b2)) * std::exp(-b2 / (2.0 * t)) * std::pow(2.0 * kPi * t, -1.5);
}

int s3_lattice_truncation(double t)
{
    // (2 pi N + pi) e^{-(2 pi N - pi)^2/2t} < 1e-16 e^{-pi^2/2t}
    for (int n = 1;; ++n) {
        const double lhs = std::log(2.0 * kPi * n + kPi) - std::pow(2.0 * kPi * n - kPi, 2) / (2.0 * t);
        if (lhs < std::log(1e-16) - kPi * kPi / (2.0 * t)) return n;
    }
}

int s3_mode_truncation(double t)
{
    // M e^{-(M^2-1)t/2} < 1e-16
    for (int m = 1;; ++m)
        if (std::log(static_cast<double>(m)) - (m * m - 1.0) * t / 2.0 < std::log(1e-16)) return m;
}

namespace {

constexpr double kEndpointClamp = 1e-6;

// Quadratic extrapolation to theta from three clamped samples next to the endpoint.
template <class F>
double with_endpoint_extrapolation(double theta, F&& eval)
{
    if (!(theta >= 0.0 && theta <= kPi)) throw std::invalid_argument("angle must lie in [0, pi]");
    double x0;
    double dir;
    if (theta < kEndpointClamp) {
        x0 = 0.0;
        dir = 1.0;
    } else if (theta > kPi - kEndpointClamp) {
        x0 = kPi;
        dir = -1.0;
    } else {
        return eval(theta);
    }
    const double xs[3] = {x0 + dir * kEndpointClamp, x0 + dir * 2.0 * kEndpointClamp, x0 + dir * 3.0 * kEndpointClamp};
    double v = 0.0;
    for (int i = 0; i < 3; ++i) {
        double l = 1.0;
        for (int j = 0; j < 3; ++j)
            if (j != i) l *= (theta - xs[j]) / (xs[i] - xs[j]);
        v += l * eval(xs[i]);
    }
    return v;
}

// Sums terms n = +-N..+-1 then 0, largest |n| first. `term(n)` returns the
// numerator contribution. Throws when the first omitted pair is not negligible.
template <class Term>
double lattice_sum(Term&& term, int n)
{
    double sum = 0.0, l1 = 0.0;
    for (int k = n; k >= 1; --k) {
        const double a = term(k), b = term(-k);
        sum += a + b;
        l1 += std::abs(a) + std::abs(b);
    }
    const double a0 = term(0);
    sum += a0;
    l1 += std::abs(a0);
    const double omitted = std::abs(term(n + 1)) + std::abs(term(-n - 1));
    if (omitted > 1e-15 * l1) throw TruncationError("lattice truncation too small");
    return sum;
}

template <class Eval>
double auto_truncated(int requested, int automatic, Eval&& eval)
{
    if (requested > 0) return eval(requested);
    for (int n = automatic;; ++n) {
        try {
            return eval(n);
        } catch (const TruncationError&) {
            if (n > automatic + 64) throw;
        }
    }
}

} // namespace

double s3_heat_theta(double theta, double t, int n_lattice)
{
    if (!(t > 0.0)) throw std::invalid_argument("time must be positive");
    const double pref = std::exp(0.5 * t) * std::pow(2.0 * kPi * t, -1.5);
    return with_endpoint_extrapolation(theta, [&](double th) {
        auto term = [&](int n) {
            const double x = th + 2.0 * kPi * n;
            return x * std::exp(-x * x / (2.0 * t));
        };
        return auto_truncated(n_lattice, s3_lattice_truncation(t),
                              [&](int n) { return pref * lattice_sum(term, n) / std::sin(th); });
    });
}

double s3_heat_spectral(double theta, double t, int n_modes)
{
    if (!(t > 0.0)) throw std::invalid_argument("time must be positive");
    return with_endpoint_extrapolation(theta, [&](double th) {
        // sin(n th)/sin(th) = U_{n-1}(cos th), by the three-term recurrence
        const double x = std::cos(th);
        return auto_truncated(n_modes, s3_mode_truncation(t), [&](int m) {
            std::vector<double> u(m + 2);
            u[0] = 1.0;
            u[1] = 2.0 * x;
            for (int k = 2; k <= m; ++k) u[k] = 2.0 * x * u[k - 1] - u[k - 2];
            auto weight = [&](int n) {
                return n / (2.0 * kPi * kPi) * std::exp(-(n * static_cast<double>(n) - 1.0) * t / 2.0);
            };
            double sum = 0.0, l1 = 0.0;
            for (int n = m; n >= 1; --n) {
                const double v = weight(n) * u[n - 1];
                sum += v;
                l1 += std::abs(v);
            }
            const double next = weight(m + 1) * std::abs(2.0 * x * u[m - 1] - (m >= 2 ? u[m - 2] : 0.0));
            if (next > 1e-15 * l1) throw TruncationError("spectral truncation too small");
            return sum;
        });
    });
}

double pushforward_sigma(double theta, double t, int n_lattice)
{
    if (!(t > 0.0)) throw std::invalid_argument("time must be positive");
    return with_endpoint_extrapolation(theta, [&](double th) {
        // each preimage Y = (th + 2 pi n) e1 contributes sigma(Y)/j(Y), j = delta(iY)^2
        auto term = [&](int n) {
            const double b = th + 2.0 * kPi * n;
            const double jh = sinc(b);
            return sigma_density({b, 0.0, 0.0}, t) / (jh * jh);
        };
        return auto_truncated(n_lattice, s3_lattice_truncation(t), [&](int n) { return lattice_sum(term, n); });
    });
}

} // namespace sblab
