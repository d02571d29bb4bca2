#include "sblab/quad.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace sblab::quad {

namespace {

GaussLegendre compute_gauss_legendre(int n)
{
    GaussLegendre r;
    r.x.resize(n);
    r.w.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0, p1 = x;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // recompute derivative at the converged node
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.x[i] = -x;
        r.x[n - 1 - i] = x;
        r.w[i] = w;
        r.w[n - 1 - i] = w;
    }
    if (n % 2 == 1) r.x[n / 2] = 0.0;
    return r;
}

} // namespace

const GaussLegendre& gauss_legendre(int n)
{
    if (n < 1) throw std::invalid_argument("Gauss-Legendre order must be positive");
    static std::mutex mu;
    static std::map<int, std::unique_ptr<GaussLegendre>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<GaussLegendre>(compute_gauss_legendre(n));
    return *slot;
}

Result<double> tanh_sinh(const std::function<double(double)>& f, double a, double b, const Tolerance& tol)
{
    boost::math::quadrature::tanh_sinh<double> ts;
    double err = 0.0, l1 = 0.0;
    std::size_t levels = 0;
    const double tol_rel = std::max(tol.rel, std::numeric_limits<double>::epsilon());
    const double v = ts.integrate(f, a, b, tol_rel, &err, &l1, &levels);
    if (!(err <= std::max({tol.abs, tol.rel * std::abs(v), 100.0 * std::numeric_limits<double>::epsilon() * l1}))) {
        throw QuadratureError("tanh-sinh did not reach tolerance", v, err);
    }
    return {v, err, 0, static_cast<int>(levels)};
}

Result<double> integrate_1d(const std::function<double(double)>& f, double a, double b, RuleKind kind,
                            const Tolerance& tol, int order)
{
    switch (kind) {
    case RuleKind::gauss_legendre:
        return {gl_integrate(f, a, b, order), 0.0, order, 1};
    case RuleKind::tanh_sinh:
        return tanh_sinh(f, a, b, tol);
    case RuleKind::gauss_kronrod_adaptive:
        break;
    }
    return gk21(f, a, b, tol);
}

double wynn_epsilon(const std::vector<double>& s, double* error)
{
    const std::size_t n = s.size();
    if (n == 0) {
        if (error) *error = 0.0;
        return 0.0;
    }
    if (n < 3) {
        if (error) *error = n == 2 ? std::abs(s[1] - s[0]) : std::abs(s[0]);
        return s.back();
    }
    // e[k][i]: column k of the epsilon table; even columns hold the estimates.
    std::vector<std::vector<double>> e(n + 1);
    e[0].assign(n + 1, 0.0);
    e[1] = s;
    std::vector<double> estimates{s.back()};
    for (std::size_t k = 2; k <= n; ++k) {
        const auto& prev = e[k - 1];
        const auto& prev2 = e[k - 2];
        e[k].resize(n - k + 1);
        bool ok = true;
        for (std::size_t i = 0; i + k <= n; ++i) {
            const double d = prev[i + 1] - prev[i];
            if (d == 0.0 || !std::isfinite(d)) {
                ok = false;
                break;
            }
            e[k][i] = prev2[i + 1] + 1.0 / d;
        }
        if (!ok) break;
        if (k % 2 == 1) estimates.push_back(e[k].back());
    }
    // The estimates along the last diagonal; use the newest and its neighbour.
    const double best = estimates.back();
    if (error) {
        double spread = estimates.size() >= 2 ? std::abs(best - estimates[estimates.size() - 2]) : std::abs(best);
        if (estimates.size() >= 3) spread = std::max(spread, std::abs(best - estimates[estimates.size() - 3]));
        *error = spread;
    }
    return best;
}

Result<double> integrate_oscillatory_tail(const std::function<double(double)>& f, double a, double cycle,
                                          const Tolerance& tol, int max_cycles)
{
    Tolerance piece_tol = tol;
    piece_tol.rel = std::max(tol.rel * 0.01, 1e-15);
    std::vector<double> partial;
    double acc = 0.0, l1 = 0.0;
    long evals = 0;
    double prev_est = 0.0, prev_err = std::numeric_limits<double>::infinity();
    constexpr int kWindow = 16;
    for (int k = 0; k < max_cycles; ++k) {
        const double lo = a + k * cycle, hi = lo + cycle;
        const auto piece = gk21(f, lo, hi, piece_tol);
        evals += piece.evals;
        acc += piece.value;
        l1 += std::abs(piece.value);
        partial.push_back(acc);
        if (partial.size() < 6) continue;
        const std::size_t start = partial.size() > kWindow ? partial.size() - kWindow : 0;
        std::vector<double> window(partial.begin() + static_cast<long>(start), partial.end());
        double err = 0.0;
        const double est = wynn_epsilon(window, &err);
        err = std::max(err, std::abs(est - prev_est));
        const double target = std::max({tol.abs, tol.rel * std::abs(est), 100.0 * std::numeric_limits<double>::epsilon() * l1});
        if (err <= target && prev_err <= 10.0 * target) return {est, err, evals, k + 1};
        prev_est = est;
        prev_err = err;
    }
    throw QuadratureError("oscillatory tail did not converge", prev_est, prev_err);
}

Result<double> integrate_algebraic_tail(const std::function<double(double)>& f, double a, double p,
                                        const Tolerance& tol, int max_doublings)
{
    if (!(a > 0.0) || !(p > 1.0)) throw std::invalid_argument("algebraic tail needs a > 0 and p > 1");
    const double ratio = 1.0 / (std::pow(2.0, p - 1.0) - 1.0);
    double acc = 0.0;
    long evals = 0;
    double lo = a;
    for (int k = 0; k < max_doublings; ++k) {
        const double hi = 2.0 * lo;
        const auto piece = gk21(f, lo, hi, tol);
        evals += piece.evals;
        acc += piece.value;
        const double bound = std::abs(piece.value) * ratio;
        if (bound <= std::max(tol.abs, tol.rel * std::abs(acc))) {
            return {acc + piece.value * ratio, bound + piece.error, evals, k + 1};
        }
        lo = hi;
    }
    throw QuadratureError("algebraic tail did not converge", acc, std::abs(acc));
}

Chebyshev::Chebyshev(const std::function<double(double)>& f, double a, double b, int n) : a_(a), b_(b)
{
    if (n < 2) throw std::invalid_argument("Chebyshev interpolant needs at least two nodes");
    std::vector<double> v(n);
    coef_.resize(n);
    for (int k = 0; k < n; ++k) v[k] = f(node(k));
    fit(v);
}

Chebyshev::Chebyshev(std::vector<double> values_at_nodes, double a, double b) : a_(a), b_(b)
{
    if (values_at_nodes.size() < 2) throw std::invalid_argument("Chebyshev interpolant needs at least two nodes");
    coef_.resize(values_at_nodes.size());
    fit(values_at_nodes);
}

double Chebyshev::node(int k) const
{
    const int n = static_cast<int>(coef_.size());
    const double x = std::cos(std::numbers::pi * k / (n - 1));
    return 0.5 * (a_ + b_) + 0.5 * (b_ - a_) * x;
}

void Chebyshev::fit(const std::vector<double>& v)
{
    // Discrete cosine transform on the Lobatto grid.
    const int n = static_cast<int>(v.size());
    const int m = n - 1;
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) {
            const double wk = (k == 0 || k == m) ? 0.5 : 1.0;
            s += wk * v[k] * std::cos(std::numbers::pi * j * k / m);
        }
        s *= 2.0 / m;
        if (j == 0 || j == m) s *= 0.5;
        coef_[j] = s;
    }
}

double Chebyshev::operator()(double x) const
{
    const double y = (2.0 * x - a_ - b_) / (b_ - a_);
    // Clenshaw
    double b1 = 0.0, b2 = 0.0;
    for (int j = static_cast<int>(coef_.size()) - 1; j >= 1; --j) {
        const double b0 = 2.0 * y * b1 - b2 + coef_[j];
        b2 = b1;
        b1 = b0;
    }
    return y * b1 - b2 + coef_[0];
}

double Chebyshev::derivative(double x) const
{
    // Coefficients of the derivative series, then Clenshaw.
    const int n = static_cast<int>(coef_.size());
    std::vector<double> d(n + 1, 0.0);
    for (int j = n - 1; j >= 1; --j) d[j - 1] = d[j + 1] + 2.0 * j * coef_[j];
    d[0] *= 0.5;
    const double y = (2.0 * x - a_ - b_) / (b_ - a_);
    double b1 = 0.0, b2 = 0.0;
    for (int j = n - 2; j >= 1; --j) {
        const double b0 = 2.0 * y * b1 - b2 + d[j];
        b2 = b1;
        b1 = b0;
    }
    return (y * b1 - b2 + d[0]) * 2.0 / (b_ - a_);
}

Result<double> integrate_pc_reduced(const std::function<double(double, double, double)>& phi, const PcDomain& dom,
                                    const Tolerance& tol)
{
    if (dom.u_order < 96) throw std::invalid_argument("angular Gauss-Legendre order must be at least 96");
    const int nu = dom.u_order;
    auto angular = [&](double a, double b) {
        return gl_integrate([&](double u) { return phi(a, b, u); }, -1.0, 1.0, nu);
    };
    auto r = integrate_pc_reduced_angular(angular, dom, tol);
    r.evals *= nu;
    return r;
}

Result<double> integrate_pc_reduced_angular(const std::function<double(double, double)>& angular, const PcDomain& dom,
                                            const Tolerance& tol)
{
    if (dom.u_order < 96) throw std::invalid_argument("angular Gauss-Legendre order must be at least 96");

    // Coarse tensor estimate fixes the absolute scale for the nested adaptive pass.
    constexpr int kCoarse = 16;
    constexpr int kTensorLow = 24, kTensorHigh = 32;
    const auto& g = gauss_legendre(kCoarse);
    double scale = 0.0;
    for (int i = 0; i < kCoarse; ++i) {
        const double a = 0.5 * dom.a_max * (1.0 + g.x[i]);
        for (int j = 0; j < kCoarse; ++j) {
            const double b = 0.5 * dom.b_max * (1.0 + g.x[j]);
            scale += g.w[i] * g.w[j] * std::abs(angular(a, b)) * a * a * b * b;
        }
    }
    scale *= 0.25 * dom.a_max * dom.b_max;
    long evals = kCoarse * kCoarse;

    Tolerance inner = tol;
    inner.rel = tol.rel * 0.1;
    inner.abs = std::max(tol.abs, 0.1 * tol.rel * scale / std::max(dom.a_max, 1.0));
    constexpr double kFactor = 8.0 * std::numbers::pi * std::numbers::pi;

    // Tail in b beyond b_max at a fixed a (zero without a tail order).
    double tail_err = 0.0;
    auto b_tail = [&](double a) {
        if (dom.b_tail_order <= 0.0) return 0.0;
        auto fb = [&](double b) { return angular(a, b) * b * b; };
        auto t = integrate_algebraic_tail(fb, dom.b_max, dom.b_tail_order, inner);
        evals += t.evals;
        tail_err = std::max(tail_err, t.error);
        return t.value;
    };

    // Tensor Gauss-Legendre on the head rectangle at two orders; accepted when they agree.
    auto tensor = [&](int n) {
        const auto& r = gauss_legendre(n);
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            const double a = 0.5 * dom.a_max * (1.0 + r.x[i]);
            double inner_sum = 0.0;
            for (int j = 0; j < n; ++j) {
                const double b = 0.5 * dom.b_max * (1.0 + r.x[j]);
                inner_sum += r.w[j] * angular(a, b) * b * b;
            }
            sum += r.w[i] * inner_sum * a * a;
        }
        evals += static_cast<long>(n) * n;
        return sum * 0.25 * dom.a_max * dom.b_max;
    };
    const double lo = tensor(kTensorLow), hi = tensor(kTensorHigh);
    if (std::abs(hi - lo) <= 0.1 * std::max(tol.abs, tol.rel * std::abs(hi))) {
        double tail = 0.0;
        if (dom.b_tail_order > 0.0) {
            const auto& r = gauss_legendre(kTensorHigh);
            for (int i = 0; i < kTensorHigh; ++i) {
                const double a = 0.5 * dom.a_max * (1.0 + r.x[i]);
                tail += r.w[i] * b_tail(a) * a * a;
            }
            tail *= 0.5 * dom.a_max;
        }
        const double err = std::abs(hi - lo) + tail_err * dom.a_max * dom.a_max * dom.a_max;
        return {kFactor * (hi + tail), kFactor * err, evals, 1};
    }

    double inner_err = 0.0;
    auto b_integral = [&](double a) {
        auto fb = [&](double b) { return angular(a, b) * b * b; };
        auto r = gk21(fb, 0.0, dom.b_max, inner);
        evals += r.evals;
        inner_err = std::max(inner_err, r.error);
        return (r.value + b_tail(a)) * a * a;
    };
    Tolerance outer = tol;
    outer.abs = std::max(tol.abs, 0.1 * tol.rel * scale);
    auto r = gk21(b_integral, 0.0, dom.a_max, outer);
    const double a3 = dom.a_max * dom.a_max * dom.a_max;
    return {kFactor * r.value, kFactor * (r.error + (inner_err + tail_err) * a3), evals, r.intervals};
}

Result<double> integrate_aC(const std::function<double(double, double)>& phi, const AcDomain& dom,
                            const Tolerance& tol)
{
    const double hh = 0.5 * (dom.h_hi - dom.h_lo), hy = 0.5 * (dom.y_hi - dom.y_lo);
    double scale = 0.0;
    auto tensor = [&](int n) {
        const auto& g = gauss_legendre(n);
        double sum = 0.0, mag = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double v = phi(dom.h_lo + hh * (1.0 + g.x[i]), dom.y_lo + hy * (1.0 + g.x[j]));
                sum += g.w[i] * g.w[j] * v;
                mag += g.w[i] * g.w[j] * std::abs(v);
            }
        scale = mag * hh * hy;
        return sum * hh * hy;
    };
    // Tensor Gauss-Legendre at two orders; accepted when they agree, else nested adaptive.
    const double lo = tensor(32), hi = tensor(48);
    long evals = 32 * 32 + 48 * 48;
    if (std::abs(hi - lo) <= 0.1 * std::max(tol.abs, tol.rel * std::abs(hi))) {
        double tail = 0.0, tail_err = 0.0;
        if (dom.y_tail_order > 0.0) {
            Tolerance tt = tol;
            tt.rel = tol.rel * 0.1;
            tt.abs = std::max(tol.abs, 0.01 * tol.rel * scale / std::max(dom.h_hi - dom.h_lo, 1.0));
            const auto& g = gauss_legendre(48);
            for (int i = 0; i < 48; ++i) {
                const double h = dom.h_lo + hh * (1.0 + g.x[i]);
                auto tl = integrate_algebraic_tail([&](double y) { return phi(h, y); }, dom.y_hi, dom.y_tail_order, tt);
                tail += g.w[i] * tl.value;
                tail_err = std::max(tail_err, tl.error);
                evals += tl.evals;
            }
            tail *= hh;
        }
        return {hi + tail, std::abs(hi - lo) + tail_err * (dom.h_hi - dom.h_lo), evals, 1};
    }

    Tolerance inner = tol;
    inner.rel = tol.rel * 0.1;
    inner.abs = std::max(tol.abs, 0.01 * tol.rel * scale / std::max(dom.h_hi - dom.h_lo, 1.0));
    double inner_err = 0.0;
    auto y_integral = [&](double h) {
        auto fy = [&](double y) { return phi(h, y); };
        auto r = gk21(fy, dom.y_lo, dom.y_hi, inner);
        double v = r.value, e = r.error;
        evals += r.evals;
        if (dom.y_tail_order > 0.0) {
            auto tl = integrate_algebraic_tail(fy, dom.y_hi, dom.y_tail_order, inner);
            v += tl.value;
            e += tl.error;
            evals += tl.evals;
        }
        inner_err = std::max(inner_err, e);
        return v;
    };
    Tolerance outer = tol;
    outer.abs = std::max(tol.abs, 0.1 * tol.rel * scale);
    auto r = gk21(y_integral, dom.h_lo, dom.h_hi, outer);
    return {r.value, r.error + inner_err * (dom.h_hi - dom.h_lo), evals, r.intervals};
}

double gaussian_vs_exp_cutoff(double t, double eps)
{
    // b^2/t - 2b = ln(1/eps)
    const double L = std::log(1.0 / eps);
    return t + std::sqrt(t * t + t * L);
}

double smoothed_support_cutoff(double t, double r_eff, double eps)
{
    return r_eff + std::sqrt(t * std::log(1.0 / eps));
}

} // namespace sblab::quad
