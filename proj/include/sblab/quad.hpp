#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace sblab::quad {

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double best_value, double error_estimate)
        : std::runtime_error(what), best_value_(best_value), error_estimate_(error_estimate) {}

    [[nodiscard]] double best_value() const noexcept { return best_value_; }
    [[nodiscard]] double error_estimate() const noexcept { return error_estimate_; }

private:
    double best_value_;
    double error_estimate_;
};

enum class RuleKind { gauss_legendre, gauss_kronrod_adaptive, tanh_sinh };

struct Tolerance {
    double abs = 1e-15;
    double rel = 1e-12;
    int max_intervals = 4000;
};

template <class T>
struct Result {
    T value{};
    double error = 0.0;
    long evals = 0;
    int intervals = 0;
};

inline double magnitude(double x) noexcept { return std::abs(x); }
inline double magnitude(std::complex<double> z) noexcept { return std::abs(z); }

namespace detail {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208067703200, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
// Gauss weights for the odd-indexed Kronrod nodes 1,3,5,7,9.
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <class T>
struct Segment {
    double a, b;
    T value;
    double error;
    double l1;
};

template <class T, class F>
Segment<T> gk21_segment(F& f, double a, double b)
{
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const T fc = f(c);
    T resk = fc * kWgk[10];
    T resg{};
    double resabs = kWgk[10] * magnitude(fc);
    std::array<T, 10> f1{}, f2{};
    for (int j = 0; j < 10; ++j) {
        const double dx = h * kXgk[j];
        f1[j] = f(c - dx);
        f2[j] = f(c + dx);
        const T s = f1[j] + f2[j];
        resk += kWgk[j] * s;
        resabs += kWgk[j] * (magnitude(f1[j]) + magnitude(f2[j]));
        if (j % 2 == 1) resg += kWg[j / 2] * s;
    }
    const T mean = resk * 0.5;
    double resasc = kWgk[10] * magnitude(fc - mean);
    for (int j = 0; j < 10; ++j) resasc += kWgk[j] * (magnitude(f1[j] - mean) + magnitude(f2[j] - mean));

    const double ah = std::abs(h);
    double err = magnitude((resk - resg) * h);
    resasc *= ah;
    resabs *= ah;
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
    return {a, b, resk * h, err, resabs};
}

} // namespace detail

/// Global adaptive Gauss-Kronrod (21 points) starting from `initial_panels`
/// equal panels. Bisects the segment with the largest error until the summed
/// error meets the tolerance. A floor of
/// 100 eps times the L1 mass stops refinement once cancellation dominates.
template <class T = double, class F>
Result<T> gk21(F&& f, double a, double b, const Tolerance& tol = {}, int initial_panels = 1)
{
    using Seg = detail::Segment<T>;
    if (a == b) return {};
    initial_panels = std::clamp(initial_panels, 1, std::max(1, tol.max_intervals / 2));
    auto worse = [](const Seg& x, const Seg& y) {
        if (x.error != y.error) return x.error < y.error;
        return x.a > y.a;
    };
    std::priority_queue<Seg, std::vector<Seg>, decltype(worse)> heap(worse);
    T total{};
    double err = 0.0, l1 = 0.0;
    long evals = 0;
    const double step = (b - a) / initial_panels;
    for (int k = 0; k < initial_panels; ++k) {
        const double lo = a + k * step, hi = k + 1 == initial_panels ? b : a + (k + 1) * step;
        Seg s = detail::gk21_segment<T>(f, lo, hi);
        total += s.value;
        err += s.error;
        l1 += s.l1;
        evals += 21;
        heap.push(s);
    }
    const double floor_rel = 100.0 * std::numeric_limits<double>::epsilon();
    auto done = [&] {
        const double target = std::max({tol.abs, tol.rel * magnitude(total), floor_rel * l1});
        return err <= target;
    };
    while (!done()) {
        if (static_cast<int>(heap.size()) >= tol.max_intervals) {
            throw QuadratureError("adaptive Gauss-Kronrod budget exhausted",
                                  magnitude(total), err);
        }
        Seg s = heap.top();
        heap.pop();
        const double m = 0.5 * (s.a + s.b);
        Seg left = detail::gk21_segment<T>(f, s.a, m);
        Seg right = detail::gk21_segment<T>(f, m, s.b);
        evals += 42;
        total += (left.value + right.value) - s.value;
        err += (left.error + right.error) - s.error;
        l1 += (left.l1 + right.l1) - s.l1;
        heap.push(left);
        heap.push(right);
    }
    // Resum in interval order so the value does not depend on the update history.
    std::vector<Seg> segs;
    segs.reserve(heap.size());
    while (!heap.empty()) {
        segs.push_back(heap.top());
        heap.pop();
    }
    std::sort(segs.begin(), segs.end(), [](const Seg& x, const Seg& y) { return x.a < y.a; });
    T sum{};
    double esum = 0.0;
    for (const auto& s : segs) {
        sum += s.value;
        esum += s.error;
    }
    return {sum, esum, evals, static_cast<int>(segs.size())};
}

/// Gauss-Legendre nodes and weights on [-1, 1]; cached per order.
struct GaussLegendre {
    std::vector<double> x;
    std::vector<double> w;
};

const GaussLegendre& gauss_legendre(int n);

template <class T = double, class F>
T gl_integrate(F&& f, double a, double b, int n)
{
    const auto& r = gauss_legendre(n);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    T sum{};
    for (int i = 0; i < n; ++i) sum += r.w[i] * f(c + h * r.x[i]);
    return sum * h;
}

Result<double> tanh_sinh(const std::function<double(double)>& f, double a, double b, const Tolerance& tol = {});

/// Dispatch on rule kind. Gauss-Legendre uses `order` nodes and reports no error estimate.
Result<double> integrate_1d(const std::function<double(double)>& f, double a, double b, RuleKind kind,
                            const Tolerance& tol = {}, int order = 64);

/// Wynn epsilon extrapolation of a sequence of partial sums. Returns the
/// estimate and writes a conservative error (spread of the last estimates).
double wynn_epsilon(const std::vector<double>& partial_sums, double* error = nullptr);

/// Integral over [a, inf) of an oscillatory integrand with period-like
/// spacing `cycle`: integrates consecutive cycles and accelerates the partial
/// sums with Wynn's epsilon algorithm.
Result<double> integrate_oscillatory_tail(const std::function<double(double)>& f, double a, double cycle,
                                          const Tolerance& tol = {}, int max_cycles = 200);

/// Integral over [a, inf) of a non-oscillating integrand with algebraic decay
/// of order at least p (|f| <~ x^-p): doubling intervals, stopped when the
/// geometric tail bound piece/(2^(p-1) - 1) drops below the tolerance. The
/// bound of the remainder is added as a correction and reported as error.
Result<double> integrate_algebraic_tail(const std::function<double(double)>& f, double a, double p,
                                        const Tolerance& tol = {}, int max_doublings = 40);

/// Chebyshev interpolant on [a, b] through n Chebyshev-Lobatto points.
class Chebyshev {
public:
    Chebyshev(const std::function<double(double)>& f, double a, double b, int n);
    Chebyshev(std::vector<double> values_at_nodes, double a, double b);

    [[nodiscard]] double operator()(double x) const;
    [[nodiscard]] double derivative(double x) const;
    [[nodiscard]] double node(int k) const;
    [[nodiscard]] int size() const noexcept { return static_cast<int>(coef_.size()); }
    [[nodiscard]] const std::vector<double>& coefficients() const noexcept { return coef_; }

private:
    void fit(const std::vector<double>& v);
    double a_, b_;
    std::vector<double> coef_;
};

// Ad-K reduced integral over p_C = R^3 x R^3 for integrands depending on
// a = |X|, b = |Y| and u = cos(angle(X, Y)):
//   int_{R^6} = 8 pi^2 int_0^inf int_0^inf int_{-1}^{1} Phi(a, b, u) a^2 b^2 du db da.
struct PcDomain {
    double a_max;
    double b_max;
    double b_tail_order = 0.0;  // > 0: extend b beyond b_max with an algebraic tail of this order
    int u_order = 96;
};

Result<double> integrate_pc_reduced(const std::function<double(double, double, double)>& phi, const PcDomain& dom,
                                    const Tolerance& tol = {});

/// Same reduction with the caller supplying the angular integral
/// int_{-1}^{1} Phi(a, b, u) du (Gauss-Legendre of order dom.u_order).
Result<double> integrate_pc_reduced_angular(const std::function<double(double, double)>& angular, const PcDomain& dom,
                                            const Tolerance& tol = {});

// 2-D integral over a_C = R^2 of Phi(H, Y); the caller passes the rectangle.
struct AcDomain {
    double h_lo, h_hi;
    double y_lo, y_hi;
    double y_tail_order = 0.0;  // > 0: extend Y beyond y_hi with an algebraic tail of this order
};

Result<double> integrate_aC(const std::function<double(double, double)>& phi, const AcDomain& dom,
                            const Tolerance& tol = {});

/// Cutoff b_max with exp(-b^2/t + 2b) < eps.
double gaussian_vs_exp_cutoff(double t, double eps = 1e-16);

/// Cutoff r_eff + sqrt(t ln(1/eps)) for a profile of effective radius r_eff after heat smoothing.
double smoothed_support_cutoff(double t, double r_eff, double eps = 1e-16);

} // namespace sblab::quad
