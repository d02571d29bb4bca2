#pragma once

#include <complex>

namespace sblab {

using cplx = std::complex<double>;

// sinh(z)/z and sin(z)/z are entire and even. Below the switch radius they are
// summed as the even power series in z^2; above it the closed form is used.
inline constexpr double kSeriesSwitchRadius = 0.5;
inline constexpr int kSeriesTerms = 10;

namespace detail {

// sum_{k<kSeriesTerms} sign^k z2^k / (2k+1)!, Horner form.
inline cplx even_series(cplx z2, double sign) noexcept
{
    cplx acc = 1.0;
    for (int k = kSeriesTerms - 1; k >= 1; --k) {
        acc = 1.0 + sign * z2 * acc / (static_cast<double>(2 * k) * static_cast<double>(2 * k + 1));
    }
    return acc;
}

} // namespace detail

[[nodiscard]] inline cplx sinhc(cplx z) noexcept
{
    if (std::abs(z) < kSeriesSwitchRadius) return detail::even_series(z * z, 1.0);
    return std::sinh(z) / z;
}

[[nodiscard]] inline cplx sinc(cplx z) noexcept
{
    if (std::abs(z) < kSeriesSwitchRadius) return detail::even_series(z * z, -1.0);
    return std::sin(z) / z;
}

[[nodiscard]] inline double sinhc(double x) noexcept
{
    if (x < kSeriesSwitchRadius && x > -kSeriesSwitchRadius) return detail::even_series(x * x, 1.0).real();
    return std::sinh(x) / x;
}

[[nodiscard]] inline double sinc(double x) noexcept
{
    if (x < kSeriesSwitchRadius && x > -kSeriesSwitchRadius) return detail::even_series(x * x, -1.0).real();
    return std::sin(x) / x;
}

/// sinh(w)/w as a function of w^2. Any square root gives the same value, so no
/// branch is ever chosen by the caller.
[[nodiscard]] inline cplx sinhc_of_square(cplx w2) noexcept
{
    if (std::abs(w2) < kSeriesSwitchRadius * kSeriesSwitchRadius) return detail::even_series(w2, 1.0);
    const cplx w = std::sqrt(w2);
    return std::sinh(w) / w;
}

} // namespace sblab
