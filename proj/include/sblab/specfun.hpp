#pragma once

#include <array>
#include <complex>

namespace sblab {

using Vec3 = std::array<double, 3>;

// The Ad-K_C invariant w^2 = (X + iY).(X + iY) of a point of p_C.
struct ComplexRadiusSquared {
    std::complex<double> value;
};

[[nodiscard]] ComplexRadiusSquared complex_invariant(const Vec3& X, const Vec3& Y);

/// sinh(w)/w on H^3 as a function of w^2; branch-free.
[[nodiscard]] std::complex<double> delta_h3(ComplexRadiusSquared w2);

/// cosh(ell) cosh(r) - sinh(ell) sinh(r) u. Returns cosh(r) exactly when ell == 0.
[[nodiscard]] std::complex<double> hyperbolic_cos_distance(double ell, std::complex<double> r, double u);

/// Square of the principal arccosh. arccosh^2 is single-valued away from the
/// cut (-inf, -1], and the functions composed with it here are even.
[[nodiscard]] std::complex<double> arccosh_squared(std::complex<double> zeta);

} // namespace sblab
