#include "sblab/specfun.hpp"

#include "sblab/sinhc.hpp"

#include <cmath>

namespace sblab {

ComplexRadiusSquared complex_invariant(const Vec3& X, const Vec3& Y)
{
    double xx = 0.0, yy = 0.0, xy = 0.0;
    for (int k = 0; k < 3; ++k) {
        xx += X[k] * X[k];
        yy += Y[k] * Y[k];
        xy += X[k] * Y[k];
    }
    return {{xx - yy, 2.0 * xy}};
}

std::complex<double> delta_h3(ComplexRadiusSquared w2) { return sinhc_of_square(w2.value); }

std::complex<double> hyperbolic_cos_distance(double ell, std::complex<double> r, double u)
{
    if (ell == 0.0) return std::cosh(r);
    return std::cosh(ell) * std::cosh(r) - std::sinh(ell) * std::sinh(r) * u;
}

std::complex<double> arccosh_squared(std::complex<double> zeta)
{
    // acosh(1+e)^2 = 2e - e^2/3 + 4e^3/45 - e^4/35 + 16e^5/1575 - ...
    const std::complex<double> e = zeta - 1.0;
    if (std::abs(e) < 1e-3) {
        return e * (2.0 + e * (-1.0 / 3.0 + e * (4.0 / 45.0 + e * (-1.0 / 35.0 + e * (16.0 / 1575.0)))));
    }
    const std::complex<double> w = std::acosh(zeta);
    return w * w;
}

} // namespace sblab
