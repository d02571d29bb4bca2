#pragma once

#include "sblab/heat.hpp"

#include <stdexcept>
#include <vector>

namespace sblab {

class SingularRegionError : public std::runtime_error {
public:
    SingularRegionError(const std::string& what, double radius) : std::runtime_error(what), radius_(radius) {}
    [[nodiscard]] double radius() const noexcept { return radius_; }

private:
    double radius_;
};

// A function radial about a centre x1 at distance ell from the evaluation point x.
struct OffsetRadialFunction {
    double ell = 0.0;
    RadialProfile profile;

    /// f(x): the profile at distance ell.
    [[nodiscard]] double value_at_x() const { return profile(ell); }
};

inline constexpr int kKxOrder = 64;

/// Radial part of f about x: r -> (1/2) int_{-1}^{1} f(d(r, u)) du, the
/// stabiliser average on H^3. Compact profiles restrict u to the support.
[[nodiscard]] RadialProfile kx_average(const OffsetRadialFunction& f, int order = kKxOrder);

/// Operational "R -> infinity": sqrt(80 t) + 10.
[[nodiscard]] double r_max(double t);

/// Radial inversion at the basepoint:
/// e^{ct/2} (2 pi t)^{-3/2} 4 pi int_0^inf G(ib) e^{-b^2/2t} b^2 db.
[[nodiscard]] double invert_radial_at_basepoint(const RadialProfile& f, double t, const RootSystemSpec& spec,
                                                const quad::Tolerance& tol = {});

/// The same integral over lo <= b <= hi.
[[nodiscard]] double invert_radial_between(const HoloRadialExtension& G, double lo, double hi,
                                           const quad::Tolerance& tol = {});

/// Same integral truncated at R.
[[nodiscard]] double invert_radial_truncated(const HoloRadialExtension& G, double R,
                                             const quad::Tolerance& tol = {});

/// Radius where the literal tube integrand first meets |delta| < 1e-10 or
/// the arccosh cut, found by bisection on the u = 0 ray.
[[nodiscard]] double singular_radius(double ell);

/// Literal L(x, R) over the ball |Y| <= R, continuing F through the
/// complexified distance. Throws SingularRegionError when R reaches the
/// singular radius or a node has |delta| < 1e-10. H^3 only.
[[nodiscard]] double tube_functional_small_R(const OffsetRadialFunction& f, double t, double R,
                                             const quad::Tolerance& tol = {});

/// L(x, R) through the radialised extension; defined for every R > 0.
[[nodiscard]] double tube_functional_continued(const OffsetRadialFunction& f, double t, double R,
                                               const quad::Tolerance& tol = {});

/// L at increasing radii in one cumulative pass.
[[nodiscard]] std::vector<double> tube_functional_sweep(const HoloRadialExtension& Gx, std::vector<double> radii,
                                                        const quad::Tolerance& tol = {});

/// (eta F)(z) on a_C for radial f; odd and entire in z.
[[nodiscard]] cplx sb_aC_extension(const RadialProfile& f, double t, cplx z, const RootSystemSpec& spec,
                                   const quad::Tolerance& tol = {});

/// (eta F)(z) e^{-(Im z)^2/2t}.
[[nodiscard]] cplx sb_aC_extension_scaled(const RadialProfile& f, double t, cplx z, const RootSystemSpec& spec,
                                          const quad::Tolerance& tol = {});

} // namespace sblab
