#pragma once

#include "sblab/quad.hpp"
#include "sblab/rootsys.hpp"
#include "sblab/specfun.hpp"

#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace sblab {

using cplx = std::complex<double>;

class TruncationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InterpolationRangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// delta(r) on the radial line of a rank-one complex-type space; 1 for the flat case.
[[nodiscard]] double radial_delta(const RootSystemSpec& spec, double r);

/// Radial function of geodesic distance. Closed-form families carry their
/// parameters; sampled profiles use a clamped cubic spline with zero slope at
/// the origin, so the even extension through r = 0 is C^1 with f'(0) = 0.
class RadialProfile {
public:
    enum class Kind { zero, gaussian, gaussian_over_delta, spline_bump, sampled, custom };
    enum class Tail { compact, gaussian };

    RadialProfile();  // the zero profile

    static RadialProfile zero();
    /// e^{-r^2/2s}
    static RadialProfile gaussian(double s);
    /// e^{-r^2/2s} / delta(r), so that delta f is a plain Gaussian.
    static RadialProfile gaussian_over_delta(double s, const RootSystemSpec& spec);
    /// (1 - r^2/rho^2)^m on [0, rho], zero beyond: C^{m-1} at r = rho.
    static RadialProfile spline_bump(double rho = 1.0, int m = 3);
    /// Clamped cubic through (nodes[i], values[i]); nodes[0] must be 0. The
    /// profile is zero beyond support; if support exceeds the last node,
    /// evaluation past the grid throws InterpolationRangeError.
    static RadialProfile sampled(std::vector<double> nodes, std::vector<double> values,
                                 double support = std::numeric_limits<double>::infinity());
    /// Arbitrary radial function. `reach` is the support radius (compact) or
    /// the radius beyond which the function is Gaussian-negligible.
    static RadialProfile custom(std::function<double(double)> f, Tail tail, double reach, std::string tag,
                                int smoothness = 2, double centre = 0.0, double width = 0.0);

    [[nodiscard]] double operator()(double r) const;
    /// delta(r) f(r), formed without dividing where the family allows it.
    [[nodiscard]] double delta_weighted(const RootSystemSpec& spec, double r) const;

    [[nodiscard]] RadialProfile scaled(double k) const;

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] Tail tail() const noexcept { return tail_; }
    /// Support radius (compact) or the radius where the profile falls below ~1e-17 of its peak.
    [[nodiscard]] double reach() const noexcept { return reach_; }
    /// Number of continuous derivatives across the support edge (compact profiles).
    [[nodiscard]] int smoothness() const noexcept { return smoothness_; }
    /// Gaussian variance parameter s (Gaussian tails) or bump radius (spline bump).
    [[nodiscard]] double width() const noexcept { return s_; }
    /// Radius around which the mass of delta f sits (0 for profiles peaked at the origin).
    [[nodiscard]] double centre() const noexcept { return centre_; }
    [[nodiscard]] double scale() const noexcept { return scale_; }
    [[nodiscard]] const std::string& tag() const noexcept { return tag_; }
    [[nodiscard]] const RootSystemSpec* family_spec() const noexcept { return spec_.get(); }

private:
    struct Spline {
        std::vector<double> x, y, m;  // nodes, values, second derivatives
    };

    Kind kind_ = Kind::zero;
    Tail tail_ = Tail::compact;
    double s_ = 0.0;  // gaussian width or bump radius
    int power_ = 0;
    double reach_ = 0.0;
    int smoothness_ = 100;
    double centre_ = 0.0;
    double scale_ = 1.0;
    std::string tag_ = "zero";
    std::shared_ptr<const RootSystemSpec> spec_;
    std::shared_ptr<const Spline> spline_;
    std::shared_ptr<const std::function<double(double)>> fn_;
};

// Odd function on the line, given on [0, support) and extended by oddness.
// `centre` bounds the location of the bulk of |h| for non-compact h.
struct OddFunction {
    std::function<double(double)> h;
    double support = std::numeric_limits<double>::infinity();
    double centre = 0.0;
};

/// e^{-shift} (2 pi t)^{-1/2} 2 int_0^inf e^{-s^2/2t} h(s) sinh(w s/t)/w ds as a
/// function of w^2, exponents folded so nothing overflows when
/// Re(shift) ~ (Re w)^2/2t. Integration window
/// s <= min(support, max(|Re w|, centre) + sqrt(2t 38)).
[[nodiscard]] cplx reduced_heat_integral(const OddFunction& h, double t, cplx w2, cplx shift = 0.0,
                                         const quad::Tolerance& tol = {});

inline constexpr int kBatchOrder = 24;
inline constexpr double kBatchRadians = 16.0;

/// reduced_heat_integral at many points through one composite Gauss-Legendre
/// rule (order kBatchOrder per panel) on the common window. Panels span at most
/// 3 sqrt(t) and 2 kBatchRadians of the fastest oscillation max|Im w|/t, so h
/// must be smooth on its window; h is evaluated once per node.
[[nodiscard]] std::vector<cplx> reduced_heat_integral_batch(const OddFunction& h, double t, const std::vector<cplx>& w2,
                                                            const std::vector<double>& shift);

/// One-dimensional heat evolution of an odd function at complex z.
[[nodiscard]] cplx heat1d_complex(const OddFunction& h, double t, cplx z, const quad::Tolerance& tol = {});

/// heat1d_complex(h, t, z) e^{-(Im z)^2/2t}; stays bounded where the unscaled value grows.
[[nodiscard]] cplx heat1d_complex_scaled(const OddFunction& h, double t, cplx z, const quad::Tolerance& tol = {});

/// Radial heat evolution on R^3 of u0, continued to complex radius squared w2.
[[nodiscard]] cplx heat3d_radial_complex(const RadialProfile& u0, double t, ComplexRadiusSquared w2,
                                         const quad::Tolerance& tol = {});

/// G(w) = (delta F)(w) for F = e^{t Delta/2} f. Built from h(s) = s delta(s) f(s).
class HoloRadialExtension {
public:
    HoloRadialExtension(RadialProfile f, double t, const RootSystemSpec& spec, const quad::Tolerance& tol = {});

    [[nodiscard]] double t() const noexcept { return t_; }
    [[nodiscard]] double c() const noexcept { return c_; }
    [[nodiscard]] const RadialProfile& profile() const noexcept { return f_; }
    [[nodiscard]] const OddFunction& base() const noexcept { return h_; }
    [[nodiscard]] const RootSystemSpec& spec() const noexcept { return spec_; }

    /// G at complex radius squared.
    [[nodiscard]] cplx operator()(cplx w2) const;
    /// e^{-shift} e^{w2/2t} e^{ct/2} G(w2): the bare reduced integral.
    [[nodiscard]] cplx reduced(cplx w2, cplx shift = 0.0) const;
    /// reduced() at many points with real shifts, through the shared fixed rule.
    [[nodiscard]] std::vector<cplx> reduced_batch(const std::vector<cplx>& w2, const std::vector<double>& shift) const;
    /// G(ib) e^{-b^2/2t}, the inversion integrand without the b^2 measure.
    [[nodiscard]] double imaginary_slice_damped(double b) const;
    /// F on the real slice, G(r)/delta(r).
    [[nodiscard]] double real_slice(double r) const;

private:
    RadialProfile f_;
    double t_;
    RootSystemSpec spec_;
    double c_;
    OddFunction h_;
    quad::Tolerance tol_;
};

[[nodiscard]] HoloRadialExtension sb_radial_extension(const RadialProfile& f, double t, const RootSystemSpec& spec,
                                                      const quad::Tolerance& tol = {});

/// H^3 heat kernel e^{-t/2} (2 pi t)^{-3/2} (r/sinh r) e^{-r^2/2t}.
[[nodiscard]] double h3_heat_kernel(double r, double t);

/// Heat evolution on H^3 by direct kernel convolution (geodesic polar
/// coordinates about the centre, angular integral done numerically).
[[nodiscard]] double h3_heat_evolve(const RadialProfile& f, double t, double r, const quad::Tolerance& tol = {});

[[nodiscard]] double gangolli_fiber_density(const Vec3& Y, double t, const RootSystemSpec& spec);
[[nodiscard]] double sigma_density(const Vec3& Y, double t);

// S^3 heat kernels as functions of the angle from the identity. A truncation
// of 0 selects the tail-bound rule automatically.
[[nodiscard]] int s3_lattice_truncation(double t);
[[nodiscard]] int s3_mode_truncation(double t);
[[nodiscard]] double s3_heat_theta(double theta, double t, int n_lattice = 0);
[[nodiscard]] double s3_heat_spectral(double theta, double t, int n_modes = 0);
[[nodiscard]] double pushforward_sigma(double theta, double t, int n_lattice = 0);

} // namespace sblab
