#include "sblab/harness.hpp"

#include "sblab/heat.hpp"
#include "sblab/quad.hpp"
#include "sblab/rootsys.hpp"
#include "sblab/sinhc.hpp"
#include "sblab/transform.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <set>

namespace sblab {

using json = nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;
// ln(1e16): every truncation below leaves a tail under 1e-16 of the peak.
const double kLogEps = std::log(1e16);

class Stopwatch {
public:
    [[nodiscard]] double ms() const
    {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::vector<double> t_grid(const ExperimentConfig& cfg, std::vector<double> fallback)
{
    return cfg.t.empty() ? fallback : cfg.t;
}

std::vector<double> widths(const ExperimentConfig& cfg)
{
    return cfg.s.empty() ? std::vector<double>{0.5, 1.0} : cfg.s;
}

VerificationReport named(const std::string& id)
{
    VerificationReport r;
    r.experiment = id;
    return r;
}

bool wants(const ExperimentConfig& cfg, const std::string& tag) { return cfg.family.empty() || cfg.family == tag; }

struct Family {
    std::string tag;
    double s = 0.0;  // Gaussian width; 0 for the spline
    RadialProfile f;

    [[nodiscard]] json params() const
    {
        json p = {{"family", tag}};
        if (tag == "gaussian") p["s"] = s;
        return p;
    }
};

// Gaussian-over-delta widths and the C^2 spline bump, filtered by cfg.family.
std::vector<Family> families(const ExperimentConfig& cfg, const RootSystemSpec& spec)
{
    std::vector<Family> out;
    if (wants(cfg, "gaussian"))
        for (double s : widths(cfg)) out.push_back({"gaussian", s, RadialProfile::gaussian_over_delta(s, spec)});
    if (wants(cfg, "spline")) out.push_back({"spline", 0.0, RadialProfile::spline_bump(1.0, 3)});
    return out;
}

json with(json base, const json& extra)
{
    for (auto it = extra.begin(); it != extra.end(); ++it) base[it.key()] = it.value();
    return base;
}

// Cutoffs for |G(a + ib)|^2 e^{-b^2/t}-type integrands.
struct Cutoffs {
    double a_max;
    double b_max;
    double tail_order;  // algebraic b-tail beyond b_max (compact families)
};

Cutoffs cutoffs(const Family& fam, double t)
{
    const double b_general = quad::gaussian_vs_exp_cutoff(t);
    if (fam.tag == "gaussian") {
        // delta f is a Gaussian of variance s: |G|^2 e^{-b^2/t} ~ exp(-a^2/(s+t) - b^2 s/(t(s+t))).
        const double s = fam.s;
        return {std::sqrt((s + t) * kLogEps), std::max(b_general, std::sqrt(t * (s + t) / s * kLogEps)), 0.0};
    }
    // C^2 bump: the Fourier-type decay of |G|^2 b^2 in b is of order 8.
    return {quad::smoothed_support_cutoff(t, fam.f.reach()), b_general, 8.0};
}

// LHS of the radial H^3 isometry: 4 pi int |f|^2 sinh^2 r dr.
double h3_norm_squared(const RadialProfile& f)
{
    const double hi = f.reach();
    auto g = [&](double r) {
        const double v = f(r) * std::sinh(r);
        return v * v;
    };
    return 4.0 * kPi * quad::gk21(g, 0.0, hi, {0.0, 1e-13}, 8).value;
}

// -------------------------------------------------------------------- Euclid

// C_t f(x0 + iy) e^{-y^2/2t} for an even f on the line, on the fixed panel rule
// used for the reduced integrals (panels resolve sqrt(t) and the frequency y/t).
cplx euclid1_scaled(const RadialProfile& f, double t, double x0, double y)
{
    const double w = std::sqrt(2.0 * t * 38.0);
    const double lo = std::max(x0 - w, -f.reach()), hi = std::min(x0 + w, f.reach());
    if (hi <= lo) return 0.0;
    double half = std::min(1.5 * std::sqrt(t), 1.5);
    if (y != 0.0) half = std::min(half, kBatchRadians * t / std::abs(y));
    const int panels = static_cast<int>(std::ceil((hi - lo) / (2.0 * half)));
    const double hw = (hi - lo) / (2.0 * panels);
    const auto& gl = quad::gauss_legendre(kBatchOrder);
    cplx sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double c = lo + (2 * p + 1) * hw;
        for (int j = 0; j < kBatchOrder; ++j) {
            const double x = c + hw * gl.x[static_cast<std::size_t>(j)];
            const double d = x0 - x;
            sum += gl.w[static_cast<std::size_t>(j)] * std::exp(-d * d / (2.0 * t)) * f(std::abs(x)) *
                   std::polar(1.0, -y * d / t);
        }
    }
    return sum * hw / std::sqrt(2.0 * kPi * t);
}

double euclid1_norm_closed(const Family& fam)
{
    if (fam.tag == "gaussian") return std::sqrt(kPi * fam.s);
    // int_{-1}^{1} (1 - x^2)^6 dx = 2 * 2^12 (6!)^2 / 13!
    return 2.0 * 4096.0 * 518400.0 / 6227020800.0;
}

double euclid3_norm_closed(const Family& fam)
{
    if (fam.tag == "gaussian") return std::pow(kPi * fam.s, 1.5);
    // 4 pi int_0^1 r^2 (1 - r^2)^6 dr = 2 pi Gamma(3/2) Gamma(7) / Gamma(17/2)
    return 2.0 * kPi * std::tgamma(1.5) * std::tgamma(7.0) / std::tgamma(8.5);
}

double euclid1_isometry_rhs(const Family& fam, double t, json& diag)
{
    const Cutoffs cut = cutoffs(fam, t);
    const double y_max = fam.tag == "gaussian" ? cut.b_max : 8.0;
    quad::AcDomain dom{0.0, cut.a_max, 0.0, y_max, cut.tail_order};
    auto phi = [&](double x, double y) { return std::norm(euclid1_scaled(fam.f, t, x, y)); };
    const auto r = quad::integrate_aC(phi, dom, {0.0, 1e-11});
    diag.push_back({{"d", 1}, {"family", fam.tag}, {"t", t}, {"x_max", cut.a_max}, {"y_max", y_max},
                    {"evals", r.evals}, {"error", 4.0 * r.error / std::sqrt(kPi * t)}});
    return 4.0 * r.value / std::sqrt(kPi * t);
}

double euclid1_inversion(const Family& fam, double t)
{
    auto g = [&](double y) { return euclid1_scaled(fam.f, t, 0.0, y).real(); };
    const double pref = 2.0 / std::sqrt(2.0 * kPi * t);
    if (fam.tag == "gaussian") {
        const double y_max = std::sqrt(2.0 * t * (fam.s + t) / fam.s * kLogEps);
        return pref * quad::gk21(g, 0.0, y_max, {0.0, 1e-13}, 4).value;
    }
    const double half = kPi * t / fam.f.reach();
    const double y0 = half * std::ceil(r_max(t) / half);
    const double head = quad::gk21(g, 0.0, y0, {0.0, 1e-13}, 1 + static_cast<int>(y0 / half)).value;
    const auto tail = quad::integrate_oscillatory_tail(g, y0, half, {1e-15, 1e-12});
    return pref * (head + tail.value);
}

// |G|^2 e^{-b^2/t} e^{ct} / (pi t)^{3/2} over p_C, from the bare reduced integral.
// |G|^2 is even in u = cos(angle): w^2(-u) is the conjugate of w^2(u) and h is real,
// so the order-96 angular rule needs only its positive nodes.
quad::Result<double> pc_isometry_rhs(const HoloRadialExtension& G, const Cutoffs& cut, double rel)
{
    const double t = G.t(), c = G.c();
    const double norm = std::exp(c * t) / std::pow(kPi * t, 1.5) * std::exp(-c * t);
    quad::PcDomain dom{cut.a_max, cut.b_max, cut.tail_order};
    const auto& gl = quad::gauss_legendre(dom.u_order);
    const int half = dom.u_order / 2;
    std::vector<cplx> w2(static_cast<std::size_t>(half));
    std::vector<double> shift(static_cast<std::size_t>(half));
    auto angular = [&](double a, double b) {
        for (int i = 0; i < half; ++i) {
            const double u = gl.x[static_cast<std::size_t>(half + i)];
            w2[static_cast<std::size_t>(i)] = cplx(a * a - b * b, 2.0 * a * b * u);
            shift[static_cast<std::size_t>(i)] = a * a / (2.0 * t);
        }
        const auto r = G.reduced_batch(w2, shift);
        double sum = 0.0;
        for (int i = 0; i < half; ++i) sum += gl.w[static_cast<std::size_t>(half + i)] * std::norm(r[static_cast<std::size_t>(i)]);
        return 2.0 * norm * sum;
    };
    auto r = quad::integrate_pc_reduced_angular(angular, dom, {0.0, rel});
    r.evals *= dom.u_order;
    return r;
}

} // namespace

// ---------------------------------------------------------------- reports

void VerificationReport::add(json params, double lhs, double rhs, double tolerance, std::optional<double> scale)
{
    ReportRow row;
    row.experiment = experiment;
    row.params = std::move(params);
    row.lhs = lhs;
    row.rhs = rhs;
    row.abs_err = std::abs(lhs - rhs);
    const double target = scale ? std::abs(*scale) : std::abs(rhs);
    row.absolute = target < 1e-8;
    row.rel_err = row.absolute ? row.abs_err : row.abs_err / target;
    row.tolerance = tolerance;
    row.pass = (row.absolute ? row.abs_err : row.rel_err) <= tolerance;
    rows.push_back(std::move(row));
}

void VerificationReport::override_tolerance(double tol)
{
    for (auto& r : rows) {
        r.tolerance = tol;
        r.pass = (r.absolute ? r.abs_err : r.rel_err) <= tol;
    }
}

bool VerificationReport::all_pass() const { return failed() == 0; }

int VerificationReport::passed() const
{
    return static_cast<int>(std::count_if(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; }));
}

int VerificationReport::failed() const { return static_cast<int>(rows.size()) - passed(); }

int RunSummary::passed() const
{
    int n = 0;
    for (const auto& r : reports) n += r.passed();
    return n;
}

int RunSummary::failed() const
{
    int n = 0;
    for (const auto& r : reports) n += r.failed();
    return n;
}

// ----------------------------------------------------------------- config

const std::vector<std::string>& experiment_ids()
{
    static const std::vector<std::string> ids = {"euclid", "unwrap", "isometry-pc", "isometry-ac",
                                                 "invert-radial", "invert-general", "intertwine", "s3-compact"};
    return ids;
}

void ExperimentConfig::validate() const
{
    const auto& ids = experiment_ids();
    if (experiment != "all" && std::find(ids.begin(), ids.end(), experiment) == ids.end())
        throw ConfigError("unknown experiment id: " + experiment);
    for (double v : t)
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("t values must be positive and finite");
    if (family != "" && family != "gaussian" && family != "spline")
        throw ConfigError("family must be gaussian or spline");
    for (double v : s)
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("widths s must be positive and finite");
    if (!(ell >= 0.0) || !std::isfinite(ell)) throw ConfigError("ell must be nonnegative and finite");
    if (n_lattice < 0 || m_modes < 0) throw ConfigError("truncations must be nonnegative (0 selects the rule)");
    if (r_grid < 8 || r_grid > 400) throw ConfigError("r_grid must lie in [8, 400]");
    if (tol && (!(*tol >= 0.0) || !std::isfinite(*tol))) throw ConfigError("tol must be nonnegative and finite");
}

namespace {

std::vector<double> number_or_list(const json& v, const char* key)
{
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array()) throw ConfigError(std::string(key) + " must be a number or a list of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw ConfigError(std::string(key) + " must contain numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

} // namespace

ExperimentConfig config_from_json(const json& j)
{
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    static const std::set<std::string> known = {"experiment", "t", "family", "s", "ell", "n_lattice",
                                                "m_modes", "r_grid", "tol", "out", "seed"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key())) throw ConfigError("unknown config field: " + it.key());
    ExperimentConfig c;
    try {
        if (j.contains("experiment")) c.experiment = j.at("experiment").get<std::string>();
        if (j.contains("t")) c.t = number_or_list(j.at("t"), "t");
        if (j.contains("family")) c.family = j.at("family").get<std::string>();
        if (j.contains("s")) c.s = number_or_list(j.at("s"), "s");
        if (j.contains("ell")) c.ell = j.at("ell").get<double>();
        if (j.contains("n_lattice")) c.n_lattice = j.at("n_lattice").get<int>();
        if (j.contains("m_modes")) c.m_modes = j.at("m_modes").get<int>();
        if (j.contains("r_grid")) c.r_grid = j.at("r_grid").get<int>();
        if (j.contains("tol") && !j.at("tol").is_null()) c.tol = j.at("tol").get<double>();
        if (j.contains("out")) c.out = j.at("out").get<std::string>();
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    c.validate();
    return c;
}

json config_to_json(const ExperimentConfig& c)
{
    json j = {{"experiment", c.experiment}, {"t", c.t},           {"family", c.family},
              {"s", c.s},                   {"ell", c.ell},       {"n_lattice", c.n_lattice},
              {"m_modes", c.m_modes},       {"r_grid", c.r_grid}, {"out", c.out},
              {"seed", c.seed}};
    j["tol"] = c.tol ? json(*c.tol) : json(nullptr);
    return j;
}

// ------------------------------------------------------------ experiments

VerificationReport verify_euclid_baseline(const ExperimentConfig& cfg)
{
    VerificationReport rep = named("euclid");
    const Stopwatch sw;
    constexpr double kTol = 1e-8;
    const RootSystemSpec flat3 = RootSystemSpec::euclidean(3);
    json quad_diag = json::array();
    ExperimentConfig one = cfg;
    if (one.s.empty()) one.s = {1.0};
    for (double t : t_grid(cfg, {0.25, 1.0})) {
        for (const Family& fam : families(one, flat3)) {
            const json p1 = with(fam.params(), {{"d", 1}, {"t", t}});
            Stopwatch q;
            rep.add(with(p1, {{"identity", "isometry"}}), euclid1_norm_closed(fam),
                    euclid1_isometry_rhs(fam, t, quad_diag), kTol);
            quad_diag.back()["ms"] = q.ms();
            q = Stopwatch();
            rep.add(with(p1, {{"identity", "inversion"}}), euclid1_inversion(fam, t), fam.f(0.0), kTol);
            quad_diag.push_back({{"d", 1}, {"family", fam.tag}, {"t", t}, {"inversion_ms", q.ms()}});

            const json p3 = with(fam.params(), {{"d", 3}, {"t", t}});
            const HoloRadialExtension G(fam.f, t, flat3, {1e-300, 1e-13});
            q = Stopwatch();
            const auto rhs = pc_isometry_rhs(G, cutoffs(fam, t), 1e-9);
            quad_diag.push_back({{"d", 3}, {"family", fam.tag}, {"t", t}, {"evals", rhs.evals}, {"error", rhs.error},
                                 {"ms", q.ms()}});
            rep.add(with(p3, {{"identity", "isometry"}}), euclid3_norm_closed(fam), rhs.value, kTol);
            q = Stopwatch();
            rep.add(with(p3, {{"identity", "inversion"}}), invert_radial_at_basepoint(fam.f, t, flat3), fam.f(0.0),
                    kTol);
            quad_diag.push_back({{"d", 3}, {"family", fam.tag}, {"t", t}, {"inversion_ms", q.ms()}});
        }
    }
    const RadialProfile zero = RadialProfile::zero();
    rep.add({{"family", "zero"}, {"d", 3}, {"identity", "inversion"}}, invert_radial_at_basepoint(zero, 1.0, flat3),
            0.0, kTol);
    {
        const HoloRadialExtension G(zero, 1.0, flat3);
        const auto rhs = pc_isometry_rhs(G, {4.0, 4.0, 0.0}, 1e-10);
        rep.add({{"family", "zero"}, {"d", 3}, {"identity", "isometry"}}, 0.0, rhs.value, kTol);
    }
    rep.diagnostics["quadrature"] = quad_diag;
    rep.wall_ms = sw.ms();
    return rep;
}

VerificationReport verify_isometry_pc(const ExperimentConfig& cfg)
{
    VerificationReport rep = named("isometry-pc");
    const Stopwatch sw;
    constexpr double kTol = 1e-4;
    const RootSystemSpec h3 = RootSystemSpec::a1();
    json quad_diag = json::array();
    for (const Family& fam : families(cfg, h3)) {
        const double lhs = h3_norm_squared(fam.f);
        if (fam.tag == "gaussian") {
            // delta f is a plain Gaussian, so both sides equal its Euclidean norm (pi s)^{3/2}.
            rep.add(with(fam.params(), {{"identity", "lhs-closed-form"}}), lhs, std::pow(kPi * fam.s, 1.5), 1e-10);
        }
        for (double t : t_grid(cfg, {0.25, 1.0})) {
            const HoloRadialExtension G(fam.f, t, h3, {1e-300, 1e-11});
            const Cutoffs cut = cutoffs(fam, t);
            const auto rhs = pc_isometry_rhs(G, cut, 1e-7);
            quad_diag.push_back({{"family", fam.tag}, {"s", fam.s}, {"t", t}, {"a_max", cut.a_max},
                                 {"b_max", cut.b_max}, {"b_tail_order", cut.tail_order}, {"evals", rhs.evals},
                                 {"error", rhs.error}});
            rep.add(with(fam.params(), {{"t", t}, {"identity", "isometry"}}), lhs, rhs.value, kTol);
        }
    }
    rep.diagnostics["quadrature"] = quad_diag;
    rep.wall_ms = sw.ms();
    return rep;
}

VerificationReport verify_isometry_ac(const ExperimentConfig& cfg)
{
    VerificationReport rep = named("isometry-ac");
    const Stopwatch sw;
    constexpr double kTol = 1e-4;
    const double B = 2.0 * kPi;
    const RootSystemSpec h3 = RootSystemSpec::a1();
    const double c = c_constant(h3);
    json quad_diag = json::array();
    std::vector<double> bhat;
    for (const Family& fam : families(cfg, h3)) {
        const double lhs = h3_norm_squared(fam.f);
        for (double t : t_grid(cfg, {0.25, 0.5, 1.0})) {
            const Cutoffs cut = cutoffs(fam, t);
            quad::AcDomain dom{0.0, cut.a_max, 0.0, cut.b_max, cut.tail_order};
            const quad::Tolerance inner{1e-300, 1e-11};
            auto phi = [&](double h, double y) {
                return std::norm(sb_aC_extension_scaled(fam.f, t, cplx(h, y), h3, inner));
            };
            // Weyl symmetry and conjugation: the four quadrants contribute equally.
            const auto r = quad::integrate_aC(phi, dom, {0.0, 1e-7});
            const double norm = std::exp(c * t) / std::sqrt(kPi * t);
            const double rhs = B * norm * 4.0 * r.value;
            const double b_hat = lhs / (rhs / B);
            bhat.push_back(b_hat);
            quad_diag.push_back({{"family", fam.tag}, {"s", fam.s}, {"t", t}, {"h_max", cut.a_max},
                                 {"y_max", cut.b_max}, {"y_tail_order", cut.tail_order}, {"evals", r.evals},
                                 {"B_hat", b_hat}});
            const json p = with(fam.params(), {{"t", t}});
            rep.add(with(p, {{"identity", "isometry"}}), lhs, rhs, kTol);
            rep.add(with(p, {{"identity", "B-hat"}}), b_hat, B, kTol);
        }
        // On the real axis eta F must match eta times the directly convolved heat evolution.
        const double t = 0.5, r0 = 0.7;
        const double direct = std::sinh(r0) * h3_heat_evolve(fam.f, t, r0, {1e-300, 1e-13});
        rep.add(with(fam.params(), {{"t", t}, {"r", r0}, {"identity", "real-axis"}}),
                sb_aC_extension(fam.f, t, cplx(r0, 0.0), h3).real(), direct, 1e-8);
    }
    if (bhat.size() >= 2) {
        const auto [lo, hi] = std::minmax_element(bhat.begin(), bhat.end());
        rep.add({{"identity", "B-hat-spread"}}, *hi, *lo, kTol);
    }
    rep.diagnostics["B"] = B;
    rep.diagnostics["quadrature"] = quad_diag;
    rep.wall_ms = sw.ms();
    return rep;
}

VerificationReport verify_inversion_radial(const ExperimentConfig& cfg)
{
    VerificationReport rep = named("invert-radial");
    const Stopwatch sw;
    const RootSystemSpec h3 = RootSystemSpec::a1();
    for (const Family& fam : families(cfg, h3)) {
        const double tol = fam.tag == "gaussian" ? 1e-5 : 1e-4;
        std::vector<double> rec;
        for (double t : t_grid(cfg, {0.25, 0.5, 1.0})) {
            rec.push_back(invert_radial_at_basepoint(fam.f, t, h3));
            rep.add(with(fam.params(), {{"t", t}, {"identity", "inversion"}}), rec.back(), fam.f(0.0), tol);
        }
        const auto [lo, hi] = std::minmax_element(rec.begin(), rec.end());
        rep.add(with(fam.params(), {{"identity", "t-independence"}}), *hi, *lo, 1e-5);
    }
    rep.add({{"family", "zero"}, {"identity", "inversion"}}, invert_radial_at_basepoint(RadialProfile::zero(), 0.5, h3),
            0.0, 1e-5);
    rep.wall_ms = sw.ms();
    return rep;
}

VerificationReport verify_inversion_general(const ExperimentConfig& cfg)
{
    VerificationReport rep = named("invert-general");
    const Stopwatch sw;
    const RootSystemSpec h3 = RootSystemSpec::a1();
    const double t = cfg.t.empty() ? 0.5 : cfg.t.front();
    const std::vector<double> t_more =
        cfg.t.empty() ? std::vector<double>{0.25, 1.0} : std::vector<double>(cfg.t.begin() + 1, cfg.t.end());
    const double ell = cfg.ell;
    const bool spline = cfg.family == "spline";
    const double s = cfg.s.empty() ? 1.0 : cfg.s.front();
    const RadialProfile f = spline ? RadialProfile::spline_bump(1.0, 3) : RadialProfile::gaussian_over_delta(s, h3);
    const OffsetRadialFunction fx{ell, f};
    json base = {{"family", spline ? "spline" : "gaussian"}, {"ell", ell}, {"t", t}};
    if (!spline) base["s"] = s;
    const double target = fx.value_at_x();
    const quad::Tolerance tol{1e-300, 1e-12};

    // (i) literal tube integral against the radialised route below the singular radius.
    if (ell > 0.0) {
        const double rs = singular_radius(ell);
        rep.add(with(base, {{"identity", "singular-radius"}}), rs, std::acos(-1.0 / std::cosh(ell)), 1e-8);
        for (double frac : {0.2 / rs, 0.5 / rs, 0.8, 0.9}) {
            const double R = frac * rs;
            if (R >= rs) continue;
            rep.add(with(base, {{"R", R}, {"identity", "small-R"}}), tube_functional_small_R(fx, t, R, tol),
                    tube_functional_continued(fx, t, R, tol), 1e-6);
        }
    }

    // (ii) one cumulative sweep gives the limit, the R table and the Chebyshev check.
    const HoloRadialExtension Gx(kx_average(fx), t, h3, tol);
    const double rmax = r_max(t);
    const int n = cfg.r_grid;
    std::vector<double> nodes(n), mids(n - 1);
    for (int k = 0; k < n; ++k) nodes[k] = 0.5 * rmax * (1.0 - std::cos(kPi * k / (n - 1)));
    for (int k = 0; k + 1 < n; ++k) mids[k] = 0.5 * rmax * (1.0 - std::cos(kPi * (k + 0.5) / (n - 1)));
    // Nodes and midpoints interleave: radii[2k] = nodes[k], radii[2k+1] = mids[k].
    std::vector<double> radii;
    for (int k = 0; k < n; ++k) {
        radii.push_back(nodes[k]);
        if (k + 1 < n) radii.push_back(mids[k]);
    }
    const std::vector<double> L = tube_functional_sweep(Gx, radii, tol);
    auto L_node = [&](int k) { return L[static_cast<std::size_t>(2 * k)]; };
    auto L_mid = [&](int k) { return L[static_cast<std::size_t>(2 * k + 1)]; };
    rep.add(with(base, {{"R", rmax}, {"identity", "limit"}}), L.back(), target, 1e-4);

    json table = json::array();
    for (int k = 0; k < n; ++k) table.push_back({nodes[k], L_node(k)});
    rep.diagnostics["r_sweep"] = table;

    // Lobatto nodes in increasing R map to decreasing Chebyshev abscissae.
    std::vector<double> at_nodes(n);
    for (int k = 0; k < n; ++k) at_nodes[k] = L_node(n - 1 - k);
    const quad::Chebyshev cheb(at_nodes, 0.0, rmax);
    double sup_L = 0.0, worst = -1.0;
    int worst_k = 0;
    for (double v : L) sup_L = std::max(sup_L, std::abs(v));
    for (int k = 0; k + 1 < n; ++k) {
        const double d = std::abs(cheb(mids[k]) - L_mid(k));
        if (d > worst) worst = d, worst_k = k;
    }
    rep.add(with(base, {{"R", mids[worst_k]}, {"nodes", n}, {"identity", "chebyshev-residual"}}),
            cheb(mids[worst_k]), L_mid(worst_k), 1e-9, sup_L);

    // dL/dR of the interpolant against the integrand at R.
    const double pref = std::exp(0.5 * Gx.c() * t) * std::pow(2.0 * kPi * t, -1.5) * 4.0 * kPi;
    auto dL = [&](double R) { return pref * Gx.imaginary_slice_damped(R) * R * R; };
    double sup_d = 0.0;
    for (double R : radii) sup_d = std::max(sup_d, std::abs(dL(R)));
    double worst_d = -1.0, wd_R = 0.0;
    for (double frac : {0.1, 0.25, 0.4, 0.6, 0.75}) {
        const double R = frac * rmax;
        const double d = std::abs(cheb.derivative(R) - dL(R));
        if (d > worst_d) worst_d = d, wd_R = R;
    }
    rep.add(with(base, {{"R", wd_R}, {"identity", "derivative"}}), cheb.derivative(wd_R), dL(wd_R), 1e-7, sup_d);

    // Heat evolution commutes with the stabiliser average.
    {
        const HoloRadialExtension G1(f, t, h3, tol);
        for (double r : {0.5, 1.5}) {
            auto g = [&](double u) {
                const double d2 = std::max(0.0, arccosh_squared(hyperbolic_cos_distance(ell, cplx(r, 0.0), u)).real());
                return G1.real_slice(std::sqrt(d2));
            };
            const double heat_then_avg = 0.5 * quad::gl_integrate(g, -1.0, 1.0, kKxOrder);
            rep.add(with(base, {{"r", r}, {"identity", "average-commutes"}}), Gx.real_slice(r), heat_then_avg, 1e-7);
        }
    }

    // Limit at other times.
    for (double t2 : t_more) {
        const double L2 = tube_functional_continued(fx, t2, r_max(t2), tol);
        json p = base;
        p["t"] = t2;
        rep.add(with(p, {{"R", r_max(t2)}, {"identity", "limit"}}), L2, target, 1e-4);
    }

    // ell = 0: the tube functional is the radial inversion.
    {
        const OffsetRadialFunction f0{0.0, f};
        json p = base;
        p["ell"] = 0.0;
        rep.add(with(p, {{"identity", "ell-zero"}}), tube_functional_continued(f0, t, r_max(t), tol),
                invert_radial_at_basepoint(f, t, h3, tol), 1e-10);
    }
    rep.wall_ms = sw.ms();
    return rep;
}

VerificationReport verify_unwrapping(const ExperimentConfig& cfg)
{
    VerificationReport rep = named("unwrap");
    const Stopwatch sw;
    constexpr int kGrid = 400;
    const double lo = 0.05, hi = kPi - 0.05;
    json trunc = json::array();
    for (double t : t_grid(cfg, {0.1, 0.25, 1.0})) {
        const json p = {{"t", t}};
        double sup = 0.0, worst = -1.0, wt = 0.0, worst_pf = -1.0, wp = 0.0;
        int negative = 0;
        for (int k = 0; k < kGrid; ++k) {
            const double th = lo + (hi - lo) * k / (kGrid - 1);
            const double a = s3_heat_theta(th, t, cfg.n_lattice);
            const double b = s3_heat_spectral(th, t, cfg.m_modes);
            const double c = pushforward_sigma(th, t, cfg.n_lattice);
            sup = std::max(sup, std::abs(b));
            if (std::abs(a - b) > worst) worst = std::abs(a - b), wt = th;
            if (std::abs(c - a) > worst_pf) worst_pf = std::abs(c - a), wp = th;
            if (c < 0.0) ++negative;
        }
        rep.add(with(p, {{"theta", wt}, {"identity", "theta-vs-spectral"}}), s3_heat_theta(wt, t, cfg.n_lattice),
                s3_heat_spectral(wt, t, cfg.m_modes), 1e-9, sup);
        rep.add(with(p, {{"theta", wp}, {"identity", "pushforward-vs-theta"}}), pushforward_sigma(wp, t, cfg.n_lattice),
                s3_heat_theta(wp, t, cfg.n_lattice), 1e-13, sup);
        rep.add(with(p, {{"identity", "pushforward-negative-nodes"}}), negative, 0.0, 0.5);

        auto mass = [&](auto&& kernel) {
            auto g = [&](double th) { return kernel(th) * 4.0 * kPi * std::sin(th) * std::sin(th); };
            return quad::gk21(g, 0.0, kPi, {0.0, 1e-13}, 8).value;
        };
        rep.add(with(p, {{"identity", "theta-mass"}}), mass([&](double th) { return s3_heat_theta(th, t, cfg.n_lattice); }),
                1.0, 1e-8);
        rep.add(with(p, {{"identity", "spectral-mass"}}),
                mass([&](double th) { return s3_heat_spectral(th, t, cfg.m_modes); }), 1.0, 1e-8);

        // sigma_t is signed (negative shells where sin b < 0) yet has unit mass.
        const double b_max = std::sqrt(2.0 * t * kLogEps) + t;
        auto sg = [&](double b) { return 4.0 * kPi * b * b * sigma_density({b, 0.0, 0.0}, t); };
        const double sigma_mass = quad::gk21(sg, 0.0, b_max, {0.0, 1e-14}, 8).value;
        rep.add(with(p, {{"identity", "sigma-mass"}}), sigma_mass, 1.0, 1e-10);
        // The radial moment behind that mass: int_0^inf b sin b e^{-b^2/2t} db = t sqrt(pi t / 2) e^{-t/2}.
        auto mg = [&](double b) { return b * std::sin(b) * std::exp(-b * b / (2.0 * t)); };
        rep.add(with(p, {{"identity", "sigma-moment"}}), quad::gk21(mg, 0.0, b_max, {0.0, 1e-14}, 8).value,
                t * std::sqrt(kPi * t / 2.0) * std::exp(-t / 2.0), 1e-12);
        trunc.push_back({{"t", t},
                         {"n_lattice", cfg.n_lattice ? cfg.n_lattice : s3_lattice_truncation(t)},
                         {"m_modes", cfg.m_modes ? cfg.m_modes : s3_mode_truncation(t)}});
    }
    rep.diagnostics["truncation"] = trunc;
    rep.wall_ms = sw.ms();
    return rep;
}

VerificationReport verify_intertwining(const ExperimentConfig& cfg)
{
    VerificationReport rep = named("intertwine");
    const Stopwatch sw;
    constexpr double kH = 1e-4, kTol = 1e-6;
    const RootSystemSpec h3 = RootSystemSpec::a1();
    const double c = c_constant(h3);
    auto d1 = [](const std::function<double(double)>& g, double r) { return (g(r + kH) - g(r - kH)) / (2.0 * kH); };
    auto d2 = [](const std::function<double(double)>& g, double r) {
        return (g(r + kH) - 2.0 * g(r) + g(r - kH)) / (kH * kH);
    };
    std::vector<double> grid;
    for (int k = 0; k <= 29; ++k) grid.push_back(0.1 + 0.1 * k);

    // Records the sup-norm residual of lhs(r) = rhs(r) over the grid.
    auto check = [&](const json& p, auto&& lhs, auto&& rhs) {
        double sup = 0.0, worst = -1.0, wr = 0.0;
        for (double r : grid) {
            sup = std::max(sup, std::abs(rhs(r)));
            const double d = std::abs(lhs(r) - rhs(r));
            if (d > worst) worst = d, wr = r;
        }
        rep.add(with(p, {{"r", wr}}), lhs(wr), rhs(wr), kTol, sup);
    };

    std::vector<Family> smooth;
    if (wants(cfg, "gaussian")) {
        for (double s : widths(cfg)) {
            smooth.push_back({"gaussian", s, RadialProfile::gaussian_over_delta(s, h3)});
            smooth.push_back({"plain-gaussian", s, RadialProfile::gaussian(s)});
        }
    }
    for (const Family& fam : smooth) {
        const RadialProfile& f = fam.f;
        const json p = {{"family", fam.tag}, {"s", fam.s}};
        const std::function<double(double)> fr = [&](double r) { return f(r); };
        const std::function<double(double)> df = [&](double r) { return radial_delta(h3, r) * f(r); };
        const std::function<double(double)> ef = [&](double r) { return std::sinh(r) * f(r); };
        auto lap = [&](double r) { return d2(fr, r) + 2.0 / std::tanh(r) * d1(fr, r); };
        check(with(p, {{"identity", "laplacian-via-delta"}}), lap, [&](double r) {
            return (d2(df, r) + 2.0 / r * d1(df, r) - c * df(r)) / radial_delta(h3, r);
        });
        check(with(p, {{"identity", "laplacian-via-eta"}}), lap,
              [&](double r) { return (d2(ef, r) - c * ef(r)) / std::sinh(r); });
    }
    const std::function<double(double)> delta = [&](double r) { return radial_delta(h3, r); };
    check({{"identity", "delta-eigenfunction"}}, [&](double r) { return d2(delta, r) + 2.0 / r * d1(delta, r); },
          [&](double r) { return c * delta(r); });
    rep.diagnostics["step"] = kH;
    rep.wall_ms = sw.ms();
    return rep;
}

namespace {

// F(zeta) = sum a_n e^{-(n^2-1)t/2} U_{n-1}(zeta) for a sine-series profile.
cplx s3_evolved(const std::vector<double>& a, double t, cplx zeta)
{
    cplx u_prev = 0.0, u = 1.0, sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double n = static_cast<double>(k + 1);
        sum += a[k] * std::exp(-(n * n - 1.0) * t / 2.0) * u;
        const cplx next = 2.0 * zeta * u - u_prev;
        u_prev = u;
        u = next;
    }
    return sum;
}

double s3_inversion(const std::vector<double>& a, double t)
{
    if (a.empty()) return 0.0;
    // F(ib) sinh(b)/b b^2 = sum a_n e^{-(n^2-1)t/2} b sinh(nb), with no division.
    auto g = [&](double b) {
        double sum = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            const double n = static_cast<double>(k + 1);
            sum += a[k] * std::exp(-(n * n - 1.0) * t / 2.0 - b * b / (2.0 * t)) * b * std::sinh(n * b);
        }
        return sum;
    };
    const double b_max = static_cast<double>(a.size()) * t + std::sqrt(2.0 * t * kLogEps) + 1.0;
    const double v = quad::gk21(g, 0.0, b_max, {0.0, 1e-14}, 8).value;
    return std::exp(-t / 2.0) * std::pow(2.0 * kPi * t, -1.5) * 4.0 * kPi * v;
}

double s3_isometry_rhs(const std::vector<double>& a, double t)
{
    const double b_max = static_cast<double>(a.size()) * t + std::sqrt(t * kLogEps) + 1.0;
    const quad::Tolerance inner{1e-300, 1e-10};
    auto b_integrand = [&](double th) {
        const double ct = std::cos(th), st = std::sin(th);
        auto g = [&](double b) {
            auto phi = [&](double u) {
                return std::norm(s3_evolved(a, t, cplx(ct * std::cosh(b), -st * std::sinh(b) * u)));
            };
            const double ang = 2.0 * kPi * quad::gl_integrate(phi, -1.0, 1.0, 96);
            return ang * b * b * sinhc(2.0 * b) * std::exp(-b * b / t);
        };
        return 4.0 * kPi * st * st * quad::gk21(g, 0.0, b_max, inner, 4).value;
    };
    const double v = quad::gk21(b_integrand, 0.0, kPi, {0.0, 1e-8}, 2).value;
    return std::exp(-t) * v / std::pow(kPi * t, 1.5);
}

} // namespace

VerificationReport verify_s3_compact(const ExperimentConfig& cfg)
{
    VerificationReport rep = named("s3-compact");
    const Stopwatch sw;
    for (double t : t_grid(cfg, {0.5})) {
        for (int n = 1; n <= 3; ++n) {
            std::vector<double> a(static_cast<std::size_t>(n), 0.0);
            a.back() = 1.0;
            // sin(n theta)/sin(theta) -> n at the basepoint.
            rep.add({{"t", t}, {"mode", n}, {"identity", "inversion"}}, s3_inversion(a, t), n, 1e-8);
        }
        const std::vector<double> two = {1.0, 0.5};
        const json p = {{"t", t}, {"a", two}};
        rep.add(with(p, {{"identity", "inversion"}}), s3_inversion(two, t), 1.0 + 2.0 * 0.5, 1e-8);
        rep.add(with(p, {{"identity", "isometry"}}), 2.0 * kPi * kPi * (1.0 + 0.25), s3_isometry_rhs(two, t), 1e-4);
    }
    rep.add({{"a", json::array()}, {"identity", "inversion"}}, s3_inversion({}, 0.5), 0.0, 1e-8);
    rep.add({{"a", {0.0}}, {"identity", "isometry"}}, 0.0, s3_isometry_rhs({0.0}, 0.5), 1e-8);
    rep.wall_ms = sw.ms();
    return rep;
}

// ----------------------------------------------------------------- driver

VerificationReport run_experiment(const std::string& id, const ExperimentConfig& cfg)
{
    if (id == "euclid") return verify_euclid_baseline(cfg);
    if (id == "unwrap") return verify_unwrapping(cfg);
    if (id == "isometry-pc") return verify_isometry_pc(cfg);
    if (id == "isometry-ac") return verify_isometry_ac(cfg);
    if (id == "invert-radial") return verify_inversion_radial(cfg);
    if (id == "invert-general") return verify_inversion_general(cfg);
    if (id == "intertwine") return verify_intertwining(cfg);
    if (id == "s3-compact") return verify_s3_compact(cfg);
    throw ConfigError("unknown experiment id: " + id);
}

RunSummary run_all(const ExperimentConfig& cfg)
{
    cfg.validate();
    const Stopwatch sw;
    RunSummary run;
    const std::vector<std::string> ids =
        cfg.experiment == "all" ? experiment_ids() : std::vector<std::string>{cfg.experiment};
    for (const auto& id : ids) {
        VerificationReport rep;
        const Stopwatch one;
        try {
            rep = run_experiment(id, cfg);
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            // A numerical failure is a failed row, not a crash.
            rep = named(id);
            rep.add({{"identity", "error"}}, std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0);
            rep.rows.back().pass = false;
            rep.diagnostics["error"] = e.what();
            rep.wall_ms = one.ms();
        }
        if (cfg.tol) rep.override_tolerance(*cfg.tol);
        rep.diagnostics["seed"] = cfg.seed;
        run.reports.push_back(std::move(rep));
    }
    run.wall_ms = sw.ms();
    return run;
}

namespace {

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_quote(const std::string& s)
{
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

} // namespace

std::string to_csv(const std::vector<VerificationReport>& reports)
{
    std::string out = "experiment,param_json,lhs,rhs,abs_err,rel_err,pass\n";
    for (const auto& rep : reports) {
        for (const auto& r : rep.rows) {
            out += r.experiment + "," + csv_quote(r.params.dump()) + "," + fmt(r.lhs) + "," + fmt(r.rhs) + "," +
                   fmt(r.abs_err) + "," + fmt(r.rel_err) + "," + (r.pass ? "true" : "false") + "\n";
        }
    }
    return out;
}

json summary_json(const RunSummary& run, const ExperimentConfig& cfg)
{
    json exps = json::array();
    for (const auto& rep : run.reports) {
        json rows = json::array();
        for (const auto& r : rep.rows) {
            rows.push_back({{"params", r.params}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"abs_err", r.abs_err},
                            {"rel_err", r.rel_err}, {"tolerance", r.tolerance},
                            {"mode", r.absolute ? "absolute" : "relative"}, {"pass", r.pass}});
        }
        exps.push_back({{"experiment", rep.experiment}, {"passed", rep.passed()}, {"failed", rep.failed()},
                        {"wall_ms", rep.wall_ms}, {"rows", rows}, {"diagnostics", rep.diagnostics}});
    }
    return {{"passed", run.passed()}, {"failed", run.failed()}, {"wall_ms", run.wall_ms},
            {"config", config_to_json(cfg)}, {"experiments", exps}};
}

void write_outputs(const RunSummary& run, const ExperimentConfig& cfg)
{
    if (cfg.out.empty()) return;
    const std::string csv = to_csv(run.reports);
    const std::string js = summary_json(run, cfg).dump(2) + "\n";
    std::ofstream a(cfg.out, std::ios::binary);
    if (!a) throw std::runtime_error("cannot open " + cfg.out);
    a << csv;
    std::ofstream b(cfg.out + ".json", std::ios::binary);
    if (!b) throw std::runtime_error("cannot open " + cfg.out + ".json");
    b << js;
}

} // namespace sblab
