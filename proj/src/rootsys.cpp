#include "sblab/rootsys.hpp"

#include "sblab/sinhc.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace sblab {

RootSystemSpec RootSystemSpec::euclidean(int rank)
{
    RootSystemSpec s;
    s.rank = rank;
    s.weyl_order = 1;
    return s;
}

RootSystemSpec RootSystemSpec::a1()
{
    RootSystemSpec s;
    s.rank = 1;
    s.positive_roots = {{1.0}};
    s.weyl_order = 2;
    return s;
}

void RootSystemSpec::validate() const
{
    if (rank < 1) throw std::invalid_argument("rank must be a positive integer");
    if (multiplicity != 2) throw std::invalid_argument("root multiplicity must be 2");
    if (weyl_order < 1) throw std::invalid_argument("weyl_order must be at least 1");
    if (positive_roots.empty() && weyl_order != 1) throw std::invalid_argument("empty root system has weyl_order 1");
    if (positive_roots.size() == 1 && weyl_order != 2) throw std::invalid_argument("a single root needs weyl_order 2");
    for (const auto& a : positive_roots) {
        if (static_cast<int>(a.size()) != rank) throw std::invalid_argument("root dimension does not match rank");
        double n2 = 0.0;
        for (double x : a) {
            if (!std::isfinite(x)) throw std::invalid_argument("root has non-finite coordinate");
            n2 += x * x;
        }
        if (n2 == 0.0) throw std::invalid_argument("zero root");
    }
    // reduced: no root is a positive multiple of another (including duplicates)
    for (std::size_t i = 0; i < positive_roots.size(); ++i) {
        for (std::size_t j = i + 1; j < positive_roots.size(); ++j) {
            const auto& a = positive_roots[i];
            const auto& b = positive_roots[j];
            double ab = 0.0, aa = 0.0, bb = 0.0;
            for (int k = 0; k < rank; ++k) {
                ab += a[k] * b[k];
                aa += a[k] * a[k];
                bb += b[k] * b[k];
            }
            if (ab > 0.0 && std::abs(ab * ab - aa * bb) <= 1e-12 * aa * bb) {
                throw std::invalid_argument("root system is not reduced");
            }
        }
    }
}

RootSystemSpec root_system_from_json(const nlohmann::json& j)
{
    RootSystemSpec s;
    s.rank = j.at("rank").get<int>();
    s.positive_roots = j.at("positive_roots").get<std::vector<std::vector<double>>>();
    s.weyl_order = j.at("weyl_order").get<int>();
    s.validate();
    return s;
}

RootSystemSpec load_root_system(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open root system file: " + path);
    return root_system_from_json(nlohmann::json::parse(in));
}

std::vector<double> rho(const RootSystemSpec& spec)
{
    std::vector<double> r(spec.rank, 0.0);
    for (const auto& a : spec.positive_roots)
        for (int k = 0; k < spec.rank; ++k) r[k] += 0.5 * spec.multiplicity * a[k];
    return r;
}

double c_constant(const RootSystemSpec& spec)
{
    double c = 0.0;
    for (double x : rho(spec)) c += x * x;
    return c;
}

namespace {

std::complex<double> pairing(const std::vector<double>& alpha, const CVector& H)
{
    if (H.size() != alpha.size()) throw std::invalid_argument("vector dimension does not match rank");
    std::complex<double> s = 0.0;
    for (std::size_t k = 0; k < alpha.size(); ++k) s += alpha[k] * H[k];
    return s;
}

} // namespace

std::complex<double> delta_a(const RootSystemSpec& spec, const CVector& H)
{
    std::complex<double> p = 1.0;
    for (const auto& a : spec.positive_roots) p *= sinhc(pairing(a, H));
    return p;
}

std::complex<double> eta_a(const RootSystemSpec& spec, const CVector& H)
{
    std::complex<double> p = 1.0;
    for (const auto& a : spec.positive_roots) p *= std::sinh(pairing(a, H));
    return p;
}

std::complex<double> j_half_a(const RootSystemSpec& spec, const CVector& H)
{
    std::complex<double> p = 1.0;
    for (const auto& a : spec.positive_roots) p *= sinc(pairing(a, H));
    return p;
}

} // namespace sblab
