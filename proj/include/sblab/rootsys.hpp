#pragma once

#include <complex>
#include <string>
#include <vector>

#include <json.hpp>

namespace sblab {

// Reduced root system with every root of multiplicity 2. An empty root list
// is the flat (Euclidean) case.
struct RootSystemSpec {
    int rank = 0;
    std::vector<std::vector<double>> positive_roots;
    int multiplicity = 2;
    int weyl_order = 1;

    static RootSystemSpec euclidean(int rank);
    static RootSystemSpec a1();  // single root of unit length, rank one

    // Throws std::invalid_argument when an invariant is broken.
    void validate() const;
};

RootSystemSpec root_system_from_json(const nlohmann::json& j);
RootSystemSpec load_root_system(const std::string& path);

[[nodiscard]] std::vector<double> rho(const RootSystemSpec& spec);
[[nodiscard]] double c_constant(const RootSystemSpec& spec);

using CVector = std::vector<std::complex<double>>;

[[nodiscard]] std::complex<double> delta_a(const RootSystemSpec& spec, const CVector& H);
[[nodiscard]] std::complex<double> eta_a(const RootSystemSpec& spec, const CVector& H);
[[nodiscard]] std::complex<double> j_half_a(const RootSystemSpec& spec, const CVector& H);

} // namespace sblab
