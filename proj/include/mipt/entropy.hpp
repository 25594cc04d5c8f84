#pragma once

// Von Neumann entropies (base 2), k-party mutual information for disjoint
// subregion collections, and the macroscopic quarter-partition tripartite
// mutual information.

#include <algorithm>
#include <cmath>
#include <vector>

#include "mipt/common.hpp"
#include "mipt/linalg.hpp"
#include "mipt/state.hpp"

namespace mipt {

// Eigenvalues in [-1e-7, 0) are eigensolver noise on near-singular density
// matrices and are clamped to zero; anything lower fails the PSD contract.
inline constexpr double kEigenvalueNoiseFloor = -1e-7;

inline double entropy_from_eigenvalues(const VectorXd& evals) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < evals.size(); ++i) {
        double lam = evals[i];
        if (lam < kEigenvalueNoiseFloor)
            throw InvalidDensityError("density matrix eigenvalue " + std::to_string(lam) +
                                      " below PSD tolerance");
        lam = std::clamp(lam, 0.0, 1.0);
        if (lam > 0.0) s -= lam * std::log2(lam);
    }
    return s;
}

// S(rho) = -tr(rho log2 rho).
inline double von_neumann_entropy(const MatrixXcd& rho) {
    return entropy_from_eigenvalues(hermitian_eigenvalues(rho));
}

// Entropy of a site subset of a pure state. Uses the complement when that is
// smaller (S(X) = S(X^c) for pure states), so the diagonalized matrix has
// dimension at most 2^(N/2); the spectrum comes from the Schmidt form
// rho = M M^H of the reshaped state.
inline double entropy_of_sites(const StateVector& psi, const std::vector<int>& sites) {
    const int n = psi.n_qubits();
    const int k = int(sites.size());
    if (k == 0) return 0.0;
    if (k > n) throw ConfigError("entropy_of_sites: more sites than qubits");

    std::vector<int> side = sites;
    if (2 * k > n) {  // complement is smaller
        std::vector<bool> in(n, false);
        for (int s : side) in[s] = true;
        side.clear();
        for (int s = 0; s < n; ++s)
            if (!in[s]) side.push_back(s);
    }
    const MatrixXcd rho = herk_lower(psi.gather_matrix(side));
    return entropy_from_eigenvalues(hermitian_eigenvalues(rho));
}

inline double half_chain_entropy(const StateVector& psi) {
    std::vector<int> half(psi.n_qubits() / 2);
    for (std::size_t i = 0; i < half.size(); ++i) half[i] = int(i);
    return entropy_of_sites(psi, half);
}

enum class RegionTag { Symmetric, Asymmetric, MacroQuarters, Custom };

// k disjoint site lists (k in {2,3,4}).
struct RegionSet {
    std::vector<std::vector<int>> regions;
    RegionTag tag = RegionTag::Custom;

    int total_sites() const {
        int t = 0;
        for (const auto& r : regions) t += int(r.size());
        return t;
    }

    void validate() const {
        const int k = int(regions.size());
        if (k < 2 || k > 4) throw ConfigError("RegionSet: k must be 2, 3 or 4");
        std::uint64_t seen = 0;
        for (const auto& r : regions) {
            if (r.empty()) throw ConfigError("RegionSet: empty region");
            for (int s : r) {
                if (seen & (std::uint64_t(1) << s)) throw ConfigError("RegionSet: overlap");
                seen |= std::uint64_t(1) << s;
            }
        }
    }

    // Equidistant single-site parties {i, i+x, ..., i+(k-1)x} on a ring of n.
    static RegionSet symmetric(int k, int i, int x, int n) {
        RegionSet rs;
        rs.tag = RegionTag::Symmetric;
        for (int j = 0; j < k; ++j) rs.regions.push_back({(i + j * x) % n});
        return rs;
    }

    // Unequal spacings x and x+1: {i, i+x, i+2x+1}.
    static RegionSet asymmetric3(int i, int x, int n) {
        RegionSet rs;
        rs.tag = RegionTag::Asymmetric;
        rs.regions = {{i % n}, {(i + x) % n}, {(i + 2 * x + 1) % n}};
        return rs;
    }
};

// I_k = sum over non-empty subsets T of the parties of (-1)^(|T|+1) S(union T).
// The union's density matrix is built once; subset spectra come from partial
// traces of it.
inline double mutual_information_k(const StateVector& psi, const RegionSet& rs) {
    rs.validate();
    const int k = int(rs.regions.size());
    if (rs.total_sites() > StateVector::kMaxRdmSites)
        throw CapacityError("mutual_information_k: union exceeds 8 sites");

    // Union RDM with parties laid out in listed order.
    std::vector<int> union_sites;
    std::vector<int> dims;  // tensor-factor dim per party, factor 0 least significant
    for (const auto& r : rs.regions) {
        for (int s : r) union_sites.push_back(s);
        dims.push_back(1 << int(r.size()));
    }
    const MatrixXcd rho_union = psi.reduced_density_matrix(union_sites);

    double total = 0.0;
    for (int t = 1; t < (1 << k); ++t) {
        std::vector<int> keep;
        for (int j = 0; j < k; ++j)
            if (t & (1 << j)) keep.push_back(j);
        const double s = keep.size() == std::size_t(k)
                             ? von_neumann_entropy(rho_union)
                             : von_neumann_entropy(partial_trace(rho_union, dims, keep));
        total += (keep.size() % 2 == 1 ? 1.0 : -1.0) * s;
    }
    return total;
}

// Tripartite mutual information of the four equal contiguous quarters
// A, B, C, D: I3(A,B,C) = S_A+S_B+S_C - S_AB - S_AC - S_BC + S_ABC.
// Pure-state complement reduction caps the diagonalized dimension at 2^(N/2)
// (S_ABC is evaluated as S_D).
inline double tmi_quarters(const StateVector& psi) {
    const int n = psi.n_qubits();
    if (n % 4 != 0) throw ConfigError("tmi_quarters: N must be divisible by 4");
    const int q = n / 4;
    auto quarter = [&](int which) {
        std::vector<int> sites(q);
        for (int i = 0; i < q; ++i) sites[i] = which * q + i;
        return sites;
    };
    auto join = [](std::vector<int> a, const std::vector<int>& b) {
        a.insert(a.end(), b.begin(), b.end());
        return a;
    };
    const auto a = quarter(0), b = quarter(1), c = quarter(2);
    const double s_a = entropy_of_sites(psi, a);
    const double s_b = entropy_of_sites(psi, b);
    const double s_c = entropy_of_sites(psi, c);
    const double s_ab = entropy_of_sites(psi, join(a, b));
    const double s_ac = entropy_of_sites(psi, join(a, c));
    const double s_bc = entropy_of_sites(psi, join(b, c));
    const double s_abc = entropy_of_sites(psi, join(join(a, b), c));
    return s_a + s_b + s_c - s_ab - s_ac - s_bc + s_abc;
}

}  // namespace mipt
