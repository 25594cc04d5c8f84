#pragma once

// Entanglement monotones on small multiparty density matrices: partial
// transpose, bipartite negativity, genuine multiparty negativity through
// fully decomposable witnesses, and CKW monogamy checks.
//
// Parties are tensor factors of the density matrix; factor 0 sits on the
// least significant index digit (matching StateVector::reduced_density_matrix
// with sites listed party by party).

#include <map>
#include <memory>
#include <vector>

#include "mipt/common.hpp"
#include "mipt/linalg.hpp"
#include "mipt/sdp.hpp"
#include "mipt/state.hpp"

namespace mipt {

// GMN values at or below this threshold count as exactly zero: the solver
// tolerance is 1e-7, so a decade of margin separates "entangled" events from
// numerical noise.
inline constexpr double kGmnZeroThreshold = 1e-6;

inline constexpr double kNegativityZeroTol = 1e-9;

// Bipartition of k parties into m1 (containing party 0) and its complement.
struct Bipartition {
    std::vector<int> m1;
    std::vector<int> m2;

    static Bipartition from_mask(unsigned mask, int k) {
        Bipartition b;
        for (int j = 0; j < k; ++j) ((mask >> j) & 1u ? b.m1 : b.m2).push_back(j);
        return b;
    }
};

// All 2^(k-1) - 1 bipartitions, canonicalized so party 0 is in m1.
inline std::vector<Bipartition> enumerate_bipartitions(int k) {
    if (k < 2 || k > 4) throw ConfigError("enumerate_bipartitions: k must be 2..4");
    std::vector<Bipartition> out;
    for (unsigned mask = 1; mask < (1u << k) - 1; ++mask)
        if (mask & 1u) out.push_back(Bipartition::from_mask(mask, k));
    return out;
}

// Transpose the listed tensor factors. Involutive, Hermiticity- and
// trace-preserving.
inline MatrixXcd partial_transpose(const MatrixXcd& rho, const std::vector<int>& dims,
                                   const std::vector<int>& factors) {
    const int k = int(dims.size());
    long total = 1;
    std::vector<long> stride(k, 1);
    for (int f = 0; f < k; ++f) {
        stride[f] = total;
        total *= dims[f];
    }
    if (rho.rows() != total || rho.cols() != total)
        throw ConfigError("partial_transpose: dimension mismatch");
    long tmask = 0;
    for (int f : factors) {
        if (f < 0 || f >= k) throw ConfigError("partial_transpose: factor out of range");
        tmask |= 1L << f;
    }
    MatrixXcd out(total, total);
    std::vector<int> rd(k), cd(k);
    for (long col = 0; col < total; ++col) {
        long rem = col;
        for (int f = 0; f < k; ++f) {
            cd[f] = int(rem % dims[f]);
            rem /= dims[f];
        }
        for (long row = 0; row < total; ++row) {
            rem = row;
            for (int f = 0; f < k; ++f) {
                rd[f] = int(rem % dims[f]);
                rem /= dims[f];
            }
            long r2 = 0, c2 = 0;
            for (int f = 0; f < k; ++f) {
                const bool t = (tmask >> f) & 1L;
                r2 += (t ? cd[f] : rd[f]) * stride[f];
                c2 += (t ? rd[f] : cd[f]) * stride[f];
            }
            out(r2, c2) = rho(row, col);
        }
    }
    return out;
}

inline double trace_norm_hermitian(const MatrixXcd& h) {
    const VectorXd ev = hermitian_eigenvalues(h);
    double s = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) s += std::abs(ev[i]);
    return s;
}

// N(rho) = (|| rho^{T_m1} ||_1 - 1) / 2, zeroed below kNegativityZeroTol.
inline double negativity(const MatrixXcd& rho, const std::vector<int>& dims,
                         const Bipartition& cut) {
    const double n = 0.5 * (trace_norm_hermitian(partial_transpose(rho, dims, cut.m1)) - 1.0);
    return n < kNegativityZeroTol ? 0.0 : n;
}

// 1-vs-rest negativity of a pure state from the Schmidt spectrum of the cut:
// N = ((sum_i sqrt(lambda_i))^2 - 1) / 2 with lambda the site's RDM spectrum.
inline double negativity_site_vs_rest(const StateVector& psi, int site) {
    const VectorXd ev = hermitian_eigenvalues(psi.reduced_density_matrix({site}));
    double s = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) s += std::sqrt(std::max(0.0, ev[i]));
    const double n = 0.5 * (s * s - 1.0);
    return n < kNegativityZeroTol ? 0.0 : n;
}

struct GmnResult {
    double value = 0.0;      // thresholded; exact 0 below kGmnZeroThreshold
    double raw_value = 0.0;  // -tr(rho W) as returned by the solver
    bool converged = false;
    int iterations = 0;
};

// Genuine multiparty negativity: -min_W tr(rho W) over witnesses that are
// fully decomposable with respect to every bipartition, W = P_m + Q_m^{T_m1}
// with 0 <= P_m, Q_m <= I. Variables: W plus one (P_m, Q_m) pair per
// bipartition; matrix equalities tie every decomposition to W.
//
// One GmnSolver instance caches the prepared SDP geometry per party
// signature; instances are not thread-safe, use one per worker.
class GmnSolver {
  public:
    explicit GmnSolver(double tol = 1e-7, int max_iter = 50000)
        : tol_(tol), max_iter_(max_iter) {}

    GmnResult compute(const MatrixXcd& rho, const std::vector<int>& dims) {
        const int k = int(dims.size());
        if (k < 2 || k > 4) throw ConfigError("gmn: k must be 2..4");
        long total = 1;
        for (int d : dims) total *= d;
        if (total > 16) throw CapacityError("gmn: total dimension exceeds 16");
        if (rho.rows() != total) throw ConfigError("gmn: rho dimension mismatch");

        SdpSolver& solver = solver_for(dims);
        solver.set_objective(0, rho);
        const SdpSolution sol = solver.solve(tol_, max_iter_);

        GmnResult res;
        res.raw_value = -sol.objective;
        res.converged = sol.status == SdpStatus::Optimal;
        res.iterations = sol.iterations;
        res.value = res.raw_value > kGmnZeroThreshold ? res.raw_value : 0.0;
        return res;
    }

    double tol() const { return tol_; }

  private:
    SdpSolver& solver_for(const std::vector<int>& dims) {
        auto it = cache_.find(dims);
        if (it != cache_.end()) return *it->second;

        const int k = int(dims.size());
        long total = 1;
        for (int d : dims) total *= d;
        const int dim = int(total);

        SdpProblem prob;
        prob.blocks.push_back({dim, SdpCone::Free});  // W
        const auto cuts = enumerate_bipartitions(k);
        for (std::size_t m = 0; m < cuts.size(); ++m) {
            prob.blocks.push_back({dim, SdpCone::Box01});  // P_m
            prob.blocks.push_back({dim, SdpCone::Box01});  // Q_m
        }
        prob.objective.assign(prob.blocks.size(), MatrixXcd::Zero(dim, dim));

        // W - P_m - Q_m^{T_m1} = 0, expanded over the Hermitian basis. The
        // partial transpose is self-adjoint, so the Q coefficient for basis
        // element E is T_m1(E).
        std::vector<double> unit(detail::hvec_dim(dim), 0.0);
        for (std::size_t m = 0; m < cuts.size(); ++m) {
            const int pb = 1 + 2 * int(m), qb = pb + 1;
            for (int r = 0; r < detail::hvec_dim(dim); ++r) {
                unit.assign(detail::hvec_dim(dim), 0.0);
                unit[r] = 1.0;
                const MatrixXcd e = detail::unhvec(unit.data(), dim);
                SdpEquality eq;
                eq.rhs = 0.0;
                eq.terms.push_back({0, e});
                eq.terms.push_back({pb, -e});
                eq.terms.push_back({qb, -partial_transpose(e, dims, cuts[m].m1)});
                prob.equalities.push_back(std::move(eq));
            }
        }
        auto solver = std::make_unique<SdpSolver>(std::move(prob));
        SdpSolver& ref = *solver;
        cache_.emplace(dims, std::move(solver));
        return ref;
    }

    double tol_;
    int max_iter_;
    std::map<std::vector<int>, std::unique_ptr<SdpSolver>> cache_;
};

// Convenience wrapper for one-off evaluations.
inline GmnResult gmn(const MatrixXcd& rho, const std::vector<int>& dims) {
    GmnSolver solver;
    return solver.compute(rho, dims);
}

struct CkwResult {
    double lhs = 0.0;  // N^2(A : rest)
    double rhs = 0.0;  // sum_j N^2(A : B_j)
    bool holds = false;
};

// CKW-type monogamy of negativity on a pure all-qubit state:
// N^2_{A:rest} >= sum_j N^2_{A:B_j}.
inline CkwResult ckw_check(const StateVector& psi, int site_a) {
    const int n = psi.n_qubits();
    if (site_a < 0 || site_a >= n) throw ConfigError("ckw_check: site out of range");
    CkwResult out;
    const double n_rest = negativity_site_vs_rest(psi, site_a);
    out.lhs = n_rest * n_rest;
    const std::vector<int> dims{2, 2};
    const Bipartition cut = Bipartition::from_mask(1u, 2);
    for (int j = 0; j < n; ++j) {
        if (j == site_a) continue;
        const MatrixXcd rho = psi.reduced_density_matrix({site_a, j});
        const double nj = negativity(rho, dims, cut);
        out.rhs += nj * nj;
    }
    out.holds = out.lhs >= out.rhs - 1e-9;
    return out;
}

}  // namespace mipt
