#pragma once

// Dense semidefinite programming for small Hermitian conic problems:
//   minimize   sum_b Re tr(C_b X_b)
//   subject to scalar affine equalities  sum_t Re tr(A_t X_{b_t}) = rhs
//              X_b in K_b,  K_b one of {free, PSD, 0 <= X <= I}
//
// Solved by over-relaxed ADMM (consensus splitting between the affine
// subspace and the cone product). Hermitian variables are vectorized into an
// isometric real coordinate space; the affine projection reuses a cached
// factorization, so one SdpSolver instance amortizes across many objectives
// with the same constraint structure.

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "mipt/common.hpp"
#include "mipt/linalg.hpp"

namespace mipt {

enum class SdpCone { Free, Psd, Box01 };

struct SdpBlock {
    int dim = 1;
    SdpCone cone = SdpCone::Psd;
};

struct SdpTerm {
    int block = 0;
    MatrixXcd coeff;  // Hermitian
};

// sum_t Re tr(coeff_t^H X_{block_t}) = rhs
struct SdpEquality {
    std::vector<SdpTerm> terms;
    double rhs = 0.0;
};

struct SdpProblem {
    std::vector<SdpBlock> blocks;
    std::vector<MatrixXcd> objective;  // one Hermitian matrix per block
    std::vector<SdpEquality> equalities;

    void validate() const {
        if (blocks.empty()) throw ConfigError("SdpProblem: no blocks");
        if (objective.size() != blocks.size())
            throw ConfigError("SdpProblem: objective/block count mismatch");
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            if (blocks[b].dim < 1) throw ConfigError("SdpProblem: bad block dim");
            if (objective[b].rows() != blocks[b].dim || objective[b].cols() != blocks[b].dim)
                throw ConfigError("SdpProblem: objective dim mismatch");
            if (max_abs(MatrixXcd(objective[b] - objective[b].adjoint())) > 1e-12)
                throw ConfigError("SdpProblem: objective not Hermitian");
        }
        for (const auto& eq : equalities)
            for (const auto& t : eq.terms) {
                if (t.block < 0 || t.block >= int(blocks.size()))
                    throw ConfigError("SdpProblem: equality block out of range");
                if (t.coeff.rows() != blocks[t.block].dim)
                    throw ConfigError("SdpProblem: equality coeff dim mismatch");
                if (max_abs(MatrixXcd(t.coeff - t.coeff.adjoint())) > 1e-12)
                    throw ConfigError("SdpProblem: equality coeff not Hermitian");
            }
    }
};

enum class SdpStatus { Optimal, MaxIter, Infeasible };

struct SdpSolution {
    std::vector<MatrixXcd> x;  // cone-feasible primal variables
    double objective = 0.0;
    double dual_bound = -std::numeric_limits<double>::infinity();
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    SdpStatus status = SdpStatus::MaxIter;
    int iterations = 0;
};

// Frobenius-nearest PSD matrix: eigendecompose and clamp negatives to zero.
inline MatrixXcd psd_project(const MatrixXcd& h) {
    HermitianEig eig = hermitian_eigendecomposition(h);
    for (Eigen::Index i = 0; i < eig.values.size(); ++i)
        if (eig.values[i] < 0.0) eig.values[i] = 0.0;
    return eig.vectors * eig.values.asDiagonal() * eig.vectors.adjoint();
}

// Nearest matrix with spectrum in [0, 1].
inline MatrixXcd box01_project(const MatrixXcd& h) {
    HermitianEig eig = hermitian_eigendecomposition(h);
    for (Eigen::Index i = 0; i < eig.values.size(); ++i)
        eig.values[i] = std::clamp(eig.values[i], 0.0, 1.0);
    return eig.vectors * eig.values.asDiagonal() * eig.vectors.adjoint();
}

namespace detail {

// Isometric real coordinates for Hermitian matrices: diagonal entries, then
// sqrt(2)*(Re, Im) of the strict lower triangle, column-major.
inline int hvec_dim(int d) { return d * d; }

inline void hvec_into(const MatrixXcd& m, double* out) {
    const int d = int(m.rows());
    int idx = 0;
    const double rt2 = std::sqrt(2.0);
    for (int c = 0; c < d; ++c) {
        out[idx++] = m(c, c).real();
        for (int r = c + 1; r < d; ++r) {
            out[idx++] = rt2 * m(r, c).real();
            out[idx++] = rt2 * m(r, c).imag();
        }
    }
}

inline MatrixXcd unhvec(const double* in, int d) {
    MatrixXcd m(d, d);
    int idx = 0;
    const double inv_rt2 = 1.0 / std::sqrt(2.0);
    for (int c = 0; c < d; ++c) {
        m(c, c) = in[idx++];
        for (int r = c + 1; r < d; ++r) {
            const double re = in[idx++] * inv_rt2;
            const double im = in[idx++] * inv_rt2;
            m(r, c) = cplx(re, im);
            m(c, r) = cplx(re, -im);
        }
    }
    return m;
}

struct SparseRow {
    std::vector<int> idx;
    std::vector<double> val;
    double rhs = 0.0;
};

}  // namespace detail

class SdpSolver {
  public:
    explicit SdpSolver(SdpProblem prob) : prob_(std::move(prob)) { prepare(); }

    const SdpProblem& problem() const { return prob_; }

    // Swap the objective without refactorizing the constraint geometry.
    void set_objective(int block, const MatrixXcd& c) {
        if (block < 0 || block >= int(prob_.blocks.size()))
            throw ConfigError("set_objective: block out of range");
        if (c.rows() != prob_.blocks[block].dim)
            throw ConfigError("set_objective: dim mismatch");
        prob_.objective[block] = c;
    }

    SdpSolution solve(double tol = 1e-7, int max_iter = 50000) const {
        if (!(tol > 0.0)) throw ConfigError("solve: tol must be positive");
        const int n = n_vars_;
        using Eigen::VectorXd;

        // Objective in scaled coordinates (unit norm unless zero).
        VectorXd c = VectorXd::Zero(n);
        for (std::size_t b = 0; b < prob_.blocks.size(); ++b)
            detail::hvec_into(prob_.objective[b], c.data() + offset_[b]);
        const double c_norm = c.norm();
        const double c_scale = c_norm > 0.0 ? c_norm : 1.0;
        c /= c_scale;

        VectorXd x = VectorXd::Zero(n), z = VectorXd::Zero(n), u = VectorXd::Zero(n);
        VectorXd z_old(n), v(n);
        double sigma = 1.0;
        const double alpha = 1.6;

        double r_rel = 0.0, s_rel = 0.0;
        double r_watch = std::numeric_limits<double>::infinity();
        SdpStatus status = SdpStatus::MaxIter;
        int iter = 0;
        for (iter = 1; iter <= max_iter; ++iter) {
            // x-update: affine projection of z - u - c/sigma
            v = z - u - c / sigma;
            project_affine(v, x);

            // z-update: cone projections of the over-relaxed point
            z_old.swap(z);
            for (std::size_t b = 0; b < prob_.blocks.size(); ++b) {
                const int off = offset_[b], len = len_[b];
                const int d = prob_.blocks[b].dim;
                Eigen::Map<VectorXd> zb(z.data() + off, len);
                VectorXd w(len);
                for (int i = 0; i < len; ++i)
                    w[i] = alpha * x[off + i] + (1.0 - alpha) * z_old[off + i] + u[off + i];
                switch (prob_.blocks[b].cone) {
                    case SdpCone::Free:
                        zb = w;
                        break;
                    case SdpCone::Psd:
                        detail::hvec_into(psd_project(detail::unhvec(w.data(), d)), zb.data());
                        break;
                    case SdpCone::Box01:
                        detail::hvec_into(box01_project(detail::unhvec(w.data(), d)),
                                          zb.data());
                        break;
                }
            }
            for (int i = 0; i < n; ++i) u[i] += alpha * x[i] + (1.0 - alpha) * z_old[i] - z[i];

            const double scale = std::max(1.0, std::max(x.norm(), z.norm()));
            r_rel = (x - z).norm() / scale;
            s_rel = sigma * (z - z_old).norm() / scale;
            if (std::max(r_rel, s_rel) <= tol) {
                status = SdpStatus::Optimal;
                break;
            }

            if (iter % 100 == 0) {
                // Stalled separation between the affine set and the cones while
                // the iterates stop moving certifies infeasibility.
                if (s_rel <= tol && r_rel > 1e4 * tol &&
                    std::abs(r_rel - r_watch) <= 1e-9 * std::max(1.0, r_rel)) {
                    status = SdpStatus::Infeasible;
                    break;
                }
                r_watch = r_rel;
                // residual balancing
                if (r_rel > 10.0 * s_rel && sigma < 1e6) {
                    sigma *= 2.0;
                    u *= 0.5;
                } else if (s_rel > 10.0 * r_rel && sigma > 1e-6) {
                    sigma *= 0.5;
                    u *= 2.0;
                }
            }
        }
        if (iter > max_iter) iter = max_iter;

        SdpSolution sol;
        sol.status = status;
        sol.iterations = iter;
        sol.primal_residual = r_rel;
        sol.dual_residual = s_rel;
        sol.x.resize(prob_.blocks.size());
        double obj = 0.0;
        for (std::size_t b = 0; b < prob_.blocks.size(); ++b) {
            sol.x[b] = detail::unhvec(z.data() + offset_[b], prob_.blocks[b].dim);
            obj += (prob_.objective[b].adjoint() * sol.x[b]).trace().real();
        }
        sol.objective = obj;
        if (status != SdpStatus::Infeasible)
            sol.dual_bound = dual_bound(c, sigma * u) * c_scale;
        return sol;
    }

  private:
    void prepare() {
        prob_.validate();
        const int nb = int(prob_.blocks.size());
        offset_.resize(nb);
        len_.resize(nb);
        n_vars_ = 0;
        for (int b = 0; b < nb; ++b) {
            offset_[b] = n_vars_;
            len_[b] = detail::hvec_dim(prob_.blocks[b].dim);
            n_vars_ += len_[b];
        }

        // Sparse constraint rows in hvec coordinates, normalized to unit norm.
        rows_.clear();
        std::vector<double> buf;
        for (const auto& eq : prob_.equalities) {
            detail::SparseRow row;
            row.rhs = eq.rhs;
            for (const auto& t : eq.terms) {
                buf.assign(len_[t.block], 0.0);
                detail::hvec_into(t.coeff, buf.data());
                for (int i = 0; i < len_[t.block]; ++i)
                    if (buf[i] != 0.0) {
                        row.idx.push_back(offset_[t.block] + i);
                        row.val.push_back(buf[i]);
                    }
            }
            double nrm = 0.0;
            for (double vv : row.val) nrm += vv * vv;
            nrm = std::sqrt(nrm);
            if (nrm == 0.0) {
                if (std::abs(row.rhs) > 1e-14)
                    throw ConfigError("SdpProblem: inconsistent empty equality");
                continue;
            }
            for (double& vv : row.val) vv /= nrm;
            row.rhs /= nrm;
            rows_.push_back(std::move(row));
        }
        m_rows_ = int(rows_.size());
        b_.resize(m_rows_);
        for (int i = 0; i < m_rows_; ++i) b_[i] = rows_[i].rhs;

        if (m_rows_ > 0) {
            Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(m_rows_, m_rows_);
            for (int i = 0; i < m_rows_; ++i)
                for (int j = 0; j <= i; ++j) {
                    // sparse dot of rows i and j
                    double dot = 0.0;
                    std::size_t a = 0, bj = 0;
                    while (a < rows_[i].idx.size() && bj < rows_[j].idx.size()) {
                        if (rows_[i].idx[a] < rows_[j].idx[bj])
                            ++a;
                        else if (rows_[i].idx[a] > rows_[j].idx[bj])
                            ++bj;
                        else {
                            dot += rows_[i].val[a] * rows_[j].val[bj];
                            ++a;
                            ++bj;
                        }
                    }
                    gram(i, j) = gram(j, i) = dot;
                }
            // tiny ridge keeps the factorization valid for dependent rows
            gram.diagonal().array() += 1e-12;
            gram_ldlt_.compute(gram);
        }

        // Free-coordinate bookkeeping for the dual bound.
        free_coords_.clear();
        for (int b = 0; b < nb; ++b)
            if (prob_.blocks[b].cone == SdpCone::Free)
                for (int i = 0; i < len_[b]; ++i) free_coords_.push_back(offset_[b] + i);
        if (!free_coords_.empty() && m_rows_ > 0) {
            const int nf = int(free_coords_.size());
            Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(m_rows_ + nf, m_rows_ + nf);
            kkt.topLeftCorner(m_rows_, m_rows_) = gram_ldlt_.reconstructedMatrix();
            Eigen::MatrixXd af = Eigen::MatrixXd::Zero(m_rows_, nf);
            std::vector<int> coord_to_free(n_vars_, -1);
            for (int f = 0; f < nf; ++f) coord_to_free[free_coords_[f]] = f;
            for (int i = 0; i < m_rows_; ++i)
                for (std::size_t a = 0; a < rows_[i].idx.size(); ++a) {
                    const int f = coord_to_free[rows_[i].idx[a]];
                    if (f >= 0) af(i, f) = rows_[i].val[a];
                }
            kkt.topRightCorner(m_rows_, nf) = af;
            kkt.bottomLeftCorner(nf, m_rows_) = af.transpose();
            kkt_lu_.compute(kkt);
        }

        // Identity-coefficient single-term equalities allow shifting PSD dual
        // slack to certify a finite bound.
        psd_shift_.assign(nb, {-1, 0.0});
        for (int i = 0; i < m_rows_; ++i) {
            // reconstruct: does row i touch exactly one block, with coeff s*I?
            const auto& row = rows_[i];
            int blk = -1;
            bool single = true;
            for (int idx : row.idx) {
                int b = block_of(idx);
                if (blk == -1) blk = b;
                if (b != blk) single = false;
            }
            if (!single || blk < 0) continue;
            const int d = prob_.blocks[blk].dim;
            if (int(row.idx.size()) != d) continue;
            bool is_identity = true;
            double s = row.val[0];
            for (int a = 0; a < d; ++a) {
                // identity hvec: the d diagonal coordinates with equal values
                const int local = row.idx[a] - offset_[blk];
                if (!is_diag_coord(d, local) || std::abs(row.val[a] - s) > 1e-14)
                    is_identity = false;
            }
            if (is_identity && prob_.blocks[blk].cone == SdpCone::Psd)
                psd_shift_[blk] = {i, s};
        }
    }

    int block_of(int coord) const {
        for (std::size_t b = 0; b < offset_.size(); ++b)
            if (coord < offset_[b] + len_[b]) return int(b);
        return -1;
    }

    static bool is_diag_coord(int d, int local) {
        // column c starts at c*(2d - c - 1) + c ... walk the layout instead
        int idx = 0;
        for (int c = 0; c < d; ++c) {
            if (local == idx) return true;
            idx += 1 + 2 * (d - c - 1);
        }
        return false;
    }

    // x = v - A^T (AA^T)^-1 (A v - b)
    void project_affine(const Eigen::VectorXd& v, Eigen::VectorXd& x) const {
        x = v;
        if (m_rows_ == 0) return;
        Eigen::VectorXd av(m_rows_);
        for (int i = 0; i < m_rows_; ++i) {
            double s = 0.0;
            const auto& row = rows_[i];
            for (std::size_t a = 0; a < row.idx.size(); ++a) s += row.val[a] * v[row.idx[a]];
            av[i] = s - b_[i];
        }
        Eigen::VectorXd y = gram_ldlt_.solve(av);
        for (int i = 0; i < m_rows_; ++i) {
            const auto& row = rows_[i];
            for (std::size_t a = 0; a < row.idx.size(); ++a)
                x[row.idx[a]] -= row.val[a] * y[i];
        }
    }

    // Certified lower bound on the (scaled) minimum: g(mu) = mu.b + sum_b
    // inf_{Z in K_b} <c_b - (A^T mu)_b, Z>. Free coordinates are matched
    // exactly through the KKT system; PSD slack negativity is repaired through
    // an identity-coefficient constraint when one exists.
    double dual_bound(const Eigen::VectorXd& c, const Eigen::VectorXd& y) const {
        if (m_rows_ == 0) {
            // bound = sum of block-infima of <c_b, Z>
            double g = 0.0;
            for (std::size_t b = 0; b < prob_.blocks.size(); ++b) {
                const int d = prob_.blocks[b].dim;
                MatrixXcd w = detail::unhvec(c.data() + offset_[b], d);
                if (prob_.blocks[b].cone == SdpCone::Box01) {
                    VectorXd ev = hermitian_eigenvalues(w);
                    for (Eigen::Index i = 0; i < ev.size(); ++i) g += std::min(0.0, ev[i]);
                } else if (prob_.blocks[b].cone == SdpCone::Psd) {
                    VectorXd ev = hermitian_eigenvalues(w);
                    if (ev[0] < -1e-10) return -std::numeric_limits<double>::infinity();
                } else {
                    double nrm = 0.0;
                    for (int i = 0; i < len_[b]; ++i) nrm += c[offset_[b] + i] * c[offset_[b] + i];
                    if (nrm > 1e-20) return -std::numeric_limits<double>::infinity();
                }
            }
            return g;
        }

        Eigen::VectorXd target = c + y;
        Eigen::VectorXd at(m_rows_);
        for (int i = 0; i < m_rows_; ++i) {
            double s = 0.0;
            const auto& row = rows_[i];
            for (std::size_t a = 0; a < row.idx.size(); ++a)
                s += row.val[a] * target[row.idx[a]];
            at[i] = s;
        }
        Eigen::VectorXd mu;
        if (free_coords_.empty()) {
            mu = gram_ldlt_.solve(at);
        } else {
            const int nf = int(free_coords_.size());
            Eigen::VectorXd rhs(m_rows_ + nf);
            rhs.head(m_rows_) = at;
            for (int f = 0; f < nf; ++f) rhs[m_rows_ + f] = c[free_coords_[f]];
            Eigen::VectorXd sol = kkt_lu_.solve(rhs);
            mu = sol.head(m_rows_);
        }

        // w = c - A^T mu per block
        Eigen::VectorXd w = c;
        for (int i = 0; i < m_rows_; ++i) {
            const auto& row = rows_[i];
            for (std::size_t a = 0; a < row.idx.size(); ++a)
                w[row.idx[a]] -= row.val[a] * mu[i];
        }

        double g = 0.0;
        for (int i = 0; i < m_rows_; ++i) g += mu[i] * b_[i];
        for (std::size_t b = 0; b < prob_.blocks.size(); ++b) {
            const int d = prob_.blocks[b].dim;
            switch (prob_.blocks[b].cone) {
                case SdpCone::Free:
                    break;  // matched exactly by the KKT solve
                case SdpCone::Box01: {
                    VectorXd ev = hermitian_eigenvalues(detail::unhvec(w.data() + offset_[b], d));
                    for (Eigen::Index i = 0; i < ev.size(); ++i) g += std::min(0.0, ev[i]);
                    break;
                }
                case SdpCone::Psd: {
                    VectorXd ev = hermitian_eigenvalues(detail::unhvec(w.data() + offset_[b], d));
                    const double lam_min = ev[0];
                    if (lam_min < 0.0) {
                        const auto [row_i, s] = psd_shift_[b];
                        if (row_i < 0) return -std::numeric_limits<double>::infinity();
                        // shift mu_row by lam_min/s: w_b gains -lam_min*I >= 0
                        g += (lam_min / s) * b_[row_i];
                    }
                    break;
                }
            }
        }
        return g;
    }

    SdpProblem prob_;
    std::vector<int> offset_, len_;
    int n_vars_ = 0;
    int m_rows_ = 0;
    std::vector<detail::SparseRow> rows_;
    Eigen::VectorXd b_;
    Eigen::LDLT<Eigen::MatrixXd> gram_ldlt_;
    Eigen::PartialPivLU<Eigen::MatrixXd> kkt_lu_;
    std::vector<int> free_coords_;
    std::vector<std::pair<int, double>> psd_shift_;
};

inline SdpSolution solve_sdp(const SdpProblem& prob, double tol = 1e-7, int max_iter = 50000) {
    return SdpSolver(prob).solve(tol, max_iter);
}

}  // namespace mipt
