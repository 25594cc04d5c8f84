#pragma once

// Dense statevector of an N-qubit chain with two-site gate application,
// Born-rule projective Z measurements and reduced density matrices.
//
// Index convention: site s addresses bit s of the basis-state index
// (site 0 = least significant bit). Amplitudes are stored as separate
// real/imag arrays so the gate kernels vectorize.

#include <array>
#include <cassert>
#include <cstdint>
#include <vector>

#include "mipt/common.hpp"
#include "mipt/linalg.hpp"
#include "mipt/rng.hpp"

namespace mipt {

using Eigen::Matrix2cd;
using Eigen::Matrix4cd;
using Eigen::VectorXcd;

class StateVector {
  public:
    static constexpr int kMaxQubits = 26;
    static constexpr int kMaxRdmSites = 8;
    // Below this weight a drawn measurement branch is numerically untrustworthy.
    static constexpr double kDegenerateBranch = 1e-14;

    explicit StateVector(int n_qubits) : n_(n_qubits) {
        if (n_qubits < 1 || n_qubits > kMaxQubits)
            throw CapacityError("StateVector: n_qubits must be in [1, 26], got " +
                                std::to_string(n_qubits));
        dim_ = std::size_t(1) << n_;
        re_.assign(dim_, 0.0);
        im_.assign(dim_, 0.0);
        re_[0] = 1.0;  // |0...0>
    }

    int n_qubits() const { return n_; }
    std::size_t dim() const { return dim_; }

    cplx amplitude(std::size_t i) const { return {re_[i], im_[i]}; }

    VectorXcd amplitudes() const {
        VectorXcd v(dim_);
        for (std::size_t i = 0; i < dim_; ++i) v[i] = cplx(re_[i], im_[i]);
        return v;
    }

    void set_amplitudes(const VectorXcd& v) {
        assert(std::size_t(v.size()) == dim_);
        for (std::size_t i = 0; i < dim_; ++i) {
            re_[i] = v[i].real();
            im_[i] = v[i].imag();
        }
    }

    double norm_sq() const {
        double s = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) s += re_[i] * re_[i] + im_[i] * im_[i];
        return s;
    }

    void normalize() {
        double inv = 1.0 / std::sqrt(norm_sq());
        for (std::size_t i = 0; i < dim_; ++i) {
            re_[i] *= inv;
            im_[i] *= inv;
        }
    }

    cplx inner_product(const StateVector& other) const {
        assert(other.dim_ == dim_);
        double rr = 0.0, ri = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) {
            rr += re_[i] * other.re_[i] + im_[i] * other.im_[i];
            ri += re_[i] * other.im_[i] - im_[i] * other.re_[i];
        }
        return {rr, ri};
    }

    // Gate on the adjacent pair (site, site+1 mod N); `site` is the first
    // (least significant) slot of the 4x4 gate basis |b_{j+1} b_j>.
    void apply_pair_gate(const Matrix4cd& gate, int site) {
        assert(site >= 0 && site < n_);
        apply_gate_on_sites(gate, site, (site + 1) % n_);
    }

    // Gate on two arbitrary distinct sites; `site_lo_slot` is the gate's least
    // significant slot.
    void apply_gate_on_sites(const Matrix4cd& gate, int site_lo_slot, int site_hi_slot) {
        assert(site_lo_slot != site_hi_slot);
#if MIPT_DEBUG_CHECKS
        assert(is_unitary(gate, 1e-12) && "apply_gate_on_sites: non-unitary gate");
#endif
        int p = site_lo_slot, q = site_hi_slot;
        Matrix4cd g = gate;
        if (p > q) {
            std::swap(p, q);
            // Swap the roles of the two gate slots: permutation 1 <-> 2.
            const std::array<int, 4> perm{0, 2, 1, 3};
            Matrix4cd t;
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c) t(r, c) = gate(perm[r], perm[c]);
            g = t;
        }
        double gr[4][4], gi[4][4];
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) {
                gr[r][c] = g(r, c).real();
                gi[r][c] = g(r, c).imag();
            }
        kernel_two_bit(gr, gi, p, q);
    }

    void apply_single_qubit_gate(const Matrix2cd& gate, int site) {
        assert(site >= 0 && site < n_);
#if MIPT_DEBUG_CHECKS
        assert(is_unitary(gate, 1e-12) && "apply_single_qubit_gate: non-unitary gate");
#endif
        const double g00r = gate(0, 0).real(), g00i = gate(0, 0).imag();
        const double g01r = gate(0, 1).real(), g01i = gate(0, 1).imag();
        const double g10r = gate(1, 0).real(), g10i = gate(1, 0).imag();
        const double g11r = gate(1, 1).real(), g11i = gate(1, 1).imag();
        const std::size_t sp = std::size_t(1) << site;
        double* __restrict rr = re_.data();
        double* __restrict ii = im_.data();
        for (std::size_t hi = 0; hi < (dim_ >> (site + 1)); ++hi) {
            const std::size_t base = hi << (site + 1);
            for (std::size_t lo = 0; lo < sp; ++lo) {
                const std::size_t i0 = base + lo, i1 = i0 + sp;
                const double a0r = rr[i0], a0i = ii[i0], a1r = rr[i1], a1i = ii[i1];
                rr[i0] = g00r * a0r - g00i * a0i + g01r * a1r - g01i * a1i;
                ii[i0] = g00r * a0i + g00i * a0r + g01r * a1i + g01i * a1r;
                rr[i1] = g10r * a0r - g10i * a0i + g11r * a1r - g11i * a1i;
                ii[i1] = g10r * a0i + g10i * a0r + g11r * a1i + g11i * a1r;
            }
        }
    }

    double prob_zero(int site) const {
        const std::size_t sp = std::size_t(1) << site;
        const double* __restrict rr = re_.data();
        const double* __restrict ii = im_.data();
        double s = 0.0;
        for (std::size_t hi = 0; hi < (dim_ >> (site + 1)); ++hi) {
            const std::size_t base = hi << (site + 1);
            double part = 0.0;
            for (std::size_t lo = 0; lo < sp; ++lo) {
                const std::size_t i = base + lo;
                part += rr[i] * rr[i] + ii[i] * ii[i];
            }
            s += part;
        }
        return s;
    }

    // Projective Z measurement. Outcome 0 is selected iff uniform_draw < P(bit=0);
    // the state is projected and renormalized in place.
    int measure_z(int site, double uniform_draw) {
        assert(site >= 0 && site < n_);
        const double p0 = prob_zero(site);
        const int outcome = uniform_draw < p0 ? 0 : 1;
        const double p_sel = outcome == 0 ? p0 : 1.0 - p0;
        if (p_sel < kDegenerateBranch)
            throw NumericalDegeneracyError("measure_z: branch weight " + std::to_string(p_sel) +
                                           " below trust threshold");
        const double inv = 1.0 / std::sqrt(p_sel);
        const std::size_t sp = std::size_t(1) << site;
        double* __restrict rr = re_.data();
        double* __restrict ii = im_.data();
        // Keep the selected branch, zero the other, renormalize in one pass.
        for (std::size_t hi = 0; hi < (dim_ >> (site + 1)); ++hi) {
            const std::size_t base = hi << (site + 1);
            const std::size_t keep = outcome == 0 ? base : base | sp;
            const std::size_t drop = outcome == 0 ? base | sp : base;
            for (std::size_t lo = 0; lo < sp; ++lo) {
                rr[keep + lo] *= inv;
                ii[keep + lo] *= inv;
                rr[drop + lo] = 0.0;
                ii[drop + lo] = 0.0;
            }
        }
        return outcome;
    }

    // Reduced density matrix of the listed sites (partial trace over the rest).
    // Row/column index ordering follows the listed site order: the first listed
    // site is the least significant bit of the RDM index.
    MatrixXcd reduced_density_matrix(const std::vector<int>& sites) const {
        const int k = int(sites.size());
        if (k < 1 || k > kMaxRdmSites)
            throw CapacityError("reduced_density_matrix: subset size must be in [1, 8]");
        validate_sites(sites);
        const std::size_t sub_dim = std::size_t(1) << k;

        if (k >= 6) {
            MatrixXcd rho = herk_lower(gather_matrix(sites));
            rho.triangularView<Eigen::StrictlyUpper>() = rho.adjoint();
            return rho;
        }
        if (k == 2) return rdm_two_sites(sites[0], sites[1]);

        const std::vector<std::size_t> scatter = scatter_table(sites);
        const std::size_t env_mask = env_mask_of(sites);
        std::vector<double> acc_r(sub_dim * sub_dim, 0.0), acc_i(sub_dim * sub_dim, 0.0);
        double buf_r[32], buf_i[32];
        std::size_t s = 0;
        do {
            for (std::size_t r = 0; r < sub_dim; ++r) {
                const std::size_t idx = scatter[r] | s;
                buf_r[r] = re_[idx];
                buf_i[r] = im_[idx];
            }
            // lower-triangle rank-1 accumulation of buf buf^H
            for (std::size_t c = 0; c < sub_dim; ++c) {
                const double br = buf_r[c], bi = -buf_i[c];  // conj
                for (std::size_t r = c; r < sub_dim; ++r) {
                    acc_r[c * sub_dim + r] += buf_r[r] * br - buf_i[r] * bi;
                    acc_i[c * sub_dim + r] += buf_r[r] * bi + buf_i[r] * br;
                }
            }
            s = (s - env_mask) & env_mask;
        } while (s != 0);

        MatrixXcd rho(sub_dim, sub_dim);
        for (std::size_t c = 0; c < sub_dim; ++c) {
            for (std::size_t r = c; r < sub_dim; ++r) {
                rho(r, c) = cplx(acc_r[c * sub_dim + r], acc_i[c * sub_dim + r]);
                if (r != c) rho(c, r) = std::conj(rho(r, c));
            }
        }
        return rho;
    }

    // Reshape into a 2^k x 2^(N-k) matrix: row index runs over the listed sites
    // (first listed = least significant), column index over the complement.
    MatrixXcd gather_matrix(const std::vector<int>& sites) const {
        const int k = int(sites.size());
        validate_sites(sites);
        const std::size_t rows = std::size_t(1) << k;
        const std::size_t cols = dim_ >> k;
        const std::vector<std::size_t> scatter = scatter_table(sites);
        const std::size_t env_mask = env_mask_of(sites);
        MatrixXcd m(rows, cols);
        std::size_t s = 0, e = 0;
        do {
            for (std::size_t r = 0; r < rows; ++r) {
                const std::size_t idx = scatter[r] | s;
                m(r, e) = cplx(re_[idx], im_[idx]);
            }
            ++e;
            s = (s - env_mask) & env_mask;
        } while (s != 0);
        return m;
    }

  private:
    void validate_sites(const std::vector<int>& sites) const {
        std::uint64_t seen = 0;
        for (int st : sites) {
            if (st < 0 || st >= n_) throw ConfigError("site index out of range");
            if (seen & (std::uint64_t(1) << st)) throw ConfigError("duplicate site index");
            seen |= std::uint64_t(1) << st;
        }
    }

    std::vector<std::size_t> scatter_table(const std::vector<int>& sites) const {
        const int k = int(sites.size());
        std::vector<std::size_t> scatter(std::size_t(1) << k, 0);
        for (std::size_t r = 0; r < scatter.size(); ++r) {
            std::size_t v = 0;
            for (int b = 0; b < k; ++b)
                if (r & (std::size_t(1) << b)) v |= std::size_t(1) << sites[b];
            scatter[r] = v;
        }
        return scatter;
    }

    std::size_t env_mask_of(const std::vector<int>& sites) const {
        std::size_t m = dim_ - 1;
        for (int st : sites) m &= ~(std::size_t(1) << st);
        return m;
    }

    // Two-site RDM in one vectorized pass; this is the hot path of the
    // pairwise mutual-information sweeps.
    MatrixXcd rdm_two_sites(int site_a, int site_b) const {
        const int p = std::min(site_a, site_b), q = std::max(site_a, site_b);
        const std::size_t sp = std::size_t(1) << p;
        const std::size_t sq = std::size_t(1) << q;
        const double* __restrict rr = re_.data();
        const double* __restrict ii = im_.data();
        // Lower triangle of the 4x4 in slot order (bit p low, bit q high).
        double s00 = 0, s11 = 0, s22 = 0, s33 = 0;
        double s10r = 0, s10i = 0, s20r = 0, s20i = 0, s21r = 0, s21i = 0;
        double s30r = 0, s30i = 0, s31r = 0, s31i = 0, s32r = 0, s32i = 0;
        for (std::size_t hi = 0; hi < (dim_ >> (q + 1)); ++hi) {
            const std::size_t base_hi = hi << (q + 1);
            for (std::size_t mid = 0; mid < (sq >> (p + 1)); ++mid) {
                const std::size_t base = base_hi + (mid << (p + 1));
                const double* __restrict r0 = rr + base;
                const double* __restrict i0 = ii + base;
                const double* __restrict r1 = rr + (base + sp);
                const double* __restrict i1 = ii + (base + sp);
                const double* __restrict r2 = rr + (base + sq);
                const double* __restrict i2 = ii + (base + sq);
                const double* __restrict r3 = rr + (base + sp + sq);
                const double* __restrict i3 = ii + (base + sp + sq);
#pragma omp simd reduction(+ : s00, s11, s22, s33, s10r, s10i, s20r, s20i, s21r, s21i, \
                               s30r, s30i, s31r, s31i, s32r, s32i)
                for (std::size_t lo = 0; lo < sp; ++lo) {
                    const double a0r = r0[lo], a0i = i0[lo];
                    const double a1r = r1[lo], a1i = i1[lo];
                    const double a2r = r2[lo], a2i = i2[lo];
                    const double a3r = r3[lo], a3i = i3[lo];
                    s00 += a0r * a0r + a0i * a0i;
                    s11 += a1r * a1r + a1i * a1i;
                    s22 += a2r * a2r + a2i * a2i;
                    s33 += a3r * a3r + a3i * a3i;
                    s10r += a1r * a0r + a1i * a0i;
                    s10i += a1i * a0r - a1r * a0i;
                    s20r += a2r * a0r + a2i * a0i;
                    s20i += a2i * a0r - a2r * a0i;
                    s21r += a2r * a1r + a2i * a1i;
                    s21i += a2i * a1r - a2r * a1i;
                    s30r += a3r * a0r + a3i * a0i;
                    s30i += a3i * a0r - a3r * a0i;
                    s31r += a3r * a1r + a3i * a1i;
                    s31i += a3i * a1r - a3r * a1i;
                    s32r += a3r * a2r + a3i * a2i;
                    s32i += a3i * a2r - a3r * a2i;
                }
            }
        }
        MatrixXcd rho(4, 4);
        rho(0, 0) = s00;
        rho(1, 1) = s11;
        rho(2, 2) = s22;
        rho(3, 3) = s33;
        rho(1, 0) = cplx(s10r, s10i);
        rho(2, 0) = cplx(s20r, s20i);
        rho(2, 1) = cplx(s21r, s21i);
        rho(3, 0) = cplx(s30r, s30i);
        rho(3, 1) = cplx(s31r, s31i);
        rho(3, 2) = cplx(s32r, s32i);
        rho(0, 1) = std::conj(rho(1, 0));
        rho(0, 2) = std::conj(rho(2, 0));
        rho(0, 3) = std::conj(rho(3, 0));
        rho(1, 2) = std::conj(rho(2, 1));
        rho(1, 3) = std::conj(rho(3, 1));
        rho(2, 3) = std::conj(rho(3, 2));
        if (site_a > site_b) {  // listed order: swap slots 1 <-> 2
            MatrixXcd t(4, 4);
            const int perm[4] = {0, 2, 1, 3};
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c) t(perm[r], perm[c]) = rho(r, c);
            rho = t;
        }
        return rho;
    }

    // 4x4 gate kernel on bit positions p < q; gate slot order must already
    // match [i, i+2^p, i+2^q, i+2^p+2^q]. Three loop arrangements share one
    // body; the SIMD loop is chosen as the longest of the three index ranges
    // (low bits, bits between p and q, bits above q).
    void kernel_two_bit(const double gr[4][4], const double gi[4][4], int p, int q) {
        const int n_lo = p, n_mid = q - p - 1, n_hi = n_ - q - 1;
        if (n_lo >= 3 || (n_lo >= n_mid && n_lo >= n_hi))
            kernel_impl<0>(gr, gi, p, q);
        else if (n_hi >= n_mid)
            kernel_impl<1>(gr, gi, p, q);
        else
            kernel_impl<2>(gr, gi, p, q);
    }

    // Mode 0: SIMD over the low bits; 1: over the high bits; 2: over the middle.
    template <int Mode>
    void kernel_impl(const double gr[4][4], const double gi[4][4], int p, int q) {
        // Pin the 32 gate coefficients; as pointer parameters they could alias
        // the amplitude stores.
        const double g0r0 = gr[0][0], g0r1 = gr[0][1], g0r2 = gr[0][2], g0r3 = gr[0][3];
        const double g1r0 = gr[1][0], g1r1 = gr[1][1], g1r2 = gr[1][2], g1r3 = gr[1][3];
        const double g2r0 = gr[2][0], g2r1 = gr[2][1], g2r2 = gr[2][2], g2r3 = gr[2][3];
        const double g3r0 = gr[3][0], g3r1 = gr[3][1], g3r2 = gr[3][2], g3r3 = gr[3][3];
        const double g0i0 = gi[0][0], g0i1 = gi[0][1], g0i2 = gi[0][2], g0i3 = gi[0][3];
        const double g1i0 = gi[1][0], g1i1 = gi[1][1], g1i2 = gi[1][2], g1i3 = gi[1][3];
        const double g2i0 = gi[2][0], g2i1 = gi[2][1], g2i2 = gi[2][2], g2i3 = gi[2][3];
        const double g3i0 = gi[3][0], g3i1 = gi[3][1], g3i2 = gi[3][2], g3i3 = gi[3][3];
        const std::size_t sp = std::size_t(1) << p;
        const std::size_t sq = std::size_t(1) << q;
        const std::size_t n_lo = sp, n_mid = sq >> (p + 1), n_hi = dim_ >> (q + 1);
        double* __restrict rr = re_.data();
        double* __restrict ii = im_.data();

#define MIPT_GATE_BODY(o)                                                                      \
    const double a0r = r0[o], a0i = i0[o];                                                     \
    const double a1r = r1[o], a1i = i1[o];                                                     \
    const double a2r = r2[o], a2i = i2[o];                                                     \
    const double a3r = r3[o], a3i = i3[o];                                                     \
    const double b0r = g0r0 * a0r - g0i0 * a0i + g0r1 * a1r - g0i1 * a1i + g0r2 * a2r -        \
                       g0i2 * a2i + g0r3 * a3r - g0i3 * a3i;                                   \
    const double b0i = g0r0 * a0i + g0i0 * a0r + g0r1 * a1i + g0i1 * a1r + g0r2 * a2i +        \
                       g0i2 * a2r + g0r3 * a3i + g0i3 * a3r;                                   \
    const double b1r = g1r0 * a0r - g1i0 * a0i + g1r1 * a1r - g1i1 * a1i + g1r2 * a2r -        \
                       g1i2 * a2i + g1r3 * a3r - g1i3 * a3i;                                   \
    const double b1i = g1r0 * a0i + g1i0 * a0r + g1r1 * a1i + g1i1 * a1r + g1r2 * a2i +        \
                       g1i2 * a2r + g1r3 * a3i + g1i3 * a3r;                                   \
    const double b2r = g2r0 * a0r - g2i0 * a0i + g2r1 * a1r - g2i1 * a1i + g2r2 * a2r -        \
                       g2i2 * a2i + g2r3 * a3r - g2i3 * a3i;                                   \
    const double b2i = g2r0 * a0i + g2i0 * a0r + g2r1 * a1i + g2i1 * a1r + g2r2 * a2i +        \
                       g2i2 * a2r + g2r3 * a3i + g2i3 * a3r;                                   \
    const double b3r = g3r0 * a0r - g3i0 * a0i + g3r1 * a1r - g3i1 * a1i + g3r2 * a2r -        \
                       g3i2 * a2i + g3r3 * a3r - g3i3 * a3i;                                   \
    const double b3i = g3r0 * a0i + g3i0 * a0r + g3r1 * a1i + g3i1 * a1r + g3r2 * a2i +        \
                       g3i2 * a2r + g3r3 * a3i + g3i3 * a3r;                                   \
    r0[o] = b0r;                                                                               \
    i0[o] = b0i;                                                                               \
    r1[o] = b1r;                                                                               \
    i1[o] = b1i;                                                                               \
    r2[o] = b2r;                                                                               \
    i2[o] = b2i;                                                                               \
    r3[o] = b3r;                                                                               \
    i3[o] = b3i;

        if constexpr (Mode == 0) {
            for (std::size_t hi = 0; hi < n_hi; ++hi) {
                const std::size_t base_hi = hi << (q + 1);
                for (std::size_t mid = 0; mid < n_mid; ++mid) {
                    const std::size_t base = base_hi + (mid << (p + 1));
                    double* __restrict r0 = rr + base;
                    double* __restrict i0 = ii + base;
                    double* __restrict r1 = rr + (base + sp);
                    double* __restrict i1 = ii + (base + sp);
                    double* __restrict r2 = rr + (base + sq);
                    double* __restrict i2 = ii + (base + sq);
                    double* __restrict r3 = rr + (base + sp + sq);
                    double* __restrict i3 = ii + (base + sp + sq);
#pragma omp simd
                    for (std::size_t lo = 0; lo < n_lo; ++lo) {
                        MIPT_GATE_BODY(lo)
                    }
                }
            }
        } else if constexpr (Mode == 1) {
            const std::size_t hstep = sq << 1;
            for (std::size_t mid = 0; mid < n_mid; ++mid) {
                for (std::size_t lo = 0; lo < n_lo; ++lo) {
                    const std::size_t base = (mid << (p + 1)) + lo;
                    double* __restrict r0 = rr + base;
                    double* __restrict i0 = ii + base;
                    double* __restrict r1 = rr + (base + sp);
                    double* __restrict i1 = ii + (base + sp);
                    double* __restrict r2 = rr + (base + sq);
                    double* __restrict i2 = ii + (base + sq);
                    double* __restrict r3 = rr + (base + sp + sq);
                    double* __restrict i3 = ii + (base + sp + sq);
#pragma omp simd
                    for (std::size_t hi = 0; hi < n_hi; ++hi) {
                        const std::size_t o = hi * hstep;
                        MIPT_GATE_BODY(o)
                    }
                }
            }
        } else {
            const std::size_t mstep = sp << 1;
            for (std::size_t hi = 0; hi < n_hi; ++hi) {
                const std::size_t base_hi = hi << (q + 1);
                for (std::size_t lo = 0; lo < n_lo; ++lo) {
                    const std::size_t base = base_hi + lo;
                    double* __restrict r0 = rr + base;
                    double* __restrict i0 = ii + base;
                    double* __restrict r1 = rr + (base + sp);
                    double* __restrict i1 = ii + (base + sp);
                    double* __restrict r2 = rr + (base + sq);
                    double* __restrict i2 = ii + (base + sq);
                    double* __restrict r3 = rr + (base + sp + sq);
                    double* __restrict i3 = ii + (base + sp + sq);
#pragma omp simd
                    for (std::size_t mid = 0; mid < n_mid; ++mid) {
                        const std::size_t o = mid * mstep;
                        MIPT_GATE_BODY(o)
                    }
                }
            }
        }
#undef MIPT_GATE_BODY
    }

    int n_;
    std::size_t dim_;
    std::vector<double> re_, im_;
};

// Haar-random pure state (normalized complex Gaussian vector).
inline StateVector random_state(int n_qubits, RngStream& rng) {
    StateVector psi(n_qubits);
    VectorXcd v(psi.dim());
    for (std::size_t i = 0; i < psi.dim(); ++i) v[i] = cplx(rng.gaussian(), rng.gaussian());
    v.normalize();
    psi.set_amplitudes(v);
    return psi;
}

}  // namespace mipt
