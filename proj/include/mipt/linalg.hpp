#pragma once

// Dense complex linear algebra helpers: Hermitian eigensolvers (LAPACK-backed
// above a small-size cutoff), Kronecker products and partial traces.

#include <complex>
#include <vector>

#define LAPACK_COMPLEX_CUSTOM
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <cblas.h>
#include <lapacke.h>

#include <Eigen/Dense>

#include "mipt/common.hpp"

namespace mipt {

using cplx = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::VectorXd;

extern "C" void openblas_set_num_threads(int);

// The ensemble runner parallelizes over realizations; BLAS must not spawn
// its own pool on top of that.
inline void force_single_thread_blas() {
    static const bool done = [] {
        openblas_set_num_threads(1);
        return true;
    }();
    (void)done;
}

namespace detail {
// Below this size Eigen's in-header solver beats the LAPACK call overhead.
inline constexpr int kEigenCutoff = 12;
}  // namespace detail

// Eigenvalues of a Hermitian matrix, ascending. Only the lower triangle is read.
inline VectorXd hermitian_eigenvalues(const MatrixXcd& h) {
    const int n = int(h.rows());
    if (n <= detail::kEigenCutoff) {
        return Eigen::SelfAdjointEigenSolver<MatrixXcd>(h, Eigen::EigenvaluesOnly)
            .eigenvalues();
    }
    MatrixXcd a = h;
    VectorXd w(n);
    lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', n, a.data(), n, w.data());
    if (info != 0) throw std::runtime_error("zheevd failed, info=" + std::to_string(info));
    return w;
}

struct HermitianEig {
    VectorXd values;    // ascending
    MatrixXcd vectors;  // columns
};

inline HermitianEig hermitian_eigendecomposition(const MatrixXcd& h) {
    const int n = int(h.rows());
    if (n <= detail::kEigenCutoff) {
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h);
        return {es.eigenvalues(), es.eigenvectors()};
    }
    HermitianEig out;
    out.vectors = h;
    out.values.resize(n);
    lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n, out.vectors.data(), n,
                                     out.values.data());
    if (info != 0) throw std::runtime_error("zheevd failed, info=" + std::to_string(info));
    return out;
}

// Lower-triangular part of m m^H via BLAS herk; the upper triangle is left zero.
inline MatrixXcd herk_lower(const MatrixXcd& m) {
    const int n = int(m.rows()), k = int(m.cols());
    MatrixXcd out = MatrixXcd::Zero(n, n);
    cblas_zherk(CblasColMajor, CblasLower, CblasNoTrans, n, k, 1.0, m.data(), n, 0.0,
                out.data(), n);
    return out;
}

inline MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
    MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Partial trace over the factors NOT listed in `keep`. `dims` gives the local
// dimension of every tensor factor with factor 0 on the least significant
// index digit; `keep` must be strictly ascending. The kept factors retain
// their relative order.
inline MatrixXcd partial_trace(const MatrixXcd& rho, const std::vector<int>& dims,
                               const std::vector<int>& keep) {
    const int nf = int(dims.size());
    for (std::size_t i = 0; i + 1 < keep.size(); ++i)
        if (keep[i] >= keep[i + 1]) throw ConfigError("partial_trace: keep not ascending");
    for (int f : keep)
        if (f < 0 || f >= nf) throw ConfigError("partial_trace: factor index out of range");

    long dim_keep = 1, dim_env = 1;
    std::vector<long> stride(nf, 1);
    for (int f = 1; f < nf; ++f) stride[f] = stride[f - 1] * dims[f - 1];
    std::vector<int> env;
    std::vector<bool> kept(nf, false);
    for (int f : keep) kept[f] = true;
    for (int f = 0; f < nf; ++f) (kept[f] ? dim_keep : dim_env) *= dims[f];
    for (int f = 0; f < nf; ++f)
        if (!kept[f]) env.push_back(f);
    if (rho.rows() != rho.cols()) throw ConfigError("partial_trace: non-square input");

    // Flat index of each kept (resp. traced) multi-index within the full space.
    auto flat_offsets = [&](const std::vector<int>& factors, long count) {
        std::vector<long> off(count, 0);
        for (long m = 0; m < count; ++m) {
            long rem = m, o = 0;
            for (int f : factors) {
                o += (rem % dims[f]) * stride[f];
                rem /= dims[f];
            }
            off[m] = o;
        }
        return off;
    };
    const std::vector<long> koff = flat_offsets(keep, dim_keep);
    const std::vector<long> eoff = flat_offsets(env, dim_env);

    MatrixXcd out = MatrixXcd::Zero(dim_keep, dim_keep);
    for (long e = 0; e < dim_env; ++e)
        for (long c = 0; c < dim_keep; ++c)
            for (long r = 0; r < dim_keep; ++r)
                out(r, c) += rho(koff[r] + eoff[e], koff[c] + eoff[e]);
    return out;
}

inline double max_abs(const MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

inline bool is_unitary(const MatrixXcd& g, double tol) {
    MatrixXcd d = g.adjoint() * g - MatrixXcd::Identity(g.rows(), g.cols());
    return max_abs(d) <= tol;
}

}  // namespace mipt
