#include <catch2/catch_amalgamated.hpp>

#include "mipt/gates.hpp"
#include "mipt/linalg.hpp"
#include "mipt/state.hpp"

using namespace mipt;

namespace {

// Dense reference: embed a 4x4 gate acting on (site_lo_slot, site_hi_slot)
// into the full 2^N unitary, independently of the kernel under test.
MatrixXcd embed_two_site(const Matrix4cd& g, int lo, int hi, int n) {
    const std::size_t dim = std::size_t(1) << n;
    MatrixXcd u = MatrixXcd::Zero(dim, dim);
    const std::size_t ml = std::size_t(1) << lo, mh = std::size_t(1) << hi;
    for (std::size_t j = 0; j < dim; ++j) {
        const int xl = (j & ml) ? 1 : 0, xh = (j & mh) ? 1 : 0;
        const int col = xl + 2 * xh;
        const std::size_t rest = j & ~(ml | mh);
        for (int yl = 0; yl < 2; ++yl)
            for (int yh = 0; yh < 2; ++yh) {
                const std::size_t i = rest | (yl ? ml : 0) | (yh ? mh : 0);
                u(i, j) += g(yl + 2 * yh, col);
            }
    }
    return u;
}

StateVector make_state(int n, const VectorXcd& amps) {
    StateVector psi(n);
    psi.set_amplitudes(amps);
    return psi;
}

StateVector ghz(int n) {
    StateVector psi(n);
    VectorXcd v = VectorXcd::Zero(psi.dim());
    v[0] = v[psi.dim() - 1] = kInvSqrt2;
    psi.set_amplitudes(v);
    return psi;
}

}  // namespace

TEST_CASE("product state initialization") {
    StateVector s2(2);
    CHECK(s2.amplitude(0) == cplx(1, 0));
    for (std::size_t i = 1; i < 4; ++i) CHECK(s2.amplitude(i) == cplx(0, 0));

    StateVector s1(1);
    CHECK(s1.norm_sq() == Catch::Approx(1.0));

    StateVector s12(12);
    CHECK(s12.dim() == 4096);

    CHECK_THROWS_AS(StateVector(0), CapacityError);
    CHECK_THROWS_AS(StateVector(27), CapacityError);
}

TEST_CASE("identity gate leaves amplitudes bit-identical") {
    RngStream rng = RngStream::derive(1, 0);
    StateVector psi = random_state(6, rng);
    const VectorXcd before = psi.amplitudes();
    psi.apply_pair_gate(Matrix4cd::Identity(), 3);
    const VectorXcd after = psi.amplitudes();
    for (Eigen::Index i = 0; i < before.size(); ++i) {
        CHECK(before[i].real() == after[i].real());
        CHECK(before[i].imag() == after[i].imag());
    }
}

TEST_CASE("gate followed by its adjoint restores the state") {
    RngStream rng = RngStream::derive(2, 0);
    StateVector psi = random_state(8, rng);
    const VectorXcd before = psi.amplitudes();
    const Matrix4cd g = sample_haar_gate(rng);
    psi.apply_pair_gate(g, 5);
    psi.apply_pair_gate(g.adjoint(), 5);
    CHECK((psi.amplitudes() - before).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("MS interaction on |00> gives (|00> - i|11>)/sqrt(2)") {
    StateVector psi(2);
    psi.apply_pair_gate(ms_interaction(), 0);
    CHECK(std::abs(psi.amplitude(0) - cplx(kInvSqrt2, 0)) < 1e-15);
    CHECK(std::abs(psi.amplitude(1)) < 1e-15);
    CHECK(std::abs(psi.amplitude(2)) < 1e-15);
    CHECK(std::abs(psi.amplitude(3) - cplx(0, -kInvSqrt2)) < 1e-15);
}

TEST_CASE("kernel matches dense embedding on every site pair including wrap") {
    const int n = 6;
    RngStream rng = RngStream::derive(3, 0);
    for (int j = 0; j < n; ++j) {  // wrap pair is j = n-1
        StateVector psi = random_state(n, rng);
        const Matrix4cd g = sample_haar_gate(rng);
        const VectorXcd ref = embed_two_site(g, j, (j + 1) % n, n) * psi.amplitudes();
        psi.apply_pair_gate(g, j);
        CHECK((psi.amplitudes() - ref).cwiseAbs().maxCoeff() < 1e-13);
        CHECK(std::abs(psi.norm_sq() - 1.0) < 1e-12);
    }
}

TEST_CASE("single-qubit gate matches dense embedding") {
    const int n = 5;
    RngStream rng = RngStream::derive(4, 0);
    StateVector psi = random_state(n, rng);
    const Matrix2cd r = rotation_gate(RotationAxis::Y);
    MatrixXcd full = MatrixXcd::Identity(1, 1);
    for (int s = n - 1; s >= 0; --s)
        full = kron(full, s == 2 ? MatrixXcd(r) : MatrixXcd(Matrix2cd::Identity()));
    const VectorXcd ref = full * psi.amplitudes();
    psi.apply_single_qubit_gate(r, 2);
    CHECK((psi.amplitudes() - ref).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("measure_z on fixed and superposed states") {
    StateVector zero(1);
    CHECK(zero.measure_z(0, 0.9999) == 0);
    CHECK(std::abs(zero.amplitude(0) - cplx(1, 0)) < 1e-15);

    VectorXcd plus(2);
    plus << kInvSqrt2, kInvSqrt2;
    StateVector p = make_state(1, plus);
    CHECK(p.measure_z(0, 0.3) == 0);
    CHECK(std::abs(p.amplitude(0) - cplx(1, 0)) < 1e-12);
    CHECK(std::abs(p.amplitude(1)) < 1e-15);

    // Bell state: measuring site 0 with draw 0.7 selects outcome 1 -> |11>
    VectorXcd bell = VectorXcd::Zero(4);
    bell[0] = bell[3] = kInvSqrt2;
    StateVector b = make_state(2, bell);
    CHECK(b.measure_z(0, 0.7) == 1);
    CHECK(std::abs(b.amplitude(3) - cplx(1, 0)) < 1e-12);
    CHECK(std::abs(b.norm_sq() - 1.0) < 1e-12);
}

TEST_CASE("degenerate branch triggers a numerical error") {
    VectorXcd v(2);
    v << std::sqrt(1.0 - 1e-16), 1e-8;
    StateVector psi = make_state(1, v);
    const double just_below_one = 0x1.fffffffffffffp-1;
    CHECK_THROWS_AS(psi.measure_z(0, just_below_one), NumericalDegeneracyError);
}

TEST_CASE("reduced density matrices of known states") {
    StateVector prod(6);
    MatrixXcd r1 = prod.reduced_density_matrix({3});
    CHECK(std::abs(r1(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(r1(1, 1)) < 1e-15);

    VectorXcd bell = VectorXcd::Zero(4);
    bell[0] = bell[3] = kInvSqrt2;
    StateVector b = make_state(2, bell);
    MatrixXcd rb = b.reduced_density_matrix({0});
    CHECK(max_abs(rb - 0.5 * MatrixXcd::Identity(2, 2)) < 1e-15);

    StateVector g3 = ghz(3);
    MatrixXcd r01 = g3.reduced_density_matrix({0, 1});
    MatrixXcd expect = MatrixXcd::Zero(4, 4);
    expect(0, 0) = expect(3, 3) = 0.5;
    CHECK(max_abs(r01 - expect) < 1e-15);
}

TEST_CASE("rdm site order convention: first listed site is the low bit") {
    RngStream rng = RngStream::derive(5, 0);
    StateVector psi = random_state(5, rng);
    MatrixXcd r01 = psi.reduced_density_matrix({1, 3});
    MatrixXcd r10 = psi.reduced_density_matrix({3, 1});
    // Swapping the two listed sites permutes basis indices 1 <-> 2.
    const int perm[4] = {0, 2, 1, 3};
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            CHECK(std::abs(r01(r, c) - r10(perm[r], perm[c])) < 1e-14);
}

TEST_CASE("rdm agrees with partial trace of the full projector") {
    RngStream rng = RngStream::derive(6, 0);
    StateVector psi = random_state(6, rng);
    const VectorXcd v = psi.amplitudes();
    const MatrixXcd full = v * v.adjoint();
    const std::vector<int> dims(6, 2);
    for (const std::vector<int>& sites : {std::vector<int>{0}, {2, 4}, {0, 1, 5}}) {
        MatrixXcd got = psi.reduced_density_matrix(sites);
        MatrixXcd want = partial_trace(full, dims, sites);
        CHECK(max_abs(got - want) < 1e-13);
    }
}

TEST_CASE("rdm capacity and validation errors") {
    StateVector psi(12);
    std::vector<int> nine{0, 1, 2, 3, 4, 5, 6, 7, 8};
    CHECK_THROWS_AS(psi.reduced_density_matrix(nine), CapacityError);
    CHECK_THROWS_AS(psi.reduced_density_matrix({0, 0}), ConfigError);
    CHECK_THROWS_AS(psi.reduced_density_matrix({12}), ConfigError);
}

TEST_CASE("locality: pair gate leaves disjoint rdms unchanged") {
    RngStream rng = RngStream::derive(7, 0);
    StateVector psi = random_state(8, rng);
    const MatrixXcd before = psi.reduced_density_matrix({4, 5, 6});
    psi.apply_pair_gate(sample_haar_gate(rng), 0);  // acts on sites 0, 1
    const MatrixXcd after = psi.reduced_density_matrix({4, 5, 6});
    CHECK(max_abs(before - after) < 1e-12);
}

TEST_CASE("purity of the full-system rdm") {
    RngStream rng = RngStream::derive(8, 0);
    StateVector psi = random_state(6, rng);
    MatrixXcd rho = psi.reduced_density_matrix({0, 1, 2, 3, 4, 5});
    CHECK(std::abs((rho * rho).trace().real() - 1.0) < 1e-9);
    CHECK(std::abs(rho.trace().real() - 1.0) < 1e-10);
}

TEST_CASE("norm preserved through a long random gate/measure sequence") {
    RngStream rng = RngStream::derive(9, 0);
    StateVector psi(8);
    for (int step = 0; step < 200; ++step) {
        psi.apply_pair_gate(sample_mms_gate(rng), rng.uniform_int(8));
        if (rng.uniform01() < 0.2) psi.measure_z(rng.uniform_int(8), rng.uniform01());
        REQUIRE(std::abs(psi.norm_sq() - 1.0) < 1e-10);
    }
}

TEST_CASE("gather_matrix reproduces the rdm via M M^H") {
    RngStream rng = RngStream::derive(10, 0);
    StateVector psi = random_state(7, rng);
    const std::vector<int> sites{1, 4, 6};
    MatrixXcd m = psi.gather_matrix(sites);
    MatrixXcd rho = m * m.adjoint();
    CHECK(max_abs(rho - psi.reduced_density_matrix(sites)) < 1e-13);
}
