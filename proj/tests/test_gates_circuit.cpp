#include <catch2/catch_amalgamated.hpp>

#include "mipt/circuit.hpp"
#include "mipt/gates.hpp"
#include "mipt/linalg.hpp"

using namespace mipt;

TEST_CASE("rotation gates") {
    const Matrix2cd rx = rotation_gate(RotationAxis::X);
    Matrix2cd expect;
    expect << cplx(kInvSqrt2, 0), cplx(0, -kInvSqrt2), cplx(0, -kInvSqrt2), cplx(kInvSqrt2, 0);
    CHECK(max_abs(rx - expect) < 1e-15);

    for (auto ax : {RotationAxis::X, RotationAxis::Y, RotationAxis::XYDiag})
        CHECK(is_unitary(rotation_gate(ax), 1e-14));

    // trace of exp(-i theta n.sigma) = 2 cos(theta) with theta = pi/4
    CHECK(std::abs(rotation_gate(RotationAxis::XYDiag).trace() - cplx(std::sqrt(2.0), 0)) <
          1e-14);
}

TEST_CASE("MMS gate sampling is uniform over the 9 rotation pairs") {
    Matrix4cd table[3][3];
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) table[a][b] = mms_gate(RotationAxis(a), RotationAxis(b));

    RngStream rng = RngStream::derive(77, 0);
    int counts[3][3] = {};
    const int n = 90000;
    for (int i = 0; i < n; ++i) {
        const Matrix4cd g = sample_mms_gate(rng);
        CHECK(is_unitary(g, 1e-12));
        bool found = false;
        for (int a = 0; a < 3 && !found; ++a)
            for (int b = 0; b < 3 && !found; ++b)
                if (max_abs(g - table[a][b]) < 1e-12) {
                    counts[a][b]++;
                    found = true;
                }
        REQUIRE(found);
    }
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            CHECK(std::abs(counts[a][b] / double(n) - 1.0 / 9) < 0.005);
}

TEST_CASE("sampled gates have unimodular determinant") {
    RngStream rng = RngStream::derive(78, 0);
    for (int i = 0; i < 50; ++i) {
        CHECK(std::abs(std::abs(sample_mms_gate(rng).determinant()) - 1.0) < 1e-10);
        CHECK(std::abs(std::abs(sample_haar_gate(rng).determinant()) - 1.0) < 1e-10);
    }
}

TEST_CASE("haar gates: unitarity, first-moment, determinism") {
    RngStream rng = RngStream::derive(79, 0);
    double m00 = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const Matrix4cd g = sample_haar_gate(rng);
        if (i < 100) REQUIRE(is_unitary(g, 1e-10));
        m00 += std::norm(g(0, 0));
    }
    CHECK(std::abs(m00 / n - 0.25) < 0.01);

    RngStream r1 = RngStream::derive(80, 5);
    RngStream r2 = RngStream::derive(80, 5);
    CHECK(max_abs(sample_haar_gate(r1) - sample_haar_gate(r2)) == 0.0);
}

TEST_CASE("u_xx squares to a phase and commutes with its neighbors") {
    const Matrix4cd u = u_xx_gate();
    CHECK(is_unitary(u, 1e-14));

    const Matrix4cd u2 = u * u;
    const cplx phase = u2(0, 0);
    CHECK(std::abs(std::abs(phase) - 1.0) < 1e-13);
    CHECK(max_abs(u2 - phase * Matrix4cd::Identity()) < 1e-12);

    // Neighboring gates sharing site 1 on a 3-qubit chain.
    const MatrixXcd u01 = kron(MatrixXcd(Matrix2cd::Identity()), u);
    const MatrixXcd u12 = kron(u, MatrixXcd(Matrix2cd::Identity()));
    CHECK(max_abs(u01 * u12 - u12 * u01) < 1e-12);
}

TEST_CASE("four u_xx brickwork layers act as the identity") {
    RngStream rng = RngStream::derive(81, 0);
    const int n = 8;
    const Matrix4cd u = u_xx_gate();
    for (int trial = 0; trial < 10; ++trial) {
        StateVector psi = random_state(n, rng);
        const StateVector start = psi;
        for (int layer = 0; layer < 4; ++layer) {
            const bool odd = layer % 2 == 1;
            for (int j = odd ? 1 : 0; j < n + (odd ? 0 : -1); j += 2) psi.apply_pair_gate(u, j);
        }
        CHECK(std::abs(start.inner_product(psi)) >= 1.0 - 1e-10);
    }
}

TEST_CASE("realization layer bookkeeping and determinism") {
    CircuitConfig cfg;
    cfg.n_qubits = 12;
    cfg.p_measure = 0.15;
    cfg.master_seed = 123;
    cfg.realization_index = 4;
    CHECK(cfg.periods() == 12);
    CHECK(cfg.measurement_layers() == 25);

    auto r1 = run_realization(cfg);
    auto r2 = run_realization(cfg);
    CHECK(r1.record.n_layers == 25);
    const VectorXcd a1 = r1.state.amplitudes(), a2 = r2.state.amplitudes();
    for (Eigen::Index i = 0; i < a1.size(); ++i) REQUIRE(a1[i] == a2[i]);
    CHECK(r1.record.measured_ == r2.record.measured_);
    CHECK(r1.record.outcomes_ == r2.record.outcomes_);

    cfg.periods_multiplier = 1.5;
    CHECK(cfg.periods() == 18);
    CHECK(cfg.measurement_layers() == 37);
}

TEST_CASE("p=0 leaves the bulk record empty") {
    CircuitConfig cfg;
    cfg.n_qubits = 8;
    cfg.p_measure = 0.0;
    cfg.master_seed = 9;
    auto r = run_realization(cfg);
    for (int l = 0; l + 1 < r.record.n_layers; ++l)
        for (int s = 0; s < 8; ++s) REQUIRE_FALSE(r.record.measured(l, s));
}

TEST_CASE("realization replays a manual dense-reference schedule") {
    // Re-derive the same stream and replay the published layer/draw order with
    // dense embedded unitaries; the optimized path must match exactly.
    CircuitConfig cfg;
    cfg.n_qubits = 4;
    cfg.p_measure = 0.3;
    cfg.master_seed = 2024;
    cfg.realization_index = 11;
    auto got = run_realization(cfg);

    RngStream rng = RngStream::derive(cfg.master_seed, cfg.realization_index, 0);
    const int n = cfg.n_qubits;
    StateVector psi(n);
    MeasurementRecord rec(cfg.measurement_layers(), n);
    int layer = 0;
    auto unitary_layer = [&](bool odd) {
        for (int j = odd ? 1 : 0; j < n + (odd ? 0 : -1); j += 2)
            psi.apply_pair_gate(sample_mms_gate(rng), j);
    };
    auto measure_layer = [&](double p) {
        for (int s = 0; s < n; ++s)
            if (rng.uniform01() < p) rec.set(layer, s, psi.measure_z(s, rng.uniform01()));
        ++layer;
    };
    for (int period = 0; period < cfg.periods(); ++period) {
        unitary_layer(false);
        measure_layer(cfg.p_measure);
        unitary_layer(true);
        measure_layer(cfg.p_measure);
    }
    unitary_layer(false);
    measure_layer(cfg.final_layer_measure_prob);

    CHECK(rec.measured_ == got.record.measured_);
    CHECK(rec.outcomes_ == got.record.outcomes_);
    CHECK((psi.amplitudes() - got.state.amplitudes()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("bulk measurement rate matches p") {
    CircuitConfig cfg;
    cfg.n_qubits = 8;
    cfg.p_measure = 0.2;
    cfg.master_seed = 31337;
    std::size_t hits = 0, cells = 0;
    const int reals = 10000;
    for (int r = 0; r < reals; ++r) {
        cfg.realization_index = r;
        auto res = run_realization(cfg);
        for (int l = 0; l + 1 < res.record.n_layers; ++l)
            for (int s = 0; s < 8; ++s) {
                ++cells;
                hits += res.record.measured(l, s);
            }
    }
    const double rate = double(hits) / double(cells);
    const double sigma = std::sqrt(0.2 * 0.8 / double(cells));
    CHECK(std::abs(rate - 0.2) < 3 * sigma);
}

TEST_CASE("config validation") {
    CircuitConfig cfg;
    cfg.n_qubits = 7;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.n_qubits = 12;
    cfg.p_measure = 1.2;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.p_measure = 0.1;
    cfg.periods_multiplier = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
