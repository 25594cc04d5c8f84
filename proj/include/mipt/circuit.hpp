#pragma once

// Hybrid brickwork circuit: alternating even/odd layers of two-site gates on a
// periodic chain, interspersed with probabilistic single-site Z measurements.
//
// One period = even unitary layer, measurement layer, odd unitary layer
// (including the wrap pair (N-1, 0)), measurement layer. A run executes
// ceil(periods_multiplier * N) periods followed by one extra even unitary
// layer and a final measurement layer at its own rate.

#include <cmath>
#include <cstdint>
#include <vector>

#include "mipt/common.hpp"
#include "mipt/gates.hpp"
#include "mipt/state.hpp"

namespace mipt {

enum class GateEnsemble { MMS = 0, Haar = 1 };

struct CircuitConfig {
    int n_qubits = 12;
    double p_measure = 0.0;
    double periods_multiplier = 1.0;  // 1.0 -> N periods
    GateEnsemble gate_ensemble = GateEnsemble::MMS;
    double final_layer_measure_prob = 0.5;
    std::uint64_t master_seed = 0;
    std::uint64_t realization_index = 0;

    int periods() const { return int(std::ceil(periods_multiplier * n_qubits)); }
    int measurement_layers() const { return 2 * periods() + 1; }
    int unitary_layers() const { return 2 * periods() + 1; }

    void validate() const {
        if (n_qubits < 2 || n_qubits > StateVector::kMaxQubits || n_qubits % 2 != 0)
            throw ConfigError("CircuitConfig: n_qubits must be even and in [2, 26]");
        if (p_measure < 0.0 || p_measure > 1.0)
            throw ConfigError("CircuitConfig: p_measure must be in [0, 1]");
        if (!(periods_multiplier > 0.0))
            throw ConfigError("CircuitConfig: periods_multiplier must be > 0");
        if (final_layer_measure_prob < 0.0 || final_layer_measure_prob > 1.0)
            throw ConfigError("CircuitConfig: final_layer_measure_prob must be in [0, 1]");
    }
};

// Binary spacetime grid of measurement positions plus their outcomes
// (outcomes are meaningful only where measured(l, s) is set).
struct MeasurementRecord {
    int n_layers = 0;
    int n_sites = 0;
    std::vector<std::uint8_t> measured_;  // layer-major
    std::vector<std::uint8_t> outcomes_;

    MeasurementRecord() = default;
    MeasurementRecord(int layers, int sites)
        : n_layers(layers),
          n_sites(sites),
          measured_(std::size_t(layers) * sites, 0),
          outcomes_(std::size_t(layers) * sites, 0) {}

    bool measured(int layer, int site) const {
        return measured_[std::size_t(layer) * n_sites + site] != 0;
    }
    int outcome(int layer, int site) const {
        return outcomes_[std::size_t(layer) * n_sites + site];
    }
    void set(int layer, int site, int outcome) {
        measured_[std::size_t(layer) * n_sites + site] = 1;
        outcomes_[std::size_t(layer) * n_sites + site] = std::uint8_t(outcome);
    }

    std::size_t total_measurements() const {
        std::size_t c = 0;
        for (auto m : measured_) c += m;
        return c;
    }
};

struct RealizationResult {
    StateVector state;
    MeasurementRecord record;
};

namespace detail {

inline Matrix4cd draw_gate(GateEnsemble ensemble, RngStream& rng) {
    return ensemble == GateEnsemble::MMS ? sample_mms_gate(rng) : sample_haar_gate(rng);
}

// Even layer: pairs (0,1), (2,3), ...; odd layer: (1,2), (3,4), ..., (N-1,0).
inline void apply_unitary_layer(StateVector& psi, GateEnsemble ensemble, RngStream& rng,
                                bool odd) {
    const int n = psi.n_qubits();
    for (int j = odd ? 1 : 0; j < n + (odd ? 0 : -1); j += 2)
        psi.apply_pair_gate(draw_gate(ensemble, rng), j);
}

// Sites are visited in ascending order; one Bernoulli draw per site, plus one
// outcome draw when the site is measured.
inline void apply_measurement_layer(StateVector& psi, double p, RngStream& rng,
                                    MeasurementRecord& record, int layer) {
    const int n = psi.n_qubits();
    for (int s = 0; s < n; ++s) {
        if (rng.uniform01() < p) {
            const int outcome = psi.measure_z(s, rng.uniform01());
            record.set(layer, s, outcome);
        }
    }
}

}  // namespace detail

// Executes one realization from |0...0>. The RNG stream is derived
// deterministically from (master_seed, realization_index, attempt); pass a
// fresh attempt number to resample after a degenerate-branch abort.
inline RealizationResult run_realization(const CircuitConfig& cfg, std::uint64_t attempt = 0) {
    cfg.validate();
    RngStream rng = RngStream::derive(cfg.master_seed, cfg.realization_index, attempt);
    StateVector psi(cfg.n_qubits);
    MeasurementRecord record(cfg.measurement_layers(), cfg.n_qubits);

    int layer = 0;
    for (int period = 0; period < cfg.periods(); ++period) {
        detail::apply_unitary_layer(psi, cfg.gate_ensemble, rng, /*odd=*/false);
        detail::apply_measurement_layer(psi, cfg.p_measure, rng, record, layer++);
        detail::apply_unitary_layer(psi, cfg.gate_ensemble, rng, /*odd=*/true);
        detail::apply_measurement_layer(psi, cfg.p_measure, rng, record, layer++);
    }
    detail::apply_unitary_layer(psi, cfg.gate_ensemble, rng, /*odd=*/false);
    detail::apply_measurement_layer(psi, cfg.final_layer_measure_prob, rng, record, layer++);
    return {std::move(psi), std::move(record)};
}

// Retries degenerate realizations with fresh derived streams. With exact Born
// sampling the retry path should never trigger; `discards` counts how often
// it did anyway.
inline RealizationResult run_realization_resampled(const CircuitConfig& cfg,
                                                   std::uint64_t* discards = nullptr) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        try {
            return run_realization(cfg, attempt);
        } catch (const NumericalDegeneracyError&) {
            if (attempt > 64) throw;
            if (discards) ++*discards;
        }
    }
}

}  // namespace mipt
