#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "seamsim/circuit.hpp"
#include "seamsim/matching.hpp"
#include "seamsim/patch.hpp"

namespace seamsim {

// Detector/observable samples in shot-major packed rows.
struct BitSamples {
    uint64_t shots = 0;
    uint32_t n_detectors = 0;
    uint32_t n_observables = 0;
    size_t det_stride = 0;
    std::vector<uint64_t> detectors;   // [shot * det_stride + word]
    std::vector<uint64_t> observables; // [shot]

    bool detector(uint64_t shot, uint32_t d) const {
        return (detectors[shot * det_stride + d / 64] >> (d % 64)) & 1;
    }
};

// Word-parallel Pauli-frame sampler. Deterministic for a fixed
// (circuit, seed, shots) regardless of threading.
BitSamples sample_detectors(const Circuit& c, uint64_t shots, uint64_t seed, int threads = 1);

struct SampleStats {
    std::string variant;
    int d = 0;
    double p = 0, p_bell = 0;
    char basis = 'Z';          // memory basis; 'Z' memory measures the X logical rate
    char logical_error = 'X';
    uint64_t shots = 0;
    uint64_t failures = 0;
    int rounds = 0;
    double p_hat_k = 0;  // failures / shots
    double p_hat = 0;    // per-round rate 1-(1-p_hat_k)^(1/k)
    double sigma = 0;
    uint64_t seed = 0;

    static double per_round_rate(double p_k, int k);
    static double per_round_sigma(double p_k, uint64_t n, int k);
    std::string csv_row() const;
    static const char* csv_header();
};

// Samples `shots` shots, decodes every one with the exact matcher and fills
// the logical-error statistics. The circuit must define one observable.
SampleStats estimate_logical_rate(const BuildResult& built, const PatchSpec& spec,
                                  uint64_t shots, uint64_t seed, int threads = 1);

// Combined storage rate P_L = P_L^X + P_L^Z from the two memory bases.
double combined_storage_rate(const SampleStats& z_basis, const SampleStats& x_basis);

} // namespace seamsim
