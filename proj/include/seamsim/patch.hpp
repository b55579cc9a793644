#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "seamsim/circuit.hpp"

namespace seamsim {

enum class PatchVariant : uint8_t { Plain, Seam, NaiveSeam, MultiSeam };

struct PatchSpec {
    PatchVariant variant = PatchVariant::Plain;
    int d = 3;
    int rounds = 0;    // 0 -> default 3d
    char basis = 'Z';  // 'Z' (|0> memory) or 'X' (|+> memory)
    double p = 0.0;
    double p_bell = 0.0;

    int effective_rounds() const { return rounds > 0 ? rounds : 3 * d; }
};

const char* variant_name(PatchVariant v);
PatchVariant variant_from_name(const std::string& name);

// Stabilizer-site descriptor. Directions index the diagonal data neighbors
// in the order NW, NE, SW, SE on the doubled coordinate grid (x = 2a,
// y = 2b, data at odd/odd).
struct StabSite {
    int a = 0, b = 0;
    bool z_type = false;
    bool bell = false;
    std::array<int, 4> data{-1, -1, -1, -1};   // data qubit ids, -1 if absent
    std::array<int, 4> half{0, 0, 0, 0};       // bell only: which half talks to data[k]
    std::array<int, 4> cnot_step{0, 0, 0, 0};  // which of the 4 CNOT steps serves data[k]
    int anc[2] = {-1, -1};                     // ancilla qubit ids (anc[1] = -1 unless bell)
};

struct PatchLayout {
    int d = 0;
    int data_cols = 0; // W
    int data_rows = 0; // d
    std::vector<int> seam_data_cols;
    std::vector<StabSite> stabs;
    std::vector<std::pair<uint32_t, uint32_t>> bell_pairs; // per round (qubit ids)
    uint32_t n_data = 0;

    int data_id(int i, int j) const { return j * data_cols + i; }
    int data_col(int id) const { return id % data_cols; }
    int data_row(int id) const { return id / data_cols; }
};

struct BuildResult {
    Circuit circuit;
    PatchLayout layout;
};

// Memory-experiment circuit for any variant; dispatches on spec.variant.
BuildResult build_memory_circuit(const PatchSpec& spec);

// Effective distance of the single-column (naive) seam construction.
int naive_seam_effective_distance(int d);

} // namespace seamsim
