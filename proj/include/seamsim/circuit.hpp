#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "seamsim/pauli.hpp"

namespace seamsim {

enum class InstrKind : uint8_t {
    H,
    CNOT,
    R,
    MZ,
    MX,
    BELL_PREP,
    DETECTOR,
    OBSERVABLE_INCLUDE,
    TICK,
    NOISE,
};

enum class ChannelKind : uint8_t { DEPOL1, DEPOL2, ERRX, BELL_DEPOL2 };

struct NoiseChannel {
    ChannelKind kind;
    double p = 0.0;

    int arity() const { return kind == ChannelKind::DEPOL2 || kind == ChannelKind::BELL_DEPOL2 ? 2 : 1; }
};

// One Pauli term of a channel expansion on concrete qubits.
struct ChannelTerm {
    PauliString pauli;
    double probability;
};

// Expansion of a channel applied to `qubits` (1 or 2 of them, matching arity).
//   DEPOL1(p)      -> X,Y,Z each p/3
//   DEPOL2(p)      -> the 15 non-identity two-qubit Paulis, each p/15
//   ERRX(p)        -> X at p
//   BELL_DEPOL2(p) -> same raw 15-term expansion as DEPOL2 (sampling form)
std::vector<ChannelTerm> channel_pauli_terms(const NoiseChannel& c,
                                             const std::vector<uint32_t>& qubits);

// Analysis-only reduced view of BELL_DEPOL2: multiplying by the Bell-pair
// stabilizers maps the 15 raw terms onto {X (x) I, Z (x) I, Y (x) I} at
// 4p/15 each (the 3 terms equivalent to identity are dropped).
std::vector<ChannelTerm> bell_reduced_terms(double p_bell, uint32_t q0, uint32_t q1);

struct Instruction {
    InstrKind kind;
    std::vector<uint32_t> qubits;      // gate targets; CNOT/DEPOL2/BELL_DEPOL2 hold pairs
    NoiseChannel channel{};            // NOISE only
    std::vector<uint32_t> meas_refs;   // DETECTOR / OBSERVABLE_INCLUDE: absolute measurement ids
    uint32_t observable_index = 0;     // OBSERVABLE_INCLUDE only
};

// Coordinates attached to detectors by the patch builders (in-memory only,
// not part of the text format).
struct DetectorCoord {
    int32_t x = 0, y = 0;   // ancilla-site coordinates on the doubled grid
    int32_t round = 0;      // extraction round, final-readout detectors use `rounds`
    bool bell = false;      // measured through a Bell pair
    bool z_type = false;
};

struct Diagnostics {
    bool ok = true;
    std::string message;
    size_t instruction_index = 0;
};

class Circuit {
  public:
    std::vector<Instruction> instructions;
    uint32_t n_qubits = 0;
    uint32_t n_measurements = 0;
    uint32_t n_detectors = 0;
    uint32_t n_observables = 0;

    std::vector<DetectorCoord> detector_coords; // optional, builder metadata

    void append(Instruction in);
    void tick() { append({InstrKind::TICK, {}, {}, {}, 0}); }
    void noise(ChannelKind k, double p, std::vector<uint32_t> qs) {
        append({InstrKind::NOISE, std::move(qs), NoiseChannel{k, p}, {}, 0});
    }

    Diagnostics validate() const;

    std::string serialize() const;
    static Circuit parse(const std::string& text);
};

} // namespace seamsim
