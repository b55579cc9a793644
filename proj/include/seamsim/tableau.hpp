#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "seamsim/circuit.hpp"
#include "seamsim/pauli.hpp"

namespace seamsim {

// Sign of a stabilizer row as an affine GF(2) expression over the fresh
// random bits introduced by non-deterministic measurements. Keeping signs
// symbolic lets the reference runner prove that a detector is deterministic
// (all symbols cancel) instead of guessing from repeated runs.
struct AffineSign {
    bool c = false;
    std::vector<uint64_t> sym;

    void xor_with(const AffineSign& o) {
        c ^= o.c;
        if (o.sym.size() > sym.size()) sym.resize(o.sym.size(), 0);
        for (size_t i = 0; i < o.sym.size(); i++) sym[i] ^= o.sym[i];
    }
    void xor_symbol(uint32_t k) {
        if (k / 64 >= sym.size()) sym.resize(k / 64 + 1, 0);
        sym[k / 64] ^= 1ULL << (k % 64);
    }
    bool has_symbols() const {
        for (uint64_t w : sym)
            if (w) return true;
        return false;
    }
    void clear() {
        c = false;
        sym.clear();
    }
};

struct MeasureResult {
    AffineSign outcome;
    bool random = false;
};

// Stabilizer tableau (destabilizer/stabilizer rows) over the gate set used
// by the circuit IR. Single-use per thread.
class Tableau {
  public:
    explicit Tableau(uint32_t n);

    uint32_t n_qubits() const { return n_; }

    void h(uint32_t q);
    void cnot(uint32_t c, uint32_t t);
    void reset(uint32_t q);
    void bell_prep(uint32_t a, uint32_t b);
    MeasureResult measure_z(uint32_t q);
    MeasureResult measure_x(uint32_t q);

    // unconditional Pauli application (used for error injection)
    void apply_pauli(const PauliString& p);
    // Pauli application conditioned on a GF(2) expression
    void apply_pauli_conditional(const PauliString& p, const AffineSign& cond);

    uint32_t symbols_allocated() const { return n_symbols_; }

  private:
    uint32_t n_;
    uint32_t words_;
    uint32_t n_symbols_ = 0;
    // rows 0..n-1 destabilizers, n..2n-1 stabilizers
    std::vector<uint64_t> x_, z_; // [row * words_ + w]
    std::vector<AffineSign> sign_;

    bool xbit(uint32_t row, uint32_t q) const { return (x_[row * words_ + q / 64] >> (q % 64)) & 1; }
    bool zbit(uint32_t row, uint32_t q) const { return (z_[row * words_ + q / 64] >> (q % 64)) & 1; }
    void rowsum_into(uint32_t h, uint32_t i); // row h *= row i (with phase bookkeeping)
    int phase_of_product(const uint64_t* x1, const uint64_t* z1, const uint64_t* x2,
                         const uint64_t* z2) const;
};

// Outcome record of a noiseless reference run.
struct ReferenceResult {
    std::vector<uint8_t> meas_value;   // with all random bits fixed to 0
    std::vector<uint8_t> meas_random;  // marginally random measurement?
    std::vector<uint8_t> detector_value;
    std::vector<uint8_t> observable_value;
};

// Runs the circuit on a tableau, ignoring noise annotations. Throws
// std::runtime_error naming the detector if any detector (or observable)
// fails to evaluate deterministically.
ReferenceResult tableau_reference(const Circuit& c);

// Same run with `pauli` injected right before instruction `position`.
ReferenceResult tableau_run_with_injection(const Circuit& c, size_t position,
                                           const PauliString& pauli);

} // namespace seamsim
