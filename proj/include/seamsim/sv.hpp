#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "seamsim/pauli.hpp"

namespace seamsim {

// Dense statevector for small verification problems (n <= ~14 qubits).
class DenseState {
  public:
    explicit DenseState(uint32_t n_qubits);

    uint32_t n_qubits() const { return n_; }
    std::vector<std::complex<double>>& amps() { return amp_; }
    const std::vector<std::complex<double>>& amps() const { return amp_; }

    double norm() const;
    void normalize();

    void apply_h(uint32_t q);
    void apply_cnot(uint32_t c, uint32_t t);
    void apply_pauli(const PauliString& p);
    // applies P on amplitudes where the control qubit is |1>
    void apply_controlled_pauli(uint32_t control, const PauliString& p);
    // arbitrary single-qubit unitary [[u00,u01],[u10,u11]]
    void apply_single_qubit(uint32_t q, const std::complex<double> u[2][2]);

    // overlap |<a|b>|
    static double fidelity(const DenseState& a, const DenseState& b);

    // appends a fresh qubit pair (indices n, n+1) in (|00>+|11>)/sqrt(2)
    DenseState with_bell_pair() const;

    friend DenseState operator*(std::complex<double> s, const DenseState& st);
    DenseState& operator+=(const DenseState& o);

  private:
    uint32_t n_;
    std::vector<std::complex<double>> amp_;
};

struct ProjectiveResult {
    double prob_plus = 0, prob_minus = 0;
    DenseState post_plus, post_minus; // normalized branches (zero state if prob = 0)
};

// direct (I +/- O)/2 projective measurement of a Hermitian-unitary Pauli product
ProjectiveResult direct_projective_measure(const PauliString& o, const DenseState& state);

struct TeleportedResult {
    double prob_xor[2] = {0, 0};
    DenseState post_xor[2];               // system state per XOR value (ancillas removed)
    double bit_marginal[2] = {0, 0};      // marginal P(m=1) of each ancilla bit
};

// Measurement of O_A (x) O_B on `state` through an appended Bell pair:
// controlled-O_A / controlled-O_B from the two halves, Hadamards, Z
// measurements, XOR of the two outcomes. O_A acts on qubits < n_a, O_B on the
// rest. When `entangler` is non-null the Bell pair is replaced by
// (I (x) U)|Phi+> and U^dagger is applied before the controlled gate on the
// second half.
TeleportedResult teleported_measure(const PauliString& o_a, const PauliString& o_b,
                                    const DenseState& state,
                                    const std::complex<double> (*entangler)[2] = nullptr);

} // namespace seamsim
