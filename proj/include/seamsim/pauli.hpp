#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace seamsim {

enum class PauliLetter : uint8_t { X = 1, Z = 2, Y = 3 }; // bit0 = x part, bit1 = z part

// Sparse multi-qubit Pauli operator. The phase is tracked internally as a
// power of i so products stay associative (Pauli group structure); sign()
// exposes the +/-1 view used everywhere else, with Y treated as the
// Hermitian letter (Y = iXZ bookkeeping).
class PauliString {
  public:
    PauliString() = default;

    static PauliString single(uint32_t qubit, PauliLetter l) {
        PauliString p;
        p.letters_[qubit] = l;
        return p;
    }
    static PauliString from_parts(const std::vector<uint32_t>& qubits,
                                  const std::vector<PauliLetter>& ls);

    bool identity() const { return letters_.empty(); }
    // +1 for phases {1, i}, -1 for {-1, -i}
    int sign() const { return phase_ < 2 ? +1 : -1; }
    // power of i in front of the tensor product of Hermitian letters
    int i_phase() const { return phase_; }
    bool hermitian() const { return phase_ % 2 == 0; }
    const std::map<uint32_t, PauliLetter>& letters() const { return letters_; }

    bool has_x(uint32_t q) const {
        auto it = letters_.find(q);
        return it != letters_.end() && (uint8_t(it->second) & 1);
    }
    bool has_z(uint32_t q) const {
        auto it = letters_.find(q);
        return it != letters_.end() && (uint8_t(it->second) & 2);
    }

    // group product a*b, sign tracked modulo +/-1
    friend PauliString operator*(const PauliString& a, const PauliString& b);

    bool commutes_with(const PauliString& other) const;

    bool operator==(const PauliString& other) const {
        return phase_ == other.phase_ && letters_ == other.letters_;
    }

    std::string str() const;

    // X and Z components (Y contributes to both); signs are +1
    PauliString x_part() const;
    PauliString z_part() const;

  private:
    std::map<uint32_t, PauliLetter> letters_;
    int phase_ = 0; // power of i, mod 4
};

// Per-qubit X/Z error frame, bit per qubit. Value type; the word-parallel
// sampler keeps its own 64-lane layout.
class PauliFrame {
  public:
    explicit PauliFrame(uint32_t n_qubits = 0) : x_((n_qubits + 63) / 64), z_(x_.size()) {}

    void clear() {
        std::fill(x_.begin(), x_.end(), 0);
        std::fill(z_.begin(), z_.end(), 0);
    }
    bool any() const {
        for (auto w : x_) if (w) return true;
        for (auto w : z_) if (w) return true;
        return false;
    }

    bool x(uint32_t q) const { return (x_[q >> 6] >> (q & 63)) & 1; }
    bool z(uint32_t q) const { return (z_[q >> 6] >> (q & 63)) & 1; }
    void flip_x(uint32_t q) { x_[q >> 6] ^= 1ULL << (q & 63); }
    void flip_z(uint32_t q) { z_[q >> 6] ^= 1ULL << (q & 63); }
    void set_zero(uint32_t q) {
        x_[q >> 6] &= ~(1ULL << (q & 63));
        z_[q >> 6] &= ~(1ULL << (q & 63));
    }

    void apply(const PauliString& p) {
        for (auto& [q, l] : p.letters()) {
            if (uint8_t(l) & 1) flip_x(q);
            if (uint8_t(l) & 2) flip_z(q);
        }
    }

    // gate actions (Heisenberg propagation of the error frame)
    void do_h(uint32_t q) {
        bool bx = x(q), bz = z(q);
        if (bx != bz) { flip_x(q); flip_z(q); }
    }
    void do_cnot(uint32_t c, uint32_t t) {
        if (x(c)) flip_x(t);
        if (z(t)) flip_z(c);
    }

  private:
    std::vector<uint64_t> x_, z_;
};

enum class GateKind : uint8_t { H, CNOT, R, MZ, MX };

struct ConjugationResult {
    PauliString pauli;
    bool frame_randomization = false; // anticommuting Pauli hit a measurement
};

// Clifford conjugation g P g^dagger for the supported gate set. For MZ/MX the
// Pauli is unchanged but an anticommuting component is flagged as a
// frame-randomization event.
ConjugationResult conjugate_through_gate(const PauliString& p, GateKind gate,
                                         uint32_t q0, uint32_t q1 = UINT32_MAX);

} // namespace seamsim
