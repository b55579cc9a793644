#include "seamsim/pauli.hpp"

#include <stdexcept>

namespace seamsim {

PauliString PauliString::from_parts(const std::vector<uint32_t>& qubits,
                                    const std::vector<PauliLetter>& ls) {
    if (qubits.size() != ls.size()) throw std::invalid_argument("qubits/letters size mismatch");
    PauliString p;
    for (size_t i = 0; i < qubits.size(); i++) p.letters_[qubits[i]] = ls[i];
    return p;
}

PauliString operator*(const PauliString& a, const PauliString& b) {
    PauliString out;
    // phase of the product in units of i, mod 4
    int iphase = a.phase_ + b.phase_;
    out.letters_ = a.letters_;
    for (auto& [q, lb] : b.letters_) {
        auto it = out.letters_.find(q);
        if (it == out.letters_.end()) {
            out.letters_[q] = lb;
            continue;
        }
        uint8_t la = uint8_t(it->second), bb = uint8_t(lb);
        // with P = i^{xz} X^x Z^z (Hermitian convention), the product phase is
        // xa*za + xb*zb - xc*zc + 2*za*xb mod 4, where (xc, zc) = (xa^xb, za^zb)
        int xa = la & 1, za = (la >> 1) & 1, xb = bb & 1, zb = (bb >> 1) & 1;
        int xc = xa ^ xb, zc = za ^ zb;
        iphase += xa * za + xb * zb - xc * zc + 2 * za * xb;
        uint8_t l = la ^ bb;
        if (l == 0)
            out.letters_.erase(it);
        else
            it->second = PauliLetter(l);
    }
    out.phase_ = ((iphase % 4) + 4) % 4;
    return out;
}

bool PauliString::commutes_with(const PauliString& other) const {
    // symplectic inner product parity
    int parity = 0;
    for (auto& [q, la] : letters_) {
        auto it = other.letters_.find(q);
        if (it == other.letters_.end()) continue;
        uint8_t a = uint8_t(la), b = uint8_t(it->second);
        int xa = a & 1, za = (a >> 1) & 1, xb = b & 1, zb = (b >> 1) & 1;
        parity ^= (xa & zb) ^ (za & xb);
    }
    return parity == 0;
}

std::string PauliString::str() const {
    static const char* ph[4] = {"+", "+i", "-", "-i"};
    std::string s = ph[phase_];
    if (letters_.empty()) return s + "I";
    static const char* names[4] = {"?", "X", "Z", "Y"};
    for (auto& [q, l] : letters_) {
        s += names[uint8_t(l)];
        s += std::to_string(q);
    }
    return s;
}

PauliString PauliString::x_part() const {
    PauliString p;
    for (auto& [q, l] : letters_)
        if (uint8_t(l) & 1) p.letters_[q] = PauliLetter::X;
    return p;
}

PauliString PauliString::z_part() const {
    PauliString p;
    for (auto& [q, l] : letters_)
        if (uint8_t(l) & 2) p.letters_[q] = PauliLetter::Z;
    return p;
}

ConjugationResult conjugate_through_gate(const PauliString& p, GateKind gate, uint32_t q0,
                                         uint32_t q1) {
    ConjugationResult res;
    switch (gate) {
        case GateKind::H: {
            // X <-> Z on q0; Y -> -Y
            PauliString out = p;
            bool bx = p.has_x(q0), bz = p.has_z(q0);
            if (bx || bz) {
                PauliString q = PauliString::single(q0, bx && bz ? PauliLetter::Y
                                                    : bx         ? PauliLetter::Z
                                                                 : PauliLetter::X);
                // rebuild: strip q0 then multiply the swapped letter back in
                std::vector<uint32_t> qs;
                std::vector<PauliLetter> ls;
                for (auto& [qq, ll] : p.letters())
                    if (qq != q0) { qs.push_back(qq); ls.push_back(ll); }
                out = PauliString::from_parts(qs, ls) * q;
            }
            res.pauli = out;
            return res;
        }
        case GateKind::CNOT: {
            if (q1 == UINT32_MAX) throw std::invalid_argument("CNOT needs two qubits");
            PauliString out = p;
            // X_c -> X_c X_t, Z_t -> Z_c Z_t
            if (p.has_x(q0)) out = out * PauliString::single(q1, PauliLetter::X);
            if (p.has_z(q1)) out = out * PauliString::single(q0, PauliLetter::Z);
            res.pauli = out;
            return res;
        }
        case GateKind::R: {
            // reset discards the frame on that qubit
            std::vector<uint32_t> qs;
            std::vector<PauliLetter> ls;
            for (auto& [qq, ll] : p.letters())
                if (qq != q0) { qs.push_back(qq); ls.push_back(ll); }
            res.pauli = PauliString::from_parts(qs, ls);
            return res;
        }
        case GateKind::MZ:
            res.pauli = p;
            res.frame_randomization = p.has_x(q0);
            return res;
        case GateKind::MX:
            res.pauli = p;
            res.frame_randomization = p.has_z(q0);
            return res;
    }
    throw std::logic_error("unreachable");
}

} // namespace seamsim
