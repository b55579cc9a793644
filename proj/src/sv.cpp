#include "seamsim/sv.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace seamsim {

namespace {
constexpr double kSqrtHalf = 0.70710678118654752440;
}

DenseState::DenseState(uint32_t n) : n_(n), amp_(size_t(1) << n, 0.0) { amp_[0] = 1.0; }

double DenseState::norm() const {
    double s = 0;
    for (auto& a : amp_) s += std::norm(a);
    return std::sqrt(s);
}

void DenseState::normalize() {
    double nn = norm();
    if (nn <= 0) throw std::runtime_error("normalizing a zero state");
    for (auto& a : amp_) a /= nn;
}

void DenseState::apply_h(uint32_t q) {
    size_t bit = size_t(1) << q;
    for (size_t i = 0; i < amp_.size(); i++) {
        if (i & bit) continue;
        auto a = amp_[i], b = amp_[i | bit];
        amp_[i] = kSqrtHalf * (a + b);
        amp_[i | bit] = kSqrtHalf * (a - b);
    }
}

void DenseState::apply_cnot(uint32_t c, uint32_t t) {
    size_t cb = size_t(1) << c, tb = size_t(1) << t;
    for (size_t i = 0; i < amp_.size(); i++)
        if ((i & cb) && !(i & tb)) std::swap(amp_[i], amp_[i | tb]);
}

namespace {

struct PauliMasks {
    size_t xm = 0, zm = 0;
    int ny = 0;
    static PauliMasks of(const PauliString& p) {
        PauliMasks m;
        for (auto& [q, l] : p.letters()) {
            if (uint8_t(l) & 1) m.xm |= size_t(1) << q;
            if (uint8_t(l) & 2) m.zm |= size_t(1) << q;
            if (l == PauliLetter::Y) m.ny++;
        }
        return m;
    }
};

inline std::complex<double> i_power(int k) {
    switch (((k % 4) + 4) % 4) {
        case 0: return {1, 0};
        case 1: return {0, 1};
        case 2: return {-1, 0};
        default: return {0, -1};
    }
}

} // namespace

void DenseState::apply_pauli(const PauliString& p) {
    PauliMasks m = PauliMasks::of(p);
    std::complex<double> phase = i_power(m.ny + p.i_phase());
    std::vector<std::complex<double>> out(amp_.size());
    for (size_t b = 0; b < amp_.size(); b++) {
        double sgn = (std::popcount(b & m.zm) & 1) ? -1.0 : 1.0;
        out[b ^ m.xm] = phase * sgn * amp_[b];
    }
    amp_ = std::move(out);
}

void DenseState::apply_controlled_pauli(uint32_t control, const PauliString& p) {
    PauliMasks m = PauliMasks::of(p);
    size_t cb = size_t(1) << control;
    std::complex<double> phase = i_power(m.ny + p.i_phase());
    std::vector<std::complex<double>> out = amp_;
    for (size_t b = 0; b < amp_.size(); b++) {
        if (!(b & cb)) continue;
        double sgn = (std::popcount(b & m.zm) & 1) ? -1.0 : 1.0;
        out[b ^ m.xm] = phase * sgn * amp_[b];
        if ((b ^ m.xm) != b && !((b ^ m.xm) & cb))
            throw std::logic_error("controlled Pauli must not touch the control");
    }
    amp_ = std::move(out);
}

void DenseState::apply_single_qubit(uint32_t q, const std::complex<double> u[2][2]) {
    size_t bit = size_t(1) << q;
    for (size_t i = 0; i < amp_.size(); i++) {
        if (i & bit) continue;
        auto a = amp_[i], b = amp_[i | bit];
        amp_[i] = u[0][0] * a + u[0][1] * b;
        amp_[i | bit] = u[1][0] * a + u[1][1] * b;
    }
}

double DenseState::fidelity(const DenseState& a, const DenseState& b) {
    if (a.n_ != b.n_) throw std::invalid_argument("fidelity of different-size states");
    std::complex<double> ov = 0;
    for (size_t i = 0; i < a.amp_.size(); i++) ov += std::conj(a.amp_[i]) * b.amp_[i];
    return std::abs(ov);
}

DenseState DenseState::with_bell_pair() const {
    DenseState out(n_ + 2);
    size_t base = amp_.size();
    std::fill(out.amp_.begin(), out.amp_.end(), 0.0);
    for (size_t b = 0; b < amp_.size(); b++) {
        out.amp_[b] = kSqrtHalf * amp_[b];                       // |00> half
        out.amp_[b | (base << 1) | base] = kSqrtHalf * amp_[b];  // |11> half
    }
    return out;
}

DenseState operator*(std::complex<double> s, const DenseState& st) {
    DenseState out = st;
    for (auto& a : out.amp_) a *= s;
    return out;
}

DenseState& DenseState::operator+=(const DenseState& o) {
    if (n_ != o.n_) throw std::invalid_argument("adding different-size states");
    for (size_t i = 0; i < amp_.size(); i++) amp_[i] += o.amp_[i];
    return *this;
}

ProjectiveResult direct_projective_measure(const PauliString& o, const DenseState& state) {
    DenseState applied = state;
    applied.apply_pauli(o);
    ProjectiveResult res{0, 0, DenseState(state.n_qubits()), DenseState(state.n_qubits())};
    auto& plus = res.post_plus.amps();
    auto& minus = res.post_minus.amps();
    for (size_t i = 0; i < state.amps().size(); i++) {
        plus[i] = 0.5 * (state.amps()[i] + applied.amps()[i]);
        minus[i] = 0.5 * (state.amps()[i] - applied.amps()[i]);
    }
    double np = res.post_plus.norm(), nm = res.post_minus.norm();
    res.prob_plus = np * np;
    res.prob_minus = nm * nm;
    if (np > 1e-12) res.post_plus.normalize();
    if (nm > 1e-12) res.post_minus.normalize();
    return res;
}

TeleportedResult teleported_measure(const PauliString& o_a, const PauliString& o_b,
                                    const DenseState& state,
                                    const std::complex<double> (*entangler)[2]) {
    uint32_t n = state.n_qubits();
    // Hermitian-unitary check: tensor products of Pauli letters are Hermitian
    // unitaries up to the tracked power of i; an odd i-phase is anti-Hermitian.
    for (const PauliString* o : {&o_a, &o_b}) {
        for (auto& [q, l] : o->letters()) {
            (void)l;
            if (q >= n) throw std::invalid_argument("operator acts outside the register");
        }
        if (!o->hermitian())
            throw std::invalid_argument("operator carries a +/-i phase and is not Hermitian");
    }

    DenseState full = state.with_bell_pair();
    uint32_t anc1 = n, anc2 = n + 1;
    if (entangler) {
        full.apply_single_qubit(anc2, entangler);
        // undo it before the controlled gate on the second half
        std::complex<double> dag[2][2] = {{std::conj(entangler[0][0]), std::conj(entangler[1][0])},
                                          {std::conj(entangler[0][1]), std::conj(entangler[1][1])}};
        full.apply_single_qubit(anc2, dag);
    }
    full.apply_controlled_pauli(anc1, o_a);
    full.apply_controlled_pauli(anc2, o_b);
    full.apply_h(anc1);
    full.apply_h(anc2);

    TeleportedResult res{{0, 0}, {DenseState(n), DenseState(n)}, {0, 0}};
    res.post_xor[0].amps().assign(size_t(1) << n, 0.0);
    res.post_xor[1].amps().assign(size_t(1) << n, 0.0);
    double pr_branch[2][2] = {{0, 0}, {0, 0}};
    size_t b1 = size_t(1) << anc1, b2 = size_t(1) << anc2;
    // branch (m1, m2): amplitude slice; identical XOR branches must agree, so
    // accumulate probabilities per (m1, m2) and keep one representative state
    std::vector<std::complex<double>> branch_amp[2][2];
    for (int m1 = 0; m1 < 2; m1++)
        for (int m2 = 0; m2 < 2; m2++) branch_amp[m1][m2].assign(size_t(1) << n, 0.0);
    for (size_t b = 0; b < full.amps().size(); b++) {
        int m1 = (b & b1) ? 1 : 0, m2 = (b & b2) ? 1 : 0;
        size_t sys = b & (b1 - 1);
        branch_amp[m1][m2][sys] += full.amps()[b];
    }
    for (int m1 = 0; m1 < 2; m1++)
        for (int m2 = 0; m2 < 2; m2++) {
            double p2 = 0;
            for (auto& a : branch_amp[m1][m2]) p2 += std::norm(a);
            pr_branch[m1][m2] = p2;
        }
    res.bit_marginal[0] = pr_branch[1][0] + pr_branch[1][1];
    res.bit_marginal[1] = pr_branch[0][1] + pr_branch[1][1];
    res.prob_xor[0] = pr_branch[0][0] + pr_branch[1][1];
    res.prob_xor[1] = pr_branch[0][1] + pr_branch[1][0];
    // representative post state: the heavier branch of the XOR class
    for (int x = 0; x < 2; x++) {
        int m1 = pr_branch[0][x] >= pr_branch[1][1 - x] ? 0 : 1;
        int m2 = m1 ? 1 - x : x;
        res.post_xor[x].amps() = branch_amp[m1][m2];
        if (res.prob_xor[x] > 1e-14) res.post_xor[x].normalize();
    }
    return res;
}

} // namespace seamsim
