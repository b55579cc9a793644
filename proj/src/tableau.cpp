#include "seamsim/tableau.hpp"

#include <bit>
#include <stdexcept>

namespace seamsim {

Tableau::Tableau(uint32_t n) : n_(n), words_((n + 63) / 64) {
    x_.assign((size_t)2 * n_ * words_, 0);
    z_.assign((size_t)2 * n_ * words_, 0);
    sign_.assign(2 * n_, {});
    for (uint32_t i = 0; i < n_; i++) {
        x_[(size_t)i * words_ + i / 64] |= 1ULL << (i % 64);             // destabilizer X_i
        z_[(size_t)(i + n_) * words_ + i / 64] |= 1ULL << (i % 64);      // stabilizer Z_i
    }
}

void Tableau::h(uint32_t q) {
    uint32_t w = q / 64;
    uint64_t m = 1ULL << (q % 64);
    for (uint32_t r = 0; r < 2 * n_; r++) {
        uint64_t& xw = x_[(size_t)r * words_ + w];
        uint64_t& zw = z_[(size_t)r * words_ + w];
        bool bx = xw & m, bz = zw & m;
        if (bx && bz) sign_[r].c ^= 1; // Y -> -Y
        if (bx != bz) { xw ^= m; zw ^= m; }
    }
}

void Tableau::cnot(uint32_t c, uint32_t t) {
    uint32_t wc = c / 64, wt = t / 64;
    uint64_t mc = 1ULL << (c % 64), mt = 1ULL << (t % 64);
    for (uint32_t r = 0; r < 2 * n_; r++) {
        uint64_t* xr = &x_[(size_t)r * words_];
        uint64_t* zr = &z_[(size_t)r * words_];
        bool xc = xr[wc] & mc, zc = zr[wc] & mc;
        bool xt = xr[wt] & mt, zt = zr[wt] & mt;
        if (xc && zt && (xt == zc)) sign_[r].c ^= 1;
        if (xc) xr[wt] ^= mt;
        if (zt) zr[wc] ^= mc;
    }
}

int Tableau::phase_of_product(const uint64_t* x1, const uint64_t* z1, const uint64_t* x2,
                              const uint64_t* z2) const {
    int64_t e = 0;
    for (uint32_t w = 0; w < words_; w++) {
        uint64_t a = x1[w], b = z1[w], c = x2[w], d = z2[w];
        uint64_t pos = (a & b & d & ~c) | (a & ~b & c & d) | (~a & b & c & ~d);
        uint64_t neg = (a & b & c & ~d) | (a & ~b & ~c & d) | (~a & b & c & d);
        e += std::popcount(pos) - std::popcount(neg);
    }
    // odd phases only arise on destabilizer rows, whose signs are never read
    int m = (int)(((e % 4) + 4) % 4);
    return (m >> 1) & 1;
}

void Tableau::rowsum_into(uint32_t h, uint32_t i) {
    uint64_t* xh = &x_[(size_t)h * words_];
    uint64_t* zh = &z_[(size_t)h * words_];
    const uint64_t* xi = &x_[(size_t)i * words_];
    const uint64_t* zi = &z_[(size_t)i * words_];
    int ph = phase_of_product(xi, zi, xh, zh);
    sign_[h].xor_with(sign_[i]);
    if (ph) sign_[h].c ^= 1;
    for (uint32_t w = 0; w < words_; w++) { xh[w] ^= xi[w]; zh[w] ^= zi[w]; }
}

MeasureResult Tableau::measure_z(uint32_t q) {
    MeasureResult res;
    uint32_t p = UINT32_MAX;
    for (uint32_t r = n_; r < 2 * n_; r++)
        if (xbit(r, q)) { p = r; break; }
    if (p != UINT32_MAX) {
        // random outcome: collapse onto Z_q with a fresh symbol as sign
        for (uint32_t r = 0; r < 2 * n_; r++)
            if (r != p && xbit(r, q)) rowsum_into(r, p);
        uint32_t d = p - n_;
        for (uint32_t w = 0; w < words_; w++) {
            x_[(size_t)d * words_ + w] = x_[(size_t)p * words_ + w];
            z_[(size_t)d * words_ + w] = z_[(size_t)p * words_ + w];
        }
        sign_[d] = sign_[p];
        for (uint32_t w = 0; w < words_; w++) {
            x_[(size_t)p * words_ + w] = 0;
            z_[(size_t)p * words_ + w] = 0;
        }
        z_[(size_t)p * words_ + q / 64] |= 1ULL << (q % 64);
        sign_[p].clear();
        uint32_t symbol = n_symbols_++;
        sign_[p].xor_symbol(symbol);
        res.outcome = sign_[p];
        res.random = true;
        return res;
    }
    // deterministic: accumulate stabilizer rows indicated by destabilizers
    std::vector<uint64_t> sx(words_, 0), sz(words_, 0);
    AffineSign sacc;
    for (uint32_t i = 0; i < n_; i++) {
        if (!xbit(i, q)) continue;
        const uint64_t* xi = &x_[(size_t)(i + n_) * words_];
        const uint64_t* zi = &z_[(size_t)(i + n_) * words_];
        int ph = phase_of_product(xi, zi, sx.data(), sz.data());
        sacc.xor_with(sign_[i + n_]);
        if (ph) sacc.c ^= 1;
        for (uint32_t w = 0; w < words_; w++) { sx[w] ^= xi[w]; sz[w] ^= zi[w]; }
    }
    res.outcome = sacc;
    res.random = false;
    return res;
}

MeasureResult Tableau::measure_x(uint32_t q) {
    h(q);
    MeasureResult r = measure_z(q);
    h(q);
    return r;
}

void Tableau::reset(uint32_t q) {
    MeasureResult m = measure_z(q);
    // flip to |0> conditioned on the measured expression
    if (m.outcome.c || m.outcome.has_symbols())
        apply_pauli_conditional(PauliString::single(q, PauliLetter::X), m.outcome);
}

void Tableau::bell_prep(uint32_t a, uint32_t b) {
    reset(a);
    reset(b);
    h(a);
    cnot(a, b);
}

void Tableau::apply_pauli(const PauliString& p) {
    AffineSign one;
    one.c = true;
    apply_pauli_conditional(p, one);
}

void Tableau::apply_pauli_conditional(const PauliString& p, const AffineSign& cond) {
    if (!cond.c && !cond.has_symbols()) return;
    for (uint32_t r = 0; r < 2 * n_; r++) {
        int parity = 0;
        for (auto& [q, l] : p.letters()) {
            bool px = uint8_t(l) & 1, pz = uint8_t(l) & 2;
            parity ^= (xbit(r, q) & pz) ^ (zbit(r, q) & px);
        }
        if (parity) sign_[r].xor_with(cond);
    }
}

namespace {

ReferenceResult run_tableau(const Circuit& c, size_t inject_pos, const PauliString* inject) {
    Tableau t(c.n_qubits);
    ReferenceResult out;
    std::vector<AffineSign> meas_expr;
    meas_expr.reserve(c.n_measurements);
    uint32_t det_index = 0;

    auto record = [&](MeasureResult&& m) {
        out.meas_value.push_back(m.outcome.c);
        out.meas_random.push_back(m.outcome.has_symbols());
        meas_expr.push_back(std::move(m.outcome));
    };

    for (size_t i = 0; i < c.instructions.size(); i++) {
        if (inject && i == inject_pos) t.apply_pauli(*inject);
        const Instruction& in = c.instructions[i];
        switch (in.kind) {
            case InstrKind::H:
                for (uint32_t q : in.qubits) t.h(q);
                break;
            case InstrKind::CNOT:
                for (size_t k = 0; k + 1 < in.qubits.size(); k += 2)
                    t.cnot(in.qubits[k], in.qubits[k + 1]);
                break;
            case InstrKind::R:
                for (uint32_t q : in.qubits) t.reset(q);
                break;
            case InstrKind::MZ:
                for (uint32_t q : in.qubits) record(t.measure_z(q));
                break;
            case InstrKind::MX:
                for (uint32_t q : in.qubits) record(t.measure_x(q));
                break;
            case InstrKind::BELL_PREP:
                t.bell_prep(in.qubits[0], in.qubits[1]);
                break;
            case InstrKind::DETECTOR: {
                AffineSign v;
                for (uint32_t r : in.meas_refs) v.xor_with(meas_expr.at(r));
                if (v.has_symbols())
                    throw std::runtime_error("detector " + std::to_string(det_index) +
                                             " is non-deterministic under no noise");
                out.detector_value.push_back(v.c);
                det_index++;
                break;
            }
            case InstrKind::OBSERVABLE_INCLUDE: {
                AffineSign v;
                for (uint32_t r : in.meas_refs) v.xor_with(meas_expr.at(r));
                if (v.has_symbols())
                    throw std::runtime_error("observable " + std::to_string(in.observable_index) +
                                             " is non-deterministic under no noise");
                if (out.observable_value.size() <= in.observable_index)
                    out.observable_value.resize(in.observable_index + 1, 0);
                out.observable_value[in.observable_index] ^= v.c;
                break;
            }
            case InstrKind::TICK:
            case InstrKind::NOISE:
                break;
        }
    }
    if (inject && inject_pos >= c.instructions.size()) t.apply_pauli(*inject);
    return out;
}

} // namespace

ReferenceResult tableau_reference(const Circuit& c) { return run_tableau(c, 0, nullptr); }

ReferenceResult tableau_run_with_injection(const Circuit& c, size_t position,
                                           const PauliString& pauli) {
    return run_tableau(c, position, &pauli);
}

} // namespace seamsim
