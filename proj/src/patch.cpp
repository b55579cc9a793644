#include "seamsim/patch.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace seamsim {

const char* variant_name(PatchVariant v) {
    switch (v) {
        case PatchVariant::Plain: return "plain";
        case PatchVariant::Seam: return "seam";
        case PatchVariant::NaiveSeam: return "naive_seam";
        case PatchVariant::MultiSeam: return "multiseam";
    }
    return "?";
}

PatchVariant variant_from_name(const std::string& name) {
    if (name == "plain") return PatchVariant::Plain;
    if (name == "seam") return PatchVariant::Seam;
    if (name == "naive_seam") return PatchVariant::NaiveSeam;
    if (name == "multiseam") return PatchVariant::MultiSeam;
    throw std::invalid_argument("unknown patch variant '" + name + "'");
}

int naive_seam_effective_distance(int d) {
    int faults = ((d + 1) / 2 + 1) / 2; // ceil(0.5 * floor((d+1)/2))
    return 2 * faults - 1;
}

namespace {

// CNOT step of each diagonal direction, chosen so that mid-sequence ancilla
// faults spread onto a row pair (X checks) or a column pair (Z checks).
constexpr int kXStep[4] = {0, 1, 2, 3}; // NW, NE, SW, SE
constexpr int kZStep[4] = {0, 2, 1, 3}; // NW first, then SW, NE, SE

constexpr int kDirDx[4] = {-1, 0, -1, 0}; // data col offset = a + dx
constexpr int kDirDy[4] = {-1, -1, 0, 0}; // data row offset = b + dy

struct Builder {
    PatchSpec spec;
    PatchLayout lay;
    Circuit c;
    int W, rows, n_rounds;
    uint32_t next_qubit = 0;
    std::vector<uint32_t> all_qubits;

    explicit Builder(const PatchSpec& s) : spec(s), W(0), rows(0), n_rounds(0) {
        if (s.d < 3 || s.d % 2 == 0) throw std::invalid_argument("distance must be odd and >= 3");
        if (s.basis != 'Z' && s.basis != 'X') throw std::invalid_argument("basis must be Z or X");
        rows = s.d;
        switch (s.variant) {
            case PatchVariant::Plain:
            case PatchVariant::NaiveSeam: W = s.d; break;
            case PatchVariant::Seam: W = s.d + 1; break;
            case PatchVariant::MultiSeam: W = 4 * s.d + 3; break;
        }
        n_rounds = s.effective_rounds();
        lay.d = s.d;
        lay.data_cols = W;
        lay.data_rows = rows;
        lay.n_data = W * rows;
        next_qubit = lay.n_data;
        if (s.variant == PatchVariant::Seam) lay.seam_data_cols = {(s.d + 1) / 2};
        if (s.variant == PatchVariant::MultiSeam) lay.seam_data_cols = {s.d, 3 * s.d + 2};
    }

    bool site_exists(int a, int b, bool& z_type) const {
        z_type = ((a + b) % 2 == 0);
        bool top = b == 0, bot = b == rows, left = a == 0, right = a == W;
        if ((top || bot) && (left || right)) return false;
        if (top || bot) return !z_type;   // X boundary along top/bottom
        if (left || right) return z_type; // Z boundary along left/right
        return true;
    }

    // Bell ancilla columns and the seam column they belong to (-1 = regular).
    int bell_seam_col(int a) const {
        if (spec.variant == PatchVariant::Seam || spec.variant == PatchVariant::MultiSeam) {
            for (int sc : lay.seam_data_cols)
                if (a == sc || a == sc + 1) return sc;
        } else if (spec.variant == PatchVariant::NaiveSeam) {
            if (a == (spec.d + 1) / 2) return a; // single teleported column, 2+2 split
        }
        return -1;
    }

    void enumerate_sites() {
        for (int b = 0; b <= rows; b++) {
            for (int a = 0; a <= W; a++) {
                bool z_type;
                if (!site_exists(a, b, z_type)) continue;
                StabSite s;
                s.a = a;
                s.b = b;
                s.z_type = z_type;
                int sc = bell_seam_col(a);
                s.bell = sc >= 0;
                const int* steps = z_type ? kZStep : kXStep;
                for (int k = 0; k < 4; k++) {
                    int i = a + kDirDx[k], j = b + kDirDy[k];
                    if (i < 0 || i >= W || j < 0 || j >= rows) continue;
                    s.data[k] = lay.data_id(i, j);
                    s.cnot_step[k] = steps[k];
                    if (s.bell) {
                        if (spec.variant == PatchVariant::NaiveSeam) {
                            s.half[k] = i < sc ? 0 : 1;
                        } else if (i < sc) {
                            s.half[k] = 0;
                        } else if (i > sc) {
                            s.half[k] = 1;
                        } else {
                            // zig-zag ownership of the seam column
                            s.half[k] = ((j + sc) % 2 == 1) ? 0 : 1;
                        }
                    }
                }
                s.anc[0] = (int)next_qubit++;
                if (s.bell) {
                    s.anc[1] = (int)next_qubit++;
                    lay.bell_pairs.push_back({(uint32_t)s.anc[0], (uint32_t)s.anc[1]});
                }
                lay.stabs.push_back(s);
            }
        }
        all_qubits.resize(next_qubit);
        for (uint32_t q = 0; q < next_qubit; q++) all_qubits[q] = q;
    }

    void emit_gate(InstrKind k, std::vector<uint32_t> qs) {
        if (!qs.empty()) c.append({k, std::move(qs), {}, {}, 0});
    }
    void emit_noise(ChannelKind k, double p, std::vector<uint32_t> qs) {
        if (p > 0.0 && !qs.empty()) c.noise(k, p, std::move(qs));
    }
    void idle_noise(const std::set<uint32_t>& engaged) {
        std::vector<uint32_t> idle;
        for (uint32_t q : all_qubits)
            if (!engaged.count(q)) idle.push_back(q);
        emit_noise(ChannelKind::DEPOL1, spec.p, std::move(idle));
    }

    BuildResult run() {
        enumerate_sites();
        // measurement bookkeeping: per site, per round, 1 or 2 record ids
        std::vector<std::vector<std::vector<uint32_t>>> site_recs(lay.stabs.size());
        uint32_t meas_count = 0;
        bool det_is_z = spec.basis == 'Z';

        for (int r = 0; r < n_rounds; r++) {
            bool first = r == 0, last = r == n_rounds - 1;

            // prep tick: ancilla resets / Bell preparation (+ data reset in round 1)
            {
                std::set<uint32_t> engaged;
                std::vector<uint32_t> resets;
                if (first)
                    for (uint32_t q = 0; q < lay.n_data; q++) resets.push_back(q);
                for (auto& s : lay.stabs)
                    if (!s.bell) resets.push_back((uint32_t)s.anc[0]);
                emit_gate(InstrKind::R, resets);
                for (auto& s : lay.stabs)
                    if (s.bell)
                        emit_gate(InstrKind::BELL_PREP,
                                  {(uint32_t)s.anc[0], (uint32_t)s.anc[1]});
                emit_noise(ChannelKind::ERRX, spec.p, resets);
                for (auto& s : lay.stabs)
                    if (s.bell)
                        emit_noise(ChannelKind::BELL_DEPOL2, spec.p_bell,
                                   {(uint32_t)s.anc[0], (uint32_t)s.anc[1]});
                engaged.insert(resets.begin(), resets.end());
                for (auto& s : lay.stabs)
                    if (s.bell) { engaged.insert(s.anc[0]); engaged.insert(s.anc[1]); }
                idle_noise(engaged);
                c.tick();
            }

            // pre-rotation tick: Hadamards on regular X ancillas (+ data in
            // round 1 of an X-basis memory)
            {
                std::vector<uint32_t> hs;
                if (first && spec.basis == 'X')
                    for (uint32_t q = 0; q < lay.n_data; q++) hs.push_back(q);
                for (auto& s : lay.stabs)
                    if (!s.bell && !s.z_type) hs.push_back((uint32_t)s.anc[0]);
                std::sort(hs.begin(), hs.end());
                emit_gate(InstrKind::H, hs);
                emit_noise(ChannelKind::DEPOL1, spec.p, hs);
                idle_noise({hs.begin(), hs.end()});
                c.tick();
            }

            // four CNOT steps
            for (int step = 0; step < 4; step++) {
                std::vector<uint32_t> pairs;
                for (auto& s : lay.stabs) {
                    for (int k = 0; k < 4; k++) {
                        if (s.data[k] < 0 || s.cnot_step[k] != step) continue;
                        uint32_t anc = (uint32_t)(s.bell ? s.anc[s.half[k]] : s.anc[0]);
                        uint32_t dq = (uint32_t)s.data[k];
                        if (s.z_type) { pairs.push_back(dq); pairs.push_back(anc); }
                        else          { pairs.push_back(anc); pairs.push_back(dq); }
                    }
                }
                emit_gate(InstrKind::CNOT, pairs);
                emit_noise(ChannelKind::DEPOL2, spec.p, pairs);
                idle_noise({pairs.begin(), pairs.end()});
                c.tick();
            }

            // post-rotation tick: regular X ancillas and both halves of
            // X-type Bell pairs rotate to the Z basis (+ data in the last
            // round of an X-basis memory)
            {
                std::vector<uint32_t> hs;
                if (last && spec.basis == 'X')
                    for (uint32_t q = 0; q < lay.n_data; q++) hs.push_back(q);
                for (auto& s : lay.stabs) {
                    if (s.z_type) continue;
                    hs.push_back((uint32_t)s.anc[0]);
                    if (s.bell) hs.push_back((uint32_t)s.anc[1]);
                }
                std::sort(hs.begin(), hs.end());
                emit_gate(InstrKind::H, hs);
                emit_noise(ChannelKind::DEPOL1, spec.p, hs);
                idle_noise({hs.begin(), hs.end()});
                c.tick();
            }

            // measurement tick (+ transversal data readout in the last round)
            {
                std::vector<uint32_t> mq;
                for (auto& s : lay.stabs) {
                    mq.push_back((uint32_t)s.anc[0]);
                    if (s.bell) mq.push_back((uint32_t)s.anc[1]);
                }
                std::vector<uint32_t> dataq;
                if (last)
                    for (uint32_t q = 0; q < lay.n_data; q++) dataq.push_back(q);
                std::vector<uint32_t> noisy = mq;
                noisy.insert(noisy.end(), dataq.begin(), dataq.end());
                emit_noise(ChannelKind::ERRX, spec.p, noisy);
                emit_gate(InstrKind::MZ, mq);
                for (size_t si = 0; si < lay.stabs.size(); si++) {
                    auto& s = lay.stabs[si];
                    std::vector<uint32_t> recs = {meas_count++};
                    if (s.bell) recs.push_back(meas_count++);
                    site_recs[si].push_back(std::move(recs));
                }
                emit_gate(InstrKind::MZ, dataq);
                uint32_t data_rec0 = meas_count;
                if (last) meas_count += lay.n_data;

                // detectors for this round
                for (size_t si = 0; si < lay.stabs.size(); si++) {
                    auto& s = lay.stabs[si];
                    bool det_type = s.z_type == det_is_z;
                    std::vector<uint32_t> refs;
                    if (first) {
                        if (!det_type) continue;
                        refs = site_recs[si][r];
                    } else {
                        refs = site_recs[si][r];
                        refs.insert(refs.end(), site_recs[si][r - 1].begin(),
                                    site_recs[si][r - 1].end());
                    }
                    c.append({InstrKind::DETECTOR, {}, {}, refs, 0});
                    c.detector_coords.push_back({2 * s.a, 2 * s.b, r, s.bell, s.z_type});
                }
                if (last) {
                    for (size_t si = 0; si < lay.stabs.size(); si++) {
                        auto& s = lay.stabs[si];
                        if ((s.z_type == det_is_z) == false) continue;
                        std::vector<uint32_t> refs = site_recs[si][r];
                        for (int k = 0; k < 4; k++)
                            if (s.data[k] >= 0) refs.push_back(data_rec0 + s.data[k]);
                        c.append({InstrKind::DETECTOR, {}, {}, refs, 0});
                        c.detector_coords.push_back({2 * s.a, 2 * s.b, n_rounds, s.bell, s.z_type});
                    }
                    // logical observable from the transversal readout
                    std::vector<uint32_t> obs;
                    if (spec.basis == 'Z') {
                        for (int i = 0; i < W; i++) obs.push_back(data_rec0 + lay.data_id(i, 0));
                    } else {
                        for (int j = 0; j < rows; j++) obs.push_back(data_rec0 + lay.data_id(0, j));
                    }
                    c.append({InstrKind::OBSERVABLE_INCLUDE, {}, {}, obs, 0});
                }
                emit_noise(ChannelKind::DEPOL1, spec.p, [&] {
                    std::vector<uint32_t> idle;
                    std::set<uint32_t> engaged(noisy.begin(), noisy.end());
                    for (uint32_t q : all_qubits)
                        if (!engaged.count(q)) idle.push_back(q);
                    return idle;
                }());
                if (r + 1 < n_rounds) c.tick();
            }
        }
        return {std::move(c), std::move(lay)};
    }
};

} // namespace

BuildResult build_memory_circuit(const PatchSpec& spec) { return Builder(spec).run(); }

} // namespace seamsim
