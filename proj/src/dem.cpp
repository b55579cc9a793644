#include "seamsim/dem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <queue>
#include <stdexcept>

namespace seamsim {

ErrorPropagator::ErrorPropagator(const Circuit& c) : c_(&c) {
    timeline_.resize(c.n_qubits);
    meas_to_dets_.resize(c.n_measurements);
    meas_to_obs_.assign(c.n_measurements, 0);
    uint32_t meas = 0, det = 0;
    for (size_t i = 0; i < c.instructions.size(); i++) {
        const Instruction& in = c.instructions[i];
        switch (in.kind) {
            case InstrKind::H:
                for (uint32_t q : in.qubits) timeline_[q].push_back({(uint32_t)i, 0, 0});
                break;
            case InstrKind::CNOT:
                for (size_t k = 0; k + 1 < in.qubits.size(); k += 2) {
                    timeline_[in.qubits[k]].push_back({(uint32_t)i, 1, in.qubits[k + 1]});
                    timeline_[in.qubits[k + 1]].push_back({(uint32_t)i, 2, in.qubits[k]});
                }
                break;
            case InstrKind::R:
                for (uint32_t q : in.qubits) timeline_[q].push_back({(uint32_t)i, 5, 0});
                break;
            case InstrKind::BELL_PREP:
                for (uint32_t q : in.qubits) timeline_[q].push_back({(uint32_t)i, 5, 0});
                break;
            case InstrKind::MZ:
                for (uint32_t q : in.qubits) timeline_[q].push_back({(uint32_t)i, 3, meas++});
                break;
            case InstrKind::MX:
                for (uint32_t q : in.qubits) timeline_[q].push_back({(uint32_t)i, 4, meas++});
                break;
            case InstrKind::DETECTOR:
                for (uint32_t r : in.meas_refs) meas_to_dets_[r].push_back(det);
                det++;
                break;
            case InstrKind::OBSERVABLE_INCLUDE:
                for (uint32_t r : in.meas_refs) meas_to_obs_[r] ^= 1ULL << in.observable_index;
                break;
            default:
                break;
        }
    }
}

Symptom ErrorPropagator::propagate(size_t position, const PauliString& pauli) const {
    // sparse event-driven frame walk; the frame touches few qubits
    struct Bits { bool x = false, z = false; };
    std::map<uint32_t, Bits> frame;
    std::map<uint32_t, uint8_t> det_parity;
    uint64_t obs = 0;

    for (auto& [q, l] : pauli.letters()) {
        Bits b;
        b.x = uint8_t(l) & 1;
        b.z = uint8_t(l) & 2;
        frame[q] = b;
    }

    // priority queue over (instruction position, timeline slot, qubit)
    using QE = std::pair<uint64_t, uint32_t>; // (pos<<20 | slot, qubit)
    std::priority_queue<QE, std::vector<QE>, std::greater<>> pq;
    std::map<uint32_t, bool> in_queue;

    auto schedule = [&](uint32_t q, size_t from_pos) {
        if (in_queue[q]) return;
        const auto& tl = timeline_[q];
        // first event at pos >= from_pos
        size_t lo = 0, hi = tl.size();
        while (lo < hi) {
            size_t mid = (lo + hi) / 2;
            if (tl[mid].pos < from_pos) lo = mid + 1; else hi = mid;
        }
        if (lo == tl.size()) return;
        pq.push({((uint64_t)tl[lo].pos << 20) | lo, q});
        in_queue[q] = true;
    };

    for (auto& [q, b] : frame)
        if (b.x || b.z) schedule(q, position);

    while (!pq.empty()) {
        auto [key, q] = pq.top();
        pq.pop();
        in_queue[q] = false;
        size_t slot = key & ((1 << 20) - 1);
        const Event& ev = timeline_[q][slot];
        Bits& b = frame[q];
        bool keep = true;
        switch (ev.role) {
            case 0: std::swap(b.x, b.z); break;
            case 1: // control: X spreads to target
                if (b.x) {
                    Bits& t = frame[ev.other];
                    t.x ^= 1;
                    schedule(ev.other, ev.pos + 1);
                }
                break;
            case 2: // target: Z spreads to control
                if (b.z) {
                    Bits& ctl = frame[ev.other];
                    ctl.z ^= 1;
                    schedule(ev.other, ev.pos + 1);
                }
                break;
            case 3: // MZ
                if (b.x) {
                    for (uint32_t dd : meas_to_dets_[ev.other]) det_parity[dd] ^= 1;
                    obs ^= meas_to_obs_[ev.other];
                }
                b.z = false;
                break;
            case 4: // MX
                if (b.z) {
                    for (uint32_t dd : meas_to_dets_[ev.other]) det_parity[dd] ^= 1;
                    obs ^= meas_to_obs_[ev.other];
                }
                b.x = false;
                break;
            case 5: // reset / re-preparation
                b.x = b.z = false;
                break;
        }
        if (!(b.x || b.z)) keep = false;
        if (keep && slot + 1 < timeline_[q].size()) {
            pq.push({((uint64_t)timeline_[q][slot + 1].pos << 20) | (slot + 1), q});
            in_queue[q] = true;
        }
    }

    Symptom s;
    s.observables = obs;
    for (auto& [dd, par] : det_parity)
        if (par) s.detectors.push_back(dd);
    return s;
}

namespace {

struct SymKey {
    std::vector<uint32_t> dets;
    uint64_t obs;
    bool operator<(const SymKey& o) const {
        if (dets != o.dets) return dets < o.dets;
        return obs < o.obs;
    }
};

struct EdgeKey {
    int32_t d1, d2;
    uint64_t obs;
    bool operator<(const EdgeKey& o) const {
        if (d1 != o.d1) return d1 < o.d1;
        if (d2 != o.d2) return d2 < o.d2;
        return obs < o.obs;
    }
};

} // namespace

DetectorErrorModel build_dem(const Circuit& c) {
    auto diag = c.validate();
    if (!diag.ok) throw std::invalid_argument("build_dem on invalid circuit: " + diag.message);
    ErrorPropagator prop(c);

    struct TermSym {
        double p;
        Symptom sym, sym_x, sym_z;
        bool split_ok = false;
    };
    std::vector<TermSym> terms;

    for (size_t i = 0; i < c.instructions.size(); i++) {
        const Instruction& in = c.instructions[i];
        if (in.kind != InstrKind::NOISE || in.channel.p <= 0) continue;
        int ar = in.channel.arity();
        for (size_t k = 0; k + ar <= in.qubits.size(); k += ar) {
            std::vector<uint32_t> qs(in.qubits.begin() + k, in.qubits.begin() + k + ar);
            for (auto& term : channel_pauli_terms(in.channel, qs)) {
                TermSym ts;
                ts.p = term.probability;
                ts.sym = prop.propagate(i + 1, term.pauli);
                if (ts.sym.detectors.empty() && ts.sym.observables == 0) continue;
                PauliString px = term.pauli.x_part(), pz = term.pauli.z_part();
                if (!px.identity() && !pz.identity()) {
                    ts.sym_x = prop.propagate(i + 1, px);
                    ts.sym_z = prop.propagate(i + 1, pz);
                    ts.split_ok = true;
                }
                terms.push_back(std::move(ts));
            }
        }
    }

    DetectorErrorModel dem;
    dem.n_detectors = c.n_detectors;
    dem.n_observables = c.n_observables;
    dem.detector_coords = c.detector_coords;

    // merged mechanisms
    std::map<SymKey, double> merged;
    for (auto& t : terms) {
        double& p = merged[{t.sym.detectors, t.sym.observables}];
        p = combine_probability(p, t.p);
    }

    // dictionary of small symptoms for decomposition (term-level and parts)
    std::map<std::vector<uint32_t>, std::vector<std::pair<uint64_t, double>>> known;
    auto learn = [&](const Symptom& s, double p) {
        if (s.detectors.empty() || s.detectors.size() > 2) return;
        auto& variants = known[s.detectors];
        for (auto& [o, pp] : variants)
            if (o == s.observables) { pp = combine_probability(pp, p); return; }
        variants.push_back({s.observables, p});
    };
    for (auto& t : terms) {
        learn(t.sym, t.p);
        if (t.split_ok) { learn(t.sym_x, t.p); learn(t.sym_z, t.p); }
    }

    std::map<EdgeKey, double> edge_acc;
    auto add_edge = [&](const Symptom& s, double p) {
        int32_t d1 = (int32_t)s.detectors[0];
        int32_t d2 = s.detectors.size() == 2 ? (int32_t)s.detectors[1] : -1;
        double& acc = edge_acc[{d1, d2, s.observables}];
        acc = combine_probability(acc, p);
    };

    // exact-cover decomposition of a symptom into known <=2-detector parts;
    // among valid covers prefer larger-probability factors
    std::function<bool(std::vector<uint32_t>&, uint64_t, std::vector<Symptom>&, double,
                       std::vector<Symptom>&, double&)>
        cover = [&](std::vector<uint32_t>& rest, uint64_t obs_left, std::vector<Symptom>& acc,
                    double prod, std::vector<Symptom>& best, double& best_prod) -> bool {
        if (rest.empty()) {
            if (obs_left != 0) return false;
            if (prod > best_prod) { best_prod = prod; best = acc; }
            return true;
        }
        bool any = false;
        uint32_t first = rest[0];
        // pair `first` with another detector
        for (size_t j = 1; j < rest.size(); j++) {
            std::vector<uint32_t> key = {first, rest[j]};
            auto it = known.find(key);
            if (it == known.end()) continue;
            std::vector<uint32_t> next;
            for (size_t t = 1; t < rest.size(); t++)
                if (t != j) next.push_back(rest[t]);
            for (auto& [o, pp] : it->second) {
                Symptom part{key, o};
                acc.push_back(part);
                any |= cover(next, obs_left ^ o, acc, prod * pp, best, best_prod);
                acc.pop_back();
            }
        }
        // or alone (boundary)
        auto it = known.find(std::vector<uint32_t>{first});
        if (it != known.end()) {
            std::vector<uint32_t> next(rest.begin() + 1, rest.end());
            for (auto& [o, pp] : it->second) {
                Symptom part{{first}, o};
                acc.push_back(part);
                any |= cover(next, obs_left ^ o, acc, prod * pp, best, best_prod);
                acc.pop_back();
            }
        }
        return any;
    };

    std::map<SymKey, double> residue_acc, undet_acc;
    for (auto& t : terms) {
        if (t.sym.detectors.empty()) {
            if (t.sym.observables) {
                double& p = undet_acc[{t.sym.detectors, t.sym.observables}];
                p = combine_probability(p, t.p);
            }
            continue;
        }
        if (t.sym.detectors.size() <= 2) {
            add_edge(t.sym, t.p);
            continue;
        }
        // Y split into X and Z components when both stay graph-like
        if (t.split_ok && t.sym_x.detectors.size() >= 1 && t.sym_x.detectors.size() <= 2 &&
            t.sym_z.detectors.size() >= 1 && t.sym_z.detectors.size() <= 2) {
            add_edge(t.sym_x, t.p);
            add_edge(t.sym_z, t.p);
            continue;
        }
        // general factoring into known small symptoms
        std::vector<Symptom> acc, best;
        double best_prod = -1;
        std::vector<uint32_t> rest = t.sym.detectors;
        if (cover(rest, t.sym.observables, acc, 1.0, best, best_prod)) {
            for (auto& part : best) add_edge(part, t.p);
        } else {
            double& p = residue_acc[{t.sym.detectors, t.sym.observables}];
            p = combine_probability(p, t.p);
        }
    }

    for (auto& [k, p] : merged) {
        if (p < 1e-15) continue;
        dem.mechanisms.push_back({p, {k.dets, k.obs}});
    }
    for (auto& [k, p] : edge_acc) {
        if (p < 1e-15) continue;
        DemEdge e;
        e.d1 = k.d1;
        e.d2 = k.d2;
        e.observables = k.obs;
        e.p = p;
        e.weight = std::log((1 - p) / p);
        dem.edges.push_back(e);
    }
    for (auto& [k, p] : residue_acc) dem.residue.push_back({p, {k.dets, k.obs}});
    for (auto& [k, p] : undet_acc) dem.undetectable.push_back({p, {k.dets, k.obs}});
    return dem;
}

std::string DetectorErrorModel::serialize() const {
    std::string out = "SEAMSIM DEM v1\n";
    out += "detectors " + std::to_string(n_detectors) + "\n";
    out += "observables " + std::to_string(n_observables) + "\n";
    for (auto& m : mechanisms) {
        char buf[48];
        snprintf(buf, sizeof buf, "error(%.12g)", m.p);
        out += buf;
        for (uint32_t d : m.symptom.detectors) out += " D" + std::to_string(d);
        for (uint32_t b = 0; b < 64; b++)
            if (m.symptom.observables >> b & 1) out += " L" + std::to_string(b);
        out += '\n';
    }
    return out;
}

SeamRestriction seam_restriction(const DetectorErrorModel& dem) {
    if (dem.detector_coords.size() != dem.n_detectors)
        throw std::invalid_argument("seam_restriction needs detector coordinates");
    SeamRestriction out;
    auto coord = [&](int32_t d) -> const DetectorCoord& { return dem.detector_coords[d]; };
    for (const DemEdge& e : dem.edges) {
        if (e.p <= 0) continue;
        if (!coord(e.d1).bell || (e.d2 >= 0 && !coord(e.d2).bell))
            throw std::runtime_error("off-seam edge with nonzero probability (D" +
                                     std::to_string(e.d1) + ")");
        if (e.d2 < 0) {
            out.boundary_edges.push_back(e);
        } else {
            const auto& c1 = coord(e.d1);
            const auto& c2 = coord(e.d2);
            if (c1.round == c2.round && !(c1.x == c2.x && c1.y == c2.y))
                out.data_edges.push_back(e);
            else if (c1.x == c2.x && c1.y == c2.y && std::abs(c1.round - c2.round) == 1)
                out.time_edges.push_back(e);
            else
                out.other_edges.push_back(e);
        }
    }
    return out;
}

} // namespace seamsim
