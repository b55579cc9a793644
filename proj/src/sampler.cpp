#include "seamsim/sampler.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

#include "seamsim/dem.hpp"
#include "seamsim/rng.hpp"
#include "seamsim/tableau.hpp"

namespace seamsim {

namespace {

// compiled circuit: flat op stream over 64-lane frame words
struct CompiledOp {
    enum Kind : uint8_t { H, CNOT, CLEAR, MZ, MX, NOISE1, NOISE2, NOISEX } kind;
    uint32_t a = 0, b = 0; // qubits or measurement index in b
    double p = 0;
    uint8_t n_terms = 0;   // 3 for DEPOL1, 15 for DEPOL2, 1 for ERRX
};

struct TermTable {
    // per term: x/z flips for the (up to two) qubits
    struct T { bool x0, z0, x1, z1; };
    std::vector<T> depol1, depol2, errx;
    TermTable() {
        auto enc = [](PauliLetter l) { return std::pair<bool, bool>{uint8_t(l) & 1, uint8_t(l) & 2}; };
        for (PauliLetter l : {PauliLetter::X, PauliLetter::Y, PauliLetter::Z}) {
            auto [x, z] = enc(l);
            depol1.push_back({x, z, false, false});
        }
        static const PauliLetter code[4] = {PauliLetter::X, PauliLetter::X, PauliLetter::Z,
                                            PauliLetter::Y};
        for (int a = 0; a < 4; a++)
            for (int b = 0; b < 4; b++) {
                if (a == 0 && b == 0) continue;
                T t{false, false, false, false};
                if (a != 0) { auto [x, z] = enc(code[a]); t.x0 = x; t.z0 = z; }
                if (b != 0) { auto [x, z] = enc(code[b]); t.x1 = x; t.z1 = z; }
                depol2.push_back(t);
            }
        errx.push_back({true, false, false, false});
    }
};

const TermTable kTerms;

struct CompiledCircuit {
    std::vector<CompiledOp> ops;
    uint32_t n_qubits = 0, n_meas = 0, n_det = 0, n_obs = 0;
    std::vector<std::vector<uint32_t>> det_refs;
    std::vector<std::pair<uint32_t, std::vector<uint32_t>>> obs_refs;
    std::vector<uint8_t> det_ref_value; // reference detector values (usually 0)
    std::vector<uint8_t> obs_ref_value;

    explicit CompiledCircuit(const Circuit& c) {
        n_qubits = c.n_qubits;
        n_meas = c.n_measurements;
        n_det = c.n_detectors;
        n_obs = c.n_observables;
        uint32_t meas = 0;
        for (const Instruction& in : c.instructions) {
            switch (in.kind) {
                case InstrKind::H:
                    for (uint32_t q : in.qubits) ops.push_back({CompiledOp::H, q, 0, 0, 0});
                    break;
                case InstrKind::CNOT:
                    for (size_t k = 0; k + 1 < in.qubits.size(); k += 2)
                        ops.push_back({CompiledOp::CNOT, in.qubits[k], in.qubits[k + 1], 0, 0});
                    break;
                case InstrKind::R:
                    for (uint32_t q : in.qubits) ops.push_back({CompiledOp::CLEAR, q, 0, 0, 0});
                    break;
                case InstrKind::BELL_PREP:
                    for (uint32_t q : in.qubits) ops.push_back({CompiledOp::CLEAR, q, 0, 0, 0});
                    break;
                case InstrKind::MZ:
                    for (uint32_t q : in.qubits) ops.push_back({CompiledOp::MZ, q, meas++, 0, 0});
                    break;
                case InstrKind::MX:
                    for (uint32_t q : in.qubits) ops.push_back({CompiledOp::MX, q, meas++, 0, 0});
                    break;
                case InstrKind::DETECTOR:
                    det_refs.push_back(in.meas_refs);
                    break;
                case InstrKind::OBSERVABLE_INCLUDE:
                    obs_refs.push_back({in.observable_index, in.meas_refs});
                    break;
                case InstrKind::NOISE: {
                    if (in.channel.p <= 0) break;
                    int ar = in.channel.arity();
                    for (size_t k = 0; k + ar <= in.qubits.size(); k += ar) {
                        CompiledOp op{};
                        op.p = in.channel.p;
                        op.a = in.qubits[k];
                        if (ar == 2) op.b = in.qubits[k + 1];
                        switch (in.channel.kind) {
                            case ChannelKind::DEPOL1:
                                op.kind = CompiledOp::NOISE1;
                                op.n_terms = 3;
                                break;
                            case ChannelKind::ERRX:
                                op.kind = CompiledOp::NOISEX;
                                op.n_terms = 1;
                                break;
                            case ChannelKind::DEPOL2:
                            case ChannelKind::BELL_DEPOL2:
                                op.kind = CompiledOp::NOISE2;
                                op.n_terms = 15;
                                break;
                        }
                        ops.push_back(op);
                    }
                    break;
                }
                case InstrKind::TICK:
                    break;
            }
        }
        auto ref = tableau_reference(c);
        det_ref_value = ref.detector_value;
        obs_ref_value = ref.observable_value;
    }
};

struct BlockSampler {
    const CompiledCircuit& cc;
    std::vector<uint64_t> fx, fz, meas;
    std::vector<uint64_t> det, obs;

    explicit BlockSampler(const CompiledCircuit& c)
        : cc(c), fx(c.n_qubits), fz(c.n_qubits), meas(c.n_meas), det(c.n_det), obs(c.n_obs) {}

    // geometric skip over the 64 lanes
    static inline int next_gap(CounterRng& rng, double log1mp) {
        double u = 1.0 - rng.next_double(); // (0, 1]
        double g = std::log(u) / log1mp;
        return g >= 64.0 ? 64 : (int)g;
    }

    void run(uint64_t seed, uint64_t block_index) {
        CounterRng rng(seed, block_index);
        std::fill(fx.begin(), fx.end(), 0);
        std::fill(fz.begin(), fz.end(), 0);
        for (const CompiledOp& op : cc.ops) {
            switch (op.kind) {
                case CompiledOp::H:
                    std::swap(fx[op.a], fz[op.a]);
                    break;
                case CompiledOp::CNOT:
                    fx[op.b] ^= fx[op.a];
                    fz[op.a] ^= fz[op.b];
                    break;
                case CompiledOp::CLEAR:
                    fx[op.a] = fz[op.a] = 0;
                    break;
                case CompiledOp::MZ:
                    meas[op.b] = fx[op.a];
                    fz[op.a] = 0;
                    break;
                case CompiledOp::MX:
                    meas[op.b] = fz[op.a];
                    fx[op.a] = 0;
                    break;
                case CompiledOp::NOISEX: {
                    double log1mp = std::log1p(-op.p);
                    int lane = next_gap(rng, log1mp);
                    while (lane < 64) {
                        fx[op.a] ^= 1ULL << lane;
                        lane += 1 + next_gap(rng, log1mp);
                    }
                    break;
                }
                case CompiledOp::NOISE1: {
                    double log1mp = std::log1p(-op.p);
                    int lane = next_gap(rng, log1mp);
                    while (lane < 64) {
                        auto& t = kTerms.depol1[rng.next_below(3)];
                        uint64_t m = 1ULL << lane;
                        if (t.x0) fx[op.a] ^= m;
                        if (t.z0) fz[op.a] ^= m;
                        lane += 1 + next_gap(rng, log1mp);
                    }
                    break;
                }
                case CompiledOp::NOISE2: {
                    double log1mp = std::log1p(-op.p);
                    int lane = next_gap(rng, log1mp);
                    while (lane < 64) {
                        auto& t = kTerms.depol2[rng.next_below(15)];
                        uint64_t m = 1ULL << lane;
                        if (t.x0) fx[op.a] ^= m;
                        if (t.z0) fz[op.a] ^= m;
                        if (t.x1) fx[op.b] ^= m;
                        if (t.z1) fz[op.b] ^= m;
                        lane += 1 + next_gap(rng, log1mp);
                    }
                    break;
                }
            }
        }
        for (size_t k = 0; k < cc.det_refs.size(); k++) {
            uint64_t w = cc.det_ref_value[k] ? ~0ULL : 0ULL;
            for (uint32_t r : cc.det_refs[k]) w ^= meas[r];
            det[k] = w;
        }
        std::fill(obs.begin(), obs.end(), 0);
        for (auto& [idx, refs] : cc.obs_refs) {
            uint64_t w = 0;
            for (uint32_t r : refs) w ^= meas[r];
            obs[idx] ^= w;
        }
        for (size_t k = 0; k < obs.size(); k++)
            if (cc.obs_ref_value.size() > k && cc.obs_ref_value[k]) obs[k] ^= ~0ULL;
    }
};

} // namespace

BitSamples sample_detectors(const Circuit& c, uint64_t shots, uint64_t seed, int threads) {
    CompiledCircuit cc(c);
    BitSamples out;
    out.shots = shots;
    out.n_detectors = cc.n_det;
    out.n_observables = cc.n_obs;
    out.det_stride = (cc.n_det + 63) / 64;
    out.detectors.assign(shots * out.det_stride, 0);
    out.observables.assign(shots, 0);
    uint64_t n_blocks = (shots + 63) / 64;

    auto work = [&](uint64_t b0, uint64_t b1) {
        BlockSampler bs(cc);
        for (uint64_t b = b0; b < b1; b++) {
            bs.run(seed, b);
            uint64_t lane_count = std::min<uint64_t>(64, shots - b * 64);
            for (uint32_t d = 0; d < cc.n_det; d++) {
                uint64_t w = bs.det[d];
                while (w) {
                    int lane = std::countr_zero(w);
                    w &= w - 1;
                    if ((uint64_t)lane < lane_count)
                        out.detectors[(b * 64 + lane) * out.det_stride + d / 64] |=
                            1ULL << (d % 64);
                }
            }
            for (uint64_t lane = 0; lane < lane_count; lane++) {
                uint64_t ob = 0;
                for (size_t k = 0; k < bs.obs.size(); k++)
                    if (bs.obs[k] >> lane & 1) ob |= 1ULL << k;
                out.observables[b * 64 + lane] = ob;
            }
        }
    };
    int nt = std::max(1, threads);
    if (nt == 1 || n_blocks < 2) {
        work(0, n_blocks);
    } else {
        std::vector<std::thread> pool;
        uint64_t chunk = (n_blocks + nt - 1) / nt;
        for (int t = 0; t < nt; t++) {
            uint64_t b0 = t * chunk, b1 = std::min(n_blocks, b0 + chunk);
            if (b0 >= b1) break;
            pool.emplace_back(work, b0, b1);
        }
        for (auto& th : pool) th.join();
    }
    return out;
}

double SampleStats::per_round_rate(double p_k, int k) {
    if (p_k <= 0) return 0;
    if (p_k >= 1) return 1;
    return 1.0 - std::pow(1.0 - p_k, 1.0 / k);
}

double SampleStats::per_round_sigma(double p_k, uint64_t n, int k) {
    if (n == 0) return 0;
    if (p_k <= 0) return 0;
    if (p_k >= 1) return INFINITY;
    double binom = std::sqrt(p_k * (1 - p_k) / (double)n);
    return binom / (k * std::pow(1 - p_k, 1.0 - 1.0 / k));
}

const char* SampleStats::csv_header() {
    return "variant,d,p,p_bell,basis,logical,shots,failures,rounds,p_hat_k,p_hat_L,sigma,seed";
}

std::string SampleStats::csv_row() const {
    char buf[320];
    snprintf(buf, sizeof buf, "%s,%d,%.10g,%.10g,%c,%c,%llu,%llu,%d,%.10e,%.10e,%.10e,%llu",
             variant.c_str(), d, p, p_bell, basis, logical_error,
             (unsigned long long)shots, (unsigned long long)failures, rounds, p_hat_k, p_hat,
             sigma, (unsigned long long)seed);
    return buf;
}

SampleStats estimate_logical_rate(const BuildResult& built, const PatchSpec& spec,
                                  uint64_t shots, uint64_t seed, int threads) {
    const Circuit& c = built.circuit;
    if (c.n_observables != 1)
        throw std::invalid_argument("estimate_logical_rate needs exactly one observable");
    CompiledCircuit cc(c);
    DetectorErrorModel dem = build_dem(c);
    MatchingGraph graph(dem);

    uint64_t n_blocks = (shots + 63) / 64;
    std::vector<uint64_t> fail_per_thread;
    int nt = std::max(1, threads);
    fail_per_thread.assign(nt, 0);

    auto work = [&](int tid, uint64_t b0, uint64_t b1) {
        BlockSampler bs(cc);
        std::vector<uint32_t> defects;
        uint64_t fails = 0;
        for (uint64_t b = b0; b < b1; b++) {
            bs.run(seed, b);
            uint64_t lane_count = std::min<uint64_t>(64, shots - b * 64);
            // per-lane defect lists
            std::vector<std::vector<uint32_t>> lane_defects(lane_count);
            for (uint32_t d = 0; d < cc.n_det; d++) {
                uint64_t w = bs.det[d];
                while (w) {
                    int lane = std::countr_zero(w);
                    w &= w - 1;
                    if ((uint64_t)lane < lane_count) lane_defects[lane].push_back(d);
                }
            }
            for (uint64_t lane = 0; lane < lane_count; lane++) {
                DecodeResult r = graph.decode(lane_defects[lane]);
                bool actual = (bs.obs[0] >> lane) & 1;
                bool predicted = r.prediction & 1;
                if (actual != predicted) fails++;
            }
        }
        fail_per_thread[tid] = fails;
    };
    if (nt == 1 || n_blocks < 2) {
        work(0, 0, n_blocks);
    } else {
        std::vector<std::thread> pool;
        uint64_t chunk = (n_blocks + nt - 1) / nt;
        for (int t = 0; t < nt; t++) {
            uint64_t b0 = t * chunk, b1 = std::min(n_blocks, b0 + chunk);
            if (b0 >= b1) break;
            pool.emplace_back(work, t, b0, b1);
        }
        for (auto& th : pool) th.join();
    }
    uint64_t failures = 0;
    for (uint64_t f : fail_per_thread) failures += f;

    SampleStats st;
    st.variant = variant_name(spec.variant);
    st.d = spec.d;
    st.p = spec.p;
    st.p_bell = spec.p_bell;
    st.basis = spec.basis;
    st.logical_error = spec.basis == 'Z' ? 'X' : 'Z';
    st.shots = shots;
    st.failures = failures;
    st.rounds = spec.effective_rounds();
    st.seed = seed;
    st.p_hat_k = shots ? (double)failures / (double)shots : 0.0;
    st.p_hat = SampleStats::per_round_rate(st.p_hat_k, st.rounds);
    st.sigma = SampleStats::per_round_sigma(st.p_hat_k, shots, st.rounds);
    return st;
}

double combined_storage_rate(const SampleStats& z_basis, const SampleStats& x_basis) {
    if (z_basis.basis != 'Z' || x_basis.basis != 'X')
        throw std::invalid_argument("combined rate needs one Z-basis and one X-basis run");
    return z_basis.p_hat + x_basis.p_hat;
}

} // namespace seamsim
