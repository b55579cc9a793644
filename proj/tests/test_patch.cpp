#include "doctest.h"

#include <algorithm>
#include <map>
#include <set>

#include "seamsim/patch.hpp"
#include "seamsim/tableau.hpp"

using namespace seamsim;

namespace {

// instruction index range of one extraction round (by counting TICKs)
std::pair<size_t, size_t> round_span(const Circuit& c, int round, int ticks_per_round = 8) {
    int tick = 0;
    size_t begin = 0, end = c.instructions.size();
    for (size_t i = 0; i < c.instructions.size(); i++) {
        if (c.instructions[i].kind == InstrKind::TICK) {
            tick++;
            if (tick == round * ticks_per_round) begin = i + 1;
            if (tick == (round + 1) * ticks_per_round) { end = i + 1; break; }
        }
    }
    return {begin, end};
}

// data-qubit X components left at the end of the circuit after injecting X on
// qubit `h` before instruction `pos`
std::vector<int> residual_data_x(const BuildResult& built, size_t pos, uint32_t h) {
    const Circuit& c = built.circuit;
    PauliFrame f(c.n_qubits);
    f.flip_x(h);
    for (size_t i = pos; i < c.instructions.size(); i++) {
        const Instruction& in = c.instructions[i];
        switch (in.kind) {
            case InstrKind::H:
                for (auto q : in.qubits) f.do_h(q);
                break;
            case InstrKind::CNOT:
                for (size_t k = 0; k + 1 < in.qubits.size(); k += 2)
                    f.do_cnot(in.qubits[k], in.qubits[k + 1]);
                break;
            case InstrKind::R:
            case InstrKind::BELL_PREP:
                for (auto q : in.qubits) f.set_zero(q);
                break;
            default:
                break;
        }
    }
    std::vector<int> xs;
    for (uint32_t q = 0; q < built.layout.n_data; q++)
        if (f.x(q)) xs.push_back((int)q);
    return xs;
}

// reduce a set of data X errors modulo the X-type stabilizer supports
std::vector<int> reduce_mod_x_stabs(std::vector<int> err, const PatchLayout& lay) {
    std::vector<std::set<int>> stabs;
    for (auto& s : lay.stabs) {
        if (s.z_type) continue;
        std::set<int> supp;
        for (int k = 0; k < 4; k++)
            if (s.data[k] >= 0) supp.insert(s.data[k]);
        stabs.push_back(std::move(supp));
    }
    std::set<int> e(err.begin(), err.end());
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& supp : stabs) {
            std::set<int> trial = e;
            for (int q : supp) {
                if (trial.count(q)) trial.erase(q);
                else trial.insert(q);
            }
            if (trial.size() < e.size()) {
                e = trial;
                changed = true;
            }
        }
    }
    return {e.begin(), e.end()};
}

int max_errors_in_one_column(const std::vector<int>& err, const PatchLayout& lay) {
    std::map<int, int> per_col;
    int best = 0;
    for (int q : err) best = std::max(best, ++per_col[lay.data_col(q)]);
    return best;
}

// worst per-column X-error multiplicity over every single-X injection on
// every Bell half at every fault position of one mid-circuit round
int worst_bell_hook(const BuildResult& built, int round) {
    auto [begin, end] = round_span(built.circuit, round);
    int worst = 0;
    for (auto& [h0, h1] : built.layout.bell_pairs) {
        for (uint32_t h : {h0, h1}) {
            for (size_t pos = begin; pos < end; pos++) {
                auto err = residual_data_x(built, pos, h);
                auto red = reduce_mod_x_stabs(err, built.layout);
                worst = std::max(worst, max_errors_in_one_column(red, built.layout));
            }
        }
    }
    return worst;
}

} // namespace

TEST_CASE("plain patch counts") {
    PatchSpec s;
    s.d = 3;
    s.rounds = 9;
    auto built = build_memory_circuit(s);
    CHECK(built.layout.n_data == 9);
    CHECK(built.layout.stabs.size() == 8); // d^2 - 1
    CHECK(built.circuit.n_detectors == 72);
    CHECK(built.circuit.n_observables == 1);
    CHECK(built.layout.bell_pairs.empty());

    CHECK_THROWS(build_memory_circuit(PatchSpec{PatchVariant::Plain, 4, 0, 'Z', 0, 0}));
}

TEST_CASE("detector count grows linearly in rounds") {
    for (auto v : {PatchVariant::Plain, PatchVariant::Seam}) {
        PatchSpec a{v, 3, 4, 'Z', 0, 0}, b{v, 3, 7, 'Z', 0, 0};
        auto ba = build_memory_circuit(a), bb = build_memory_circuit(b);
        uint32_t per_round = (uint32_t)ba.layout.stabs.size();
        CHECK(bb.circuit.n_detectors - ba.circuit.n_detectors == 3 * per_round);
    }
}

TEST_CASE("seam patch shape and Bell pair count") {
    for (int d : {3, 5}) {
        PatchSpec s{PatchVariant::Seam, d, 2, 'Z', 0, 0};
        auto built = build_memory_circuit(s);
        CHECK(built.layout.data_cols == d + 1);
        CHECK(built.layout.data_rows == d);
        CHECK((int)built.layout.bell_pairs.size() == 2 * d);
        CHECK(built.layout.stabs.size() == (size_t)(d * (d + 1) - 1));
    }
}

TEST_CASE("four CNOT steps per extraction round") {
    PatchSpec s{PatchVariant::Seam, 3, 3, 'Z', 0, 0};
    auto built = build_memory_circuit(s);
    auto [begin, end] = round_span(built.circuit, 1);
    int cnot_instr = 0;
    for (size_t i = begin; i < end; i++)
        if (built.circuit.instructions[i].kind == InstrKind::CNOT) cnot_instr++;
    CHECK(cnot_instr == 4);
}

TEST_CASE("p=0 circuits carry only Bell noise, 2d pairs per round") {
    PatchSpec s{PatchVariant::Seam, 3, 5, 'Z', 0.0, 0.015};
    auto built = build_memory_circuit(s);
    std::map<ChannelKind, int> counts;
    for (auto& in : built.circuit.instructions)
        if (in.kind == InstrKind::NOISE)
            counts[in.channel.kind] += (int)in.qubits.size() / in.channel.arity();
    CHECK(counts.size() == 1);
    CHECK(counts[ChannelKind::BELL_DEPOL2] == 2 * 3 * 5); // 2d pairs x rounds
}

TEST_CASE("multiseam geometry") {
    PatchSpec s{PatchVariant::MultiSeam, 3, 2, 'Z', 0, 0.01};
    auto built = build_memory_circuit(s);
    CHECK(built.layout.data_cols == 15); // 4d+3
    CHECK(built.layout.data_rows == 3);
    REQUIRE(built.layout.seam_data_cols.size() == 2);
    CHECK(built.layout.seam_data_cols[0] == 3);  // 1-indexed column d+1
    CHECK(built.layout.seam_data_cols[1] == 11); // 1-indexed column 3d+3
    CHECK((int)built.layout.bell_pairs.size() == 4 * 3); // two seams x 2d

    auto ref = tableau_reference(built.circuit);
    for (auto b : ref.detector_value) CHECK(b == 0);
}

TEST_CASE("naive seam effective distance formula") {
    CHECK(naive_seam_effective_distance(3) == 1);
    CHECK(naive_seam_effective_distance(5) == 3);
    CHECK(naive_seam_effective_distance(7) == 3);
    CHECK(naive_seam_effective_distance(9) == 5);
}

TEST_CASE("hook errors: seam schedule preserves the X distance, naive does not") {
    for (int d : {3, 5}) {
        PatchSpec s{PatchVariant::Seam, d, 3, 'Z', 0, 0};
        auto built = build_memory_circuit(s);
        INFO("seam d=", d);
        CHECK(worst_bell_hook(built, 1) <= 1);
    }
    {
        PatchSpec s{PatchVariant::MultiSeam, 3, 3, 'Z', 0, 0};
        auto built = build_memory_circuit(s);
        CHECK(worst_bell_hook(built, 1) <= 1);
    }
    for (int d : {3, 5}) {
        PatchSpec s{PatchVariant::NaiveSeam, d, 3, 'Z', 0, 0};
        auto built = build_memory_circuit(s);
        INFO("naive d=", d);
        CHECK(worst_bell_hook(built, 1) >= 2);
    }
}

TEST_CASE("X basis memory is well formed") {
    PatchSpec s{PatchVariant::Seam, 3, 3, 'X', 0, 0};
    auto built = build_memory_circuit(s);
    CHECK(built.circuit.validate().ok);
    auto ref = tableau_reference(built.circuit);
    for (auto b : ref.detector_value) CHECK(b == 0);
    REQUIRE(ref.observable_value.size() == 1);
    CHECK(ref.observable_value[0] == 0);
}
