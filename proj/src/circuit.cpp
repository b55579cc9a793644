#include "seamsim/circuit.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace seamsim {

std::vector<ChannelTerm> channel_pauli_terms(const NoiseChannel& c,
                                             const std::vector<uint32_t>& qubits) {
    if (c.p < 0.0 || c.p >= 1.0) throw std::invalid_argument("channel probability outside [0,1)");
    if ((int)qubits.size() != c.arity()) throw std::invalid_argument("channel arity mismatch");
    std::vector<ChannelTerm> out;
    switch (c.kind) {
        case ChannelKind::DEPOL1:
            for (PauliLetter l : {PauliLetter::X, PauliLetter::Y, PauliLetter::Z})
                out.push_back({PauliString::single(qubits[0], l), c.p / 3.0});
            break;
        case ChannelKind::ERRX:
            out.push_back({PauliString::single(qubits[0], PauliLetter::X), c.p});
            break;
        case ChannelKind::DEPOL2:
        case ChannelKind::BELL_DEPOL2: {
            // letters 0=I, 1=X, 2=Z, 3=Y on each side; skip I(x)I
            static const PauliLetter code[4] = {PauliLetter::X, PauliLetter::X, PauliLetter::Z,
                                                PauliLetter::Y};
            for (int a = 0; a < 4; a++)
                for (int b = 0; b < 4; b++) {
                    if (a == 0 && b == 0) continue;
                    std::vector<uint32_t> qs;
                    std::vector<PauliLetter> ps;
                    if (a != 0) { qs.push_back(qubits[0]); ps.push_back(code[a]); }
                    if (b != 0) { qs.push_back(qubits[1]); ps.push_back(code[b]); }
                    out.push_back({PauliString::from_parts(qs, ps), c.p / 15.0});
                }
            break;
        }
    }
    return out;
}

std::vector<ChannelTerm> bell_reduced_terms(double p_bell, uint32_t q0, uint32_t q1) {
    (void)q1;
    std::vector<ChannelTerm> out;
    for (PauliLetter l : {PauliLetter::X, PauliLetter::Z, PauliLetter::Y})
        out.push_back({PauliString::single(q0, l), 4.0 * p_bell / 15.0});
    return out;
}

void Circuit::append(Instruction in) {
    for (uint32_t q : in.qubits) n_qubits = std::max(n_qubits, q + 1);
    switch (in.kind) {
        case InstrKind::MZ:
        case InstrKind::MX:
            n_measurements += in.qubits.size();
            break;
        case InstrKind::DETECTOR:
            n_detectors++;
            break;
        case InstrKind::OBSERVABLE_INCLUDE:
            n_observables = std::max(n_observables, in.observable_index + 1);
            break;
        default:
            break;
    }
    instructions.push_back(std::move(in));
}

Diagnostics Circuit::validate() const {
    Diagnostics d;
    std::unordered_set<uint64_t> tick_used; // qubit ids used by non-noise ops in current tick
    uint32_t meas_seen = 0;
    size_t tick_index = 0;
    for (size_t i = 0; i < instructions.size(); i++) {
        const Instruction& in = instructions[i];
        auto fail = [&](const std::string& msg) {
            d.ok = false;
            d.message = msg + " (instruction " + std::to_string(i) + ", tick " +
                        std::to_string(tick_index) + ")";
            d.instruction_index = i;
            return d;
        };
        switch (in.kind) {
            case InstrKind::TICK:
                tick_used.clear();
                tick_index++;
                break;
            case InstrKind::NOISE:
                if (in.channel.p < 0.0 || in.channel.p >= 1.0)
                    return fail("noise probability outside [0,1)");
                if (in.qubits.size() % in.channel.arity() != 0)
                    return fail("noise operand count does not match channel arity");
                break;
            case InstrKind::DETECTOR:
            case InstrKind::OBSERVABLE_INCLUDE:
                for (uint32_t r : in.meas_refs)
                    if (r >= meas_seen) return fail("record reference to a future measurement");
                break;
            case InstrKind::CNOT:
                if (in.qubits.size() % 2) return fail("CNOT needs control/target pairs");
                for (size_t k = 0; k + 1 < in.qubits.size(); k += 2)
                    if (in.qubits[k] == in.qubits[k + 1]) return fail("CNOT with equal operands");
                [[fallthrough]];
            case InstrKind::H:
            case InstrKind::R:
            case InstrKind::MZ:
            case InstrKind::MX:
            case InstrKind::BELL_PREP:
                if (in.kind == InstrKind::BELL_PREP && in.qubits.size() != 2)
                    return fail("BELL_PREP targets exactly two qubits");
                for (uint32_t q : in.qubits)
                    if (!tick_used.insert(q).second)
                        return fail("qubit " + std::to_string(q) + " used twice in one tick");
                if (in.kind == InstrKind::MZ || in.kind == InstrKind::MX)
                    meas_seen += in.qubits.size();
                break;
        }
    }
    return d;
}

namespace {

const char* kind_name(InstrKind k) {
    switch (k) {
        case InstrKind::H: return "H";
        case InstrKind::CNOT: return "CNOT";
        case InstrKind::R: return "R";
        case InstrKind::MZ: return "MZ";
        case InstrKind::MX: return "MX";
        case InstrKind::BELL_PREP: return "BELL_PREP";
        case InstrKind::DETECTOR: return "DETECTOR";
        case InstrKind::OBSERVABLE_INCLUDE: return "OBSERVABLE";
        case InstrKind::TICK: return "TICK";
        case InstrKind::NOISE: return "";
    }
    return "?";
}

const char* channel_name(ChannelKind k) {
    switch (k) {
        case ChannelKind::DEPOL1: return "DEPOL1";
        case ChannelKind::DEPOL2: return "DEPOL2";
        case ChannelKind::ERRX: return "ERRX";
        case ChannelKind::BELL_DEPOL2: return "BELL_DEPOL2";
    }
    return "?";
}

std::string fmt_prob(double p) {
    char buf[40];
    snprintf(buf, sizeof buf, "%.17g", p);
    return buf;
}

} // namespace

std::string Circuit::serialize() const {
    std::string out = "SEAMSIM CIRCUIT v1\n";
    for (const Instruction& in : instructions) {
        switch (in.kind) {
            case InstrKind::TICK:
                out += "TICK\n";
                break;
            case InstrKind::NOISE:
                out += channel_name(in.channel.kind);
                out += ' ';
                out += fmt_prob(in.channel.p);
                for (uint32_t q : in.qubits) { out += ' '; out += std::to_string(q); }
                out += '\n';
                break;
            case InstrKind::DETECTOR:
                out += "DETECTOR";
                for (uint32_t r : in.meas_refs) { out += ' '; out += std::to_string(r); }
                out += '\n';
                break;
            case InstrKind::OBSERVABLE_INCLUDE:
                out += "OBSERVABLE ";
                out += std::to_string(in.observable_index);
                for (uint32_t r : in.meas_refs) { out += ' '; out += std::to_string(r); }
                out += '\n';
                break;
            default:
                out += kind_name(in.kind);
                for (uint32_t q : in.qubits) { out += ' '; out += std::to_string(q); }
                out += '\n';
                break;
        }
    }
    return out;
}

Circuit Circuit::parse(const std::string& text) {
    Circuit c;
    std::istringstream ss(text);
    std::string line;
    if (!std::getline(ss, line) || line != "SEAMSIM CIRCUIT v1")
        throw std::invalid_argument("missing or unsupported circuit header");
    size_t lineno = 1;
    while (std::getline(ss, line)) {
        lineno++;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        auto read_u32s = [&](std::vector<uint32_t>& v) {
            uint32_t q;
            while (ls >> q) v.push_back(q);
        };
        Instruction in;
        if (tok == "TICK") {
            in.kind = InstrKind::TICK;
        } else if (tok == "H" || tok == "CNOT" || tok == "R" || tok == "MZ" || tok == "MX" ||
                   tok == "BELL_PREP") {
            in.kind = tok == "H"    ? InstrKind::H
                      : tok == "CNOT" ? InstrKind::CNOT
                      : tok == "R"    ? InstrKind::R
                      : tok == "MZ"   ? InstrKind::MZ
                      : tok == "MX"   ? InstrKind::MX
                                      : InstrKind::BELL_PREP;
            read_u32s(in.qubits);
        } else if (tok == "DETECTOR") {
            in.kind = InstrKind::DETECTOR;
            read_u32s(in.meas_refs);
        } else if (tok == "OBSERVABLE") {
            in.kind = InstrKind::OBSERVABLE_INCLUDE;
            ls >> in.observable_index;
            read_u32s(in.meas_refs);
        } else if (tok == "DEPOL1" || tok == "DEPOL2" || tok == "ERRX" || tok == "BELL_DEPOL2") {
            in.kind = InstrKind::NOISE;
            in.channel.kind = tok == "DEPOL1"   ? ChannelKind::DEPOL1
                              : tok == "DEPOL2" ? ChannelKind::DEPOL2
                              : tok == "ERRX"   ? ChannelKind::ERRX
                                                : ChannelKind::BELL_DEPOL2;
            ls >> in.channel.p;
            read_u32s(in.qubits);
        } else {
            throw std::invalid_argument("unknown instruction '" + tok + "' at line " +
                                        std::to_string(lineno));
        }
        c.append(std::move(in));
    }
    return c;
}

} // namespace seamsim
