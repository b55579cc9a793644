#include "doctest.h"

#include <cmath>

#include "seamsim/circuit.hpp"
#include "seamsim/patch.hpp"

using namespace seamsim;

TEST_CASE("channel expansions") {
    auto t1 = channel_pauli_terms({ChannelKind::DEPOL1, 0.3}, {7});
    REQUIRE(t1.size() == 3);
    for (auto& t : t1) CHECK(t.probability == doctest::Approx(0.1).epsilon(1e-15));

    auto t2 = channel_pauli_terms({ChannelKind::DEPOL2, 0.15}, {0, 1});
    REQUIRE(t2.size() == 15);
    for (auto& t : t2) CHECK(t.probability == doctest::Approx(0.01).epsilon(1e-15));

    auto t3 = channel_pauli_terms({ChannelKind::ERRX, 0.25}, {4});
    REQUIRE(t3.size() == 1);
    CHECK(t3[0].pauli.letters().at(4) == PauliLetter::X);
    CHECK(t3[0].probability == 0.25);

    CHECK_THROWS(channel_pauli_terms({ChannelKind::DEPOL1, 1.0}, {0}));
    CHECK_THROWS(channel_pauli_terms({ChannelKind::DEPOL1, -0.1}, {0}));
}

TEST_CASE("term probabilities sum to the channel probability") {
    for (double p : {1e-4, 0.01, 0.3, 0.749}) {
        for (ChannelKind k :
             {ChannelKind::DEPOL1, ChannelKind::DEPOL2, ChannelKind::ERRX, ChannelKind::BELL_DEPOL2}) {
            NoiseChannel c{k, p};
            std::vector<uint32_t> qs = c.arity() == 2 ? std::vector<uint32_t>{0, 1}
                                                      : std::vector<uint32_t>{0};
            auto terms = channel_pauli_terms(c, qs);
            double sum = 0;
            for (auto& t : terms) sum += t.probability;
            CHECK(std::abs(sum - p) <= 1e-15 * p);
        }
    }
}

TEST_CASE("reduced Bell view is the raw view modulo the pair stabilizers") {
    double pb = 0.15;
    auto raw = channel_pauli_terms({ChannelKind::BELL_DEPOL2, pb}, {0, 1});
    auto reduced = bell_reduced_terms(pb, 0, 1);
    REQUIRE(reduced.size() == 3);
    for (auto& t : reduced) CHECK(t.probability == doctest::Approx(4.0 * pb / 15.0).epsilon(1e-14));

    // multiply every raw term by each Bell stabilizer; exactly one result must
    // be supported on qubit 0 alone (or be the identity class)
    std::vector<PauliString> stabs = {
        PauliString(),
        PauliString::from_parts({0, 1}, {PauliLetter::X, PauliLetter::X}),
        PauliString::from_parts({0, 1}, {PauliLetter::Y, PauliLetter::Y}),
        PauliString::from_parts({0, 1}, {PauliLetter::Z, PauliLetter::Z}),
    };
    double mass[4] = {0, 0, 0, 0}; // I, X, Z, Y on qubit 0
    for (auto& term : raw) {
        bool classified = false;
        for (auto& s : stabs) {
            PauliString m = term.pauli * s;
            bool on0 = !m.has_x(1) && !m.has_z(1);
            if (!on0) continue;
            classified = true;
            if (m.identity()) mass[0] += term.probability;
            else if (m.letters().at(0) == PauliLetter::X) mass[1] += term.probability;
            else if (m.letters().at(0) == PauliLetter::Z) mass[2] += term.probability;
            else mass[3] += term.probability;
            break;
        }
        CHECK(classified);
    }
    CHECK(mass[0] == doctest::Approx(3 * pb / 15).epsilon(1e-13));
    for (int i : {1, 2, 3}) CHECK(mass[i] == doctest::Approx(4 * pb / 15).epsilon(1e-13));
}

TEST_CASE("validate catches ill-formed circuits") {
    Circuit ok;
    ok.append({InstrKind::R, {0, 1}, {}, {}, 0});
    ok.tick();
    ok.append({InstrKind::CNOT, {0, 1}, {}, {}, 0});
    ok.tick();
    ok.append({InstrKind::MZ, {1}, {}, {}, 0});
    ok.append({InstrKind::DETECTOR, {}, {}, {0}, 0});
    CHECK(ok.validate().ok);

    Circuit twice;
    twice.append({InstrKind::H, {0}, {}, {}, 0});
    twice.append({InstrKind::CNOT, {0, 1}, {}, {}, 0});
    auto d = twice.validate();
    CHECK_FALSE(d.ok);
    CHECK(d.message.find("tick") != std::string::npos);

    Circuit future;
    future.append({InstrKind::MZ, {0}, {}, {}, 0});
    future.append({InstrKind::DETECTOR, {}, {}, {1}, 0});
    CHECK_FALSE(future.validate().ok);

    Circuit badbell;
    badbell.append({InstrKind::BELL_PREP, {0, 1, 2}, {}, {}, 0});
    CHECK_FALSE(badbell.validate().ok);
}

TEST_CASE("well-formed memory circuits validate") {
    for (auto v : {PatchVariant::Plain, PatchVariant::Seam, PatchVariant::NaiveSeam}) {
        PatchSpec s;
        s.variant = v;
        s.d = 3;
        s.p = 1e-3;
        s.p_bell = 1e-2;
        auto built = build_memory_circuit(s);
        auto diag = built.circuit.validate();
        INFO(variant_name(v), ": ", diag.message);
        CHECK(diag.ok);
    }
}

TEST_CASE("text format round-trips bit-exactly") {
    PatchSpec s;
    s.variant = PatchVariant::Seam;
    s.d = 3;
    s.rounds = 2;
    s.p = 1.25e-3;
    s.p_bell = 0.0371;
    auto built = build_memory_circuit(s);
    std::string text = built.circuit.serialize();
    Circuit parsed = Circuit::parse(text);
    CHECK(parsed.serialize() == text);
    CHECK(parsed.n_measurements == built.circuit.n_measurements);
    CHECK(parsed.n_detectors == built.circuit.n_detectors);
    CHECK(parsed.n_observables == built.circuit.n_observables);

    CHECK_THROWS(Circuit::parse("bogus\n"));
}
