#include "doctest.h"

#include <cmath>

#include "seamsim/dem.hpp"
#include "seamsim/patch.hpp"
#include "seamsim/sampler.hpp"

using namespace seamsim;

TEST_CASE("per-round rate and sigma formulas") {
    CHECK(SampleStats::per_round_rate(0.3, 3) == doctest::Approx(0.11210).epsilon(1e-4));
    CHECK(SampleStats::per_round_rate(0.0, 7) == 0.0);
    CHECK(SampleStats::per_round_sigma(0.5, 100, 1) == doctest::Approx(0.05));
    // sigma shrinks like 1/sqrt(n)
    double s1 = SampleStats::per_round_sigma(0.2, 1000, 9);
    double s2 = SampleStats::per_round_sigma(0.2, 4000, 9);
    CHECK(s1 / s2 == doctest::Approx(2.0).epsilon(1e-12));
    // p_hat <= p_hat_k for k >= 1
    for (double pk : {0.01, 0.2, 0.7})
        for (int k : {1, 3, 10}) CHECK(SampleStats::per_round_rate(pk, k) <= pk + 1e-15);
}

TEST_CASE("p=0 sampling gives all-zero detectors") {
    PatchSpec s{PatchVariant::Plain, 3, 3, 'Z', 0.0, 0.0};
    auto built = build_memory_circuit(s);
    auto samples = sample_detectors(built.circuit, 1000, 42);
    for (auto w : samples.detectors) CHECK(w == 0);
    for (auto w : samples.observables) CHECK(w == 0);
}

TEST_CASE("single-mechanism frequency matches the binomial") {
    Circuit c;
    c.append({InstrKind::R, {0}, {}, {}, 0});
    c.tick();
    c.noise(ChannelKind::ERRX, 0.1, {0});
    c.append({InstrKind::MZ, {0}, {}, {}, 0});
    c.append({InstrKind::DETECTOR, {}, {}, {0}, 0});
    uint64_t shots = 100000;
    auto samples = sample_detectors(c, shots, 2024);
    uint64_t hits = 0;
    for (uint64_t sidx = 0; sidx < shots; sidx++) hits += samples.detector(sidx, 0);
    double freq = (double)hits / shots;
    CHECK(std::abs(freq - 0.1) < 3 * std::sqrt(0.1 * 0.9 / shots));
}

TEST_CASE("identical seed gives bit-identical samples, any thread count") {
    PatchSpec s{PatchVariant::Seam, 3, 3, 'Z', 2e-3, 1e-2};
    auto built = build_memory_circuit(s);
    auto a = sample_detectors(built.circuit, 700, 99, 1);
    auto b = sample_detectors(built.circuit, 700, 99, 1);
    auto c4 = sample_detectors(built.circuit, 700, 99, 4);
    CHECK(a.detectors == b.detectors);
    CHECK(a.observables == b.observables);
    CHECK(a.detectors == c4.detectors);
    CHECK(a.observables == c4.observables);

    auto other = sample_detectors(built.circuit, 700, 100, 1);
    CHECK(a.detectors != other.detectors);
}

TEST_CASE("detector marginals match the exact mechanism expansion") {
    // two-data-qubit repetition code, 3 rounds, <= 12 qubits
    Circuit c;
    double p = 5e-3;
    c.append({InstrKind::R, {0, 1, 2}, {}, {}, 0});
    c.tick();
    uint32_t meas = 0;
    std::vector<uint32_t> prev;
    for (int r = 0; r < 3; r++) {
        c.noise(ChannelKind::DEPOL1, p, {0, 1});
        c.append({InstrKind::CNOT, {0, 2}, {}, {}, 0});
        c.tick();
        c.append({InstrKind::CNOT, {1, 2}, {}, {}, 0});
        c.tick();
        c.noise(ChannelKind::ERRX, p, {2});
        c.append({InstrKind::MZ, {2}, {}, {}, 0});
        std::vector<uint32_t> refs = {meas};
        if (r > 0) refs.push_back(meas - 1);
        c.append({InstrKind::DETECTOR, {}, {}, refs, 0});
        meas++;
        c.tick();
        c.append({InstrKind::R, {2}, {}, {}, 0});
        c.tick();
    }
    REQUIRE(c.validate().ok);
    auto dem = build_dem(c);

    uint64_t shots = 200000;
    auto samples = sample_detectors(c, shots, 31337);
    for (uint32_t dd = 0; dd < c.n_detectors; dd++) {
        // exact parity of independent mechanisms: (1 - prod(1-2p_i)) / 2
        double prod = 1;
        for (auto& m : dem.mechanisms) {
            bool hits = false;
            for (uint32_t x : m.symptom.detectors) hits |= (x == dd);
            if (hits) prod *= 1 - 2 * m.p;
        }
        double expect = (1 - prod) / 2;
        uint64_t hits = 0;
        for (uint64_t sidx = 0; sidx < shots; sidx++) hits += samples.detector(sidx, dd);
        double freq = (double)hits / shots;
        double sigma = std::sqrt(expect * (1 - expect) / shots);
        CAPTURE(dd);
        CHECK(std::abs(freq - expect) < 3.5 * sigma);
    }
}

TEST_CASE("plain d=3 with p=0 never fails") {
    PatchSpec s{PatchVariant::Plain, 3, 0, 'Z', 0.0, 0.0};
    auto built = build_memory_circuit(s);
    auto st = estimate_logical_rate(built, s, 100, 7);
    CHECK(st.failures == 0);
    CHECK(st.p_hat == 0.0);
    CHECK(st.rounds == 9);
    CHECK(st.logical_error == 'X');
}

TEST_CASE("logical rate estimation is deterministic across thread counts") {
    PatchSpec s{PatchVariant::Seam, 3, 0, 'Z', 4e-3, 2e-2};
    auto built = build_memory_circuit(s);
    auto a = estimate_logical_rate(built, s, 4000, 11, 1);
    auto b = estimate_logical_rate(built, s, 4000, 11, 2);
    CHECK(a.failures == b.failures);
    CHECK(a.failures > 0);
    CHECK(a.csv_row() == b.csv_row());
}

TEST_CASE("sub-threshold ordering: d=5 beats d=3 at p=1e-3") {
    // quick statistical ordering check; the d=5 vs d=7 version with 1e6 shots
    // runs in the acceptance suite
    uint64_t shots = 50000;
    PatchSpec s3{PatchVariant::Plain, 3, 0, 'Z', 1e-3, 0};
    PatchSpec s5{PatchVariant::Plain, 5, 0, 'Z', 1e-3, 0};
    auto r3 = estimate_logical_rate(build_memory_circuit(s3), s3, shots, 5);
    auto r5 = estimate_logical_rate(build_memory_circuit(s5), s5, shots, 5);
    CHECK(r3.p_hat - 2 * r3.sigma > r5.p_hat + 2 * r5.sigma);
}

TEST_CASE("combined storage rate adds the two bases") {
    PatchSpec z{PatchVariant::Plain, 3, 0, 'Z', 2e-3, 0};
    PatchSpec x{PatchVariant::Plain, 3, 0, 'X', 2e-3, 0};
    auto rz = estimate_logical_rate(build_memory_circuit(z), z, 20000, 3);
    auto rx = estimate_logical_rate(build_memory_circuit(x), x, 20000, 3);
    CHECK(combined_storage_rate(rz, rx) == doctest::Approx(rz.p_hat + rx.p_hat));
    CHECK_THROWS(combined_storage_rate(rx, rz));
}
