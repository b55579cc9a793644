#include "doctest.h"

#include <cmath>

#include "seamsim/matching.hpp"
#include "seamsim/patch.hpp"
#include "seamsim/rng.hpp"

using namespace seamsim;

namespace {

DemEdge mk_edge(int d1, int d2, double weight, uint64_t obs = 0) {
    DemEdge e;
    e.d1 = d1;
    e.d2 = d2;
    e.observables = obs;
    e.weight = weight;
    e.p = 1.0 / (1.0 + std::exp(weight)); // consistent ln((1-p)/p)
    return e;
}

DetectorErrorModel path_graph_dem() {
    // 4 detectors on a path with weights 1,2,3 and boundary weight 10
    DetectorErrorModel dem;
    dem.n_detectors = 4;
    dem.n_observables = 1;
    dem.edges.push_back(mk_edge(0, 1, 1.0, 1));
    dem.edges.push_back(mk_edge(1, 2, 2.0, 0));
    dem.edges.push_back(mk_edge(2, 3, 3.0, 1));
    for (int i = 0; i < 4; i++) dem.edges.push_back(mk_edge(i, -1, 10.0, 0));
    return dem;
}

DetectorErrorModel random_dem(CounterRng& rng, uint32_t n_det) {
    DetectorErrorModel dem;
    dem.n_detectors = n_det;
    dem.n_observables = 2;
    for (uint32_t i = 0; i < n_det; i++) {
        // ring + chords + sparse boundary links
        double w1 = 0.2 + 4.0 * rng.next_double();
        dem.edges.push_back(mk_edge(i, (i + 1) % n_det, w1, rng.next_below(4)));
        if (rng.next_below(3) == 0) {
            uint32_t j = (uint32_t)rng.next_below(n_det);
            if (j != i) dem.edges.push_back(
                mk_edge(std::min(i, j), std::max(i, j), 0.2 + 4.0 * rng.next_double(),
                        rng.next_below(4)));
        }
        if (rng.next_below(2) == 0)
            dem.edges.push_back(mk_edge(i, -1, 0.2 + 6.0 * rng.next_double(), rng.next_below(4)));
    }
    dem.edges.push_back(mk_edge(0, -1, 5.0, 0)); // boundary always reachable
    return dem;
}

} // namespace

TEST_CASE("empty syndrome decodes to nothing") {
    auto dem = path_graph_dem();
    MatchingGraph g(dem);
    auto r = g.decode({});
    CHECK(r.weight_scaled == 0);
    CHECK(r.prediction == 0);
    auto b = g.decode_brute_force({});
    CHECK(b.weight_scaled == 0);
}

TEST_CASE("two defects joined by the lightest edge") {
    auto dem = path_graph_dem();
    MatchingGraph g(dem);
    auto r = g.decode({0, 1});
    CHECK(r.weight == doctest::Approx(1.0));
    CHECK(r.prediction == 1);
}

TEST_CASE("hand-enumerated 4-defect path graph") {
    auto dem = path_graph_dem();
    MatchingGraph g(dem);
    auto r = g.decode({0, 1, 2, 3});
    CHECK(r.weight == doctest::Approx(4.0)); // pair the adjacent ends: 1 + 3
    CHECK(r.prediction == 0);                // both matched edges flip L0
    auto b = g.decode_brute_force({0, 1, 2, 3});
    CHECK(b.weight_scaled == r.weight_scaled);
}

TEST_CASE("odd defect count uses the boundary") {
    auto dem = path_graph_dem();
    MatchingGraph g(dem);
    auto r = g.decode({0, 1, 2});
    auto b = g.decode_brute_force({0, 1, 2});
    CHECK(r.weight_scaled == b.weight_scaled);
    CHECK(r.weight == doctest::Approx(11.0)); // edge(0,1) + boundary(2)
}

TEST_CASE("scaling all weights leaves the matching invariant") {
    auto dem = path_graph_dem();
    auto scaled = dem;
    for (auto& e : scaled.edges) e.weight *= 2.5;
    MatchingGraph g1(dem), g2(scaled);
    CounterRng rng(5);
    for (int t = 0; t < 50; t++) {
        std::vector<uint32_t> defects;
        for (uint32_t d = 0; d < 4; d++)
            if (rng.next_below(2)) defects.push_back(d);
        auto a = g1.decode(defects);
        auto b = g2.decode(defects);
        CHECK(a.prediction == b.prediction);
        CHECK((double)b.weight_scaled ==
              doctest::Approx(2.5 * (double)a.weight_scaled).epsilon(1e-9));
    }
}

TEST_CASE("exact matching equals brute force on random graphs") {
    CounterRng rng(99);
    int instances = 0;
    for (int t = 0; t < 60; t++) {
        uint32_t n = 6 + (uint32_t)rng.next_below(18);
        auto dem = random_dem(rng, n);
        MatchingGraph g(dem);
        for (int s = 0; s < 25; s++) {
            std::vector<uint32_t> defects;
            for (uint32_t d = 0; d < n && defects.size() < 8; d++)
                if (rng.next_below(n) < 2) defects.push_back(d);
            auto a = g.decode(defects);
            auto b = g.decode_brute_force(defects);
            CAPTURE(t); CAPTURE(s);
            REQUIRE(a.weight_scaled == b.weight_scaled);
            instances++;
        }
    }
    CHECK(instances == 1500);
}

TEST_CASE("exact matching equals brute force on d=3 memory syndromes") {
    PatchSpec spec{PatchVariant::Plain, 3, 9, 'Z', 3e-3, 0};
    auto built = build_memory_circuit(spec);
    auto dem = build_dem(built.circuit);
    MatchingGraph g(dem);
    CounterRng rng(7);
    int tested = 0;
    while (tested < 200) {
        std::vector<uint8_t> par(dem.n_detectors, 0);
        for (int k = 0; k < 3; k++) {
            auto& m = dem.mechanisms[rng.next_below(dem.mechanisms.size())];
            for (uint32_t dd : m.symptom.detectors) par[dd] ^= 1;
        }
        std::vector<uint32_t> defects;
        for (uint32_t dd = 0; dd < dem.n_detectors; dd++)
            if (par[dd]) defects.push_back(dd);
        if (defects.size() > 8) continue;
        auto a = g.decode(defects);
        auto b = g.decode_brute_force(defects);
        REQUIRE(a.weight_scaled == b.weight_scaled);
        tested++;
    }
}

TEST_CASE("defect with no mechanism is reported") {
    auto dem = path_graph_dem();
    MatchingGraph g(dem);
    CHECK_THROWS(g.decode({7}));
    CHECK_THROWS(g.decode_brute_force({0, 1, 2, 3, 0, 1, 2, 3, 0, 1, 2}));
}
