#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "seamsim/circuit.hpp"

namespace seamsim {

// Detector/observable footprint of one error.
struct Symptom {
    std::vector<uint32_t> detectors; // sorted
    uint64_t observables = 0;

    bool operator==(const Symptom& o) const {
        return observables == o.observables && detectors == o.detectors;
    }
};

struct Mechanism {
    double p = 0;
    Symptom symptom;
};

// Decomposed >=1-detector edge; d2 == -1 means the virtual boundary.
struct DemEdge {
    int32_t d1 = 0;
    int32_t d2 = -1;
    uint64_t observables = 0;
    double p = 0;
    double weight = 0; // ln((1-p)/p)
};

struct DetectorErrorModel {
    uint32_t n_detectors = 0;
    uint32_t n_observables = 0;
    std::vector<Mechanism> mechanisms;          // merged, sorted by symptom
    std::vector<DemEdge> edges;                 // graph-like decomposition
    std::vector<Mechanism> residue;             // symptoms that did not decompose
    std::vector<Mechanism> undetectable;        // observable flips with no detectors
    std::vector<DetectorCoord> detector_coords; // copied from the circuit when present

    std::string serialize() const;
};

// XOR-combination of independent Bernoulli events with equal symptom.
inline double combine_probability(double a, double b) { return a * (1 - b) + b * (1 - a); }

// Reusable propagation context; building it indexes the circuit once.
class ErrorPropagator {
  public:
    explicit ErrorPropagator(const Circuit& c);

    // Symptom of `pauli` injected immediately before instruction `position`.
    Symptom propagate(size_t position, const PauliString& pauli) const;

    const Circuit& circuit() const { return *c_; }

  private:
    struct Event {
        uint32_t pos;
        uint8_t role; // 0 H, 1 CNOT ctrl, 2 CNOT tgt, 3 MZ, 4 MX, 5 clear (R/BELL_PREP)
        uint32_t other; // partner qubit or measurement index
    };
    const Circuit* c_;
    std::vector<std::vector<Event>> timeline_;          // per qubit
    std::vector<std::vector<uint32_t>> meas_to_dets_;   // per measurement
    std::vector<uint64_t> meas_to_obs_;
};

DetectorErrorModel build_dem(const Circuit& c);

// Classified view of a p=0 seam-variant DEM (Bell noise only).
struct SeamRestriction {
    std::vector<DemEdge> data_edges;     // space-like, between Z checks in one round
    std::vector<DemEdge> time_edges;     // same check, consecutive rounds
    std::vector<DemEdge> boundary_edges; // single-detector
    std::vector<DemEdge> other_edges;
};

// Requires a DEM built from a seam-variant circuit with p = 0 and detector
// coordinates present; throws if any edge touches a non-Bell detector.
SeamRestriction seam_restriction(const DetectorErrorModel& dem);

} // namespace seamsim
