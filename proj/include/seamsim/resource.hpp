#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "seamsim/ansatz.hpp"

namespace seamsim {

enum class LayoutMode : uint8_t { Distributed, Monolithic };

struct LayoutConfig {
    double t_c = 1e-6; // cycle time (s)
    double t_r = 1e-5; // measurement + classical reaction time (s)
    LayoutMode mode = LayoutMode::Distributed;
    int n_factory_proc = 2;
};

struct FactorySpec {
    std::string name;
    double p_out = 0;
    double qubitcycles = 0;
    long qubits = 0;
    double codecycles = 0;
    int d_x = 0, d_z = 0, d_m = 0, d_x2 = 0, d_z2 = 0, d_m2 = 0, n_l1 = 0;
};

// The eight two-level CCZ factories used by the estimator.
const std::vector<FactorySpec>& builtin_factories();

struct AlgorithmCost {
    std::string label;
    double n_toffoli = 0;
    double n_cx = 0; // CNOT plus multi-target CX gates
    long n_logical = 0;
    double p_classical = 0; // classical post-processing failure probability
};

struct LayoutCounts {
    long n_data = 0;
    long n_phys_proc = 0;
};

// Physical qubits of one computing processor with n_rows rows of
// distance-d logical qubits (2 per row).
LayoutCounts layout_counts(int d, int n_rows, LayoutMode mode);

// smallest n_rows whose processor can host `factory_qubits` physical qubits
int choose_n_rows(int d, long factory_qubits, LayoutMode mode);

double bell_fidelity(double p_bell);
double distillation_floor(double p);

// numerically stable 1 - (1-p)^n
double pow_complement(double p, double n);

struct ErrorModelParams {
    BulkAnsatz bulk;
    SeamAnsatz seam;
};

struct CnotFailure {
    double p_logq = 0; // per-round, all logical qubits
    double p_xx = 0;   // per-round, routing patch of the first joint measurement
    double p_zz = 0;   // per-round, second joint measurement
    double p_cx = 0;   // whole gate (4d rounds + d + d)
};

CnotFailure cnot_failure(int d, double p, double p_bell, int n_proc, int n_rows, long n_log,
                         const ErrorModelParams& params);

double toffoli_failure(double p_cx, double p_logq_per_round, double p_factory, double t_r,
                       double t_c);

struct EstimateResult {
    bool feasible = false;
    std::string infeasible_reason;
    int d = 0;
    int n_rows = 0;
    int n_proc = 0;
    const FactorySpec* factory = nullptr;
    const AlgorithmCost* cost = nullptr;
    long n_phys = 0;
    long phys_per_proc = 0;
    double duration_s = 0;          // one run
    double p_fail = 0;
    double expected_duration_s = 0; // duration / success probability
    double metric = 0;              // expected duration * physical qubits
};

EstimateResult estimate_algorithm(const AlgorithmCost& cost, const LayoutConfig& layout, int d,
                                  double p, double p_bell, const FactorySpec& factory,
                                  const ErrorModelParams& params);

struct SweepResult {
    EstimateResult best;
    std::vector<EstimateResult> all;
};

// Exhaustive sweep over odd distances, factories and cost variants; minimum
// metric wins, ties broken by smaller d then smaller factory p_out.
SweepResult optimize_configuration(const std::vector<AlgorithmCost>& costs,
                                   const LayoutConfig& layout, double p, double p_bell,
                                   const std::vector<FactorySpec>& factories, int d_min,
                                   int d_max, const ErrorModelParams& params, int threads = 1);

} // namespace seamsim
