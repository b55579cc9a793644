#include "seamsim/resource.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace seamsim {

const std::vector<FactorySpec>& builtin_factories() {
    static const std::vector<FactorySpec> table = {
        {"factory-1", 2.1e-14, 11394367, 85436, 133.4, 21, 11, 11, 35, 21, 21, 4},
        {"factory-2", 3.0e-14, 8823434, 80700, 109.3, 21, 9, 9, 35, 21, 21, 4},
        {"factory-3", 9.9e-14, 8347167, 76344, 109.3, 21, 9, 9, 35, 19, 19, 4},
        {"factory-4", 2.1e-13, 7620887, 69716, 109.3, 19, 9, 9, 33, 19, 19, 4},
        {"factory-5", 6.6e-13, 7327490, 67032, 109.3, 19, 9, 9, 31, 19, 19, 4},
        {"factory-6", 1.6e-12, 6931679, 63424, 109.3, 17, 9, 9, 31, 19, 19, 4},
        {"factory-7", 2.7e-12, 6896807, 63092, 109.3, 19, 9, 9, 31, 17, 17, 4},
        {"factory-8", 8.1e-12, 6229603, 57000, 109.3, 17, 9, 9, 29, 17, 17, 4},
    };
    return table;
}

LayoutCounts layout_counts(int d, int n_rows, LayoutMode mode) {
    if (d < 3 || d % 2 == 0) throw std::invalid_argument("distance must be odd and >= 3");
    if (n_rows < 1) throw std::invalid_argument("n_rows must be >= 1");
    long D = d, R = n_rows;
    LayoutCounts out;
    long rect = (3 * D + 2) * ((D + 1) * R - 1) + (2 * D + 1) * (D + 1);
    if (mode == LayoutMode::Distributed) {
        out.n_data = rect + D;
        out.n_phys_proc = 2 * out.n_data - 1 + 2 * D;
    } else {
        out.n_data = rect;
        out.n_phys_proc = 2 * out.n_data - 1;
    }
    return out;
}

int choose_n_rows(int d, long factory_qubits, LayoutMode mode) {
    for (int k = 1;; k++)
        if (layout_counts(d, k, mode).n_phys_proc >= factory_qubits) return k;
}

double bell_fidelity(double p_bell) {
    if (p_bell < 0 || p_bell >= 1) throw std::invalid_argument("p_bell outside [0,1)");
    return 1.0 - 0.8 * p_bell;
}

double distillation_floor(double p) {
    double pp = 2.0 * p / 3.0;
    double l1 = 35.0 * pp * pp * pp;
    return 28.0 * l1 * l1;
}

double pow_complement(double p, double n) {
    if (p <= 0) return 0;
    if (p >= 1) return 1;
    return -std::expm1(n * std::log1p(-p));
}

CnotFailure cnot_failure(int d, double p, double p_bell, int n_proc, int n_rows, long n_log,
                         const ErrorModelParams& params) {
    CnotFailure out;
    double b = std::pow(p / params.bulk.p_th, (d + 1) / 2.0);
    out.p_logq = pow_complement(2.0 * params.bulk.alpha * b, (double)n_log);

    int n_seam = std::max(0, n_proc - 1);
    SeamAnsatz seam = params.seam;
    seam.alpha2 *= ((2.0 * d + 2.0) * n_proc + (d + 1.0) * n_rows) / d;
    double pl_x = eval_multiseam_ansatz(d, d, n_seam, p, p_bell, seam);
    out.p_xx = pl_x + params.bulk.alpha * b;
    out.p_zz = (params.bulk.alpha + params.bulk.alpha * (d + 1.0) * n_rows / d) * b;

    double lg = 4.0 * d * std::log1p(-out.p_logq) + d * std::log1p(-out.p_xx) +
                d * std::log1p(-out.p_zz);
    out.p_cx = -std::expm1(lg);
    return out;
}

double toffoli_failure(double p_cx, double p_logq_per_round, double p_factory, double t_r,
                       double t_c) {
    double p_interact = pow_complement(p_cx, 3.0);
    double p_fixing =
        -std::expm1((t_r / t_c) * std::log1p(-p_logq_per_round) + 1.5 * std::log1p(-p_cx));
    return -std::expm1(std::log1p(-p_factory) + std::log1p(-p_interact) +
                       std::log1p(-p_fixing));
}

EstimateResult estimate_algorithm(const AlgorithmCost& cost, const LayoutConfig& layout, int d,
                                  double p, double p_bell, const FactorySpec& factory,
                                  const ErrorModelParams& params) {
    EstimateResult r;
    r.d = d;
    r.factory = &factory;
    r.cost = &cost;
    if (factory.p_out < distillation_floor(p)) {
        r.infeasible_reason = "factory output error below the distillation floor";
        return r;
    }
    if (p >= params.bulk.p_th || p >= params.seam.p_star) {
        r.infeasible_reason = "physical rate at or above threshold";
        return r;
    }
    if (layout.mode == LayoutMode::Monolithic) {
        r.n_rows = (int)((cost.n_logical + 1) / 2);
        r.n_proc = 1;
    } else {
        r.n_rows = choose_n_rows(d, factory.qubits, layout.mode);
        r.n_proc = (int)((cost.n_logical + 2L * r.n_rows - 1) / (2L * r.n_rows));
    }
    LayoutCounts lc = layout_counts(d, r.n_rows, layout.mode);
    r.phys_per_proc = lc.n_phys_proc;
    r.n_phys = (long)r.n_proc * lc.n_phys_proc + layout.n_factory_proc * factory.qubits;

    CnotFailure cx = cnot_failure(d, p, layout.mode == LayoutMode::Monolithic ? 0.0 : p_bell,
                                  r.n_proc, r.n_rows, cost.n_logical, params);
    double p_ccx = toffoli_failure(cx.p_cx, cx.p_logq, factory.p_out, layout.t_r, layout.t_c);

    double t_cx = 4.0 * d * layout.t_c;
    r.duration_s = cost.n_toffoli * (4.5 * t_cx + layout.t_r) + cost.n_cx * t_cx;

    double log_ps = cost.n_toffoli * std::log1p(-p_ccx) + cost.n_cx * std::log1p(-cx.p_cx) +
                    std::log1p(-cost.p_classical);
    double p_success = std::exp(log_ps);
    if (!(p_success > 0)) {
        r.infeasible_reason = "success probability underflows to zero";
        return r;
    }
    r.p_fail = -std::expm1(log_ps);
    r.expected_duration_s = r.duration_s / p_success;
    r.metric = r.expected_duration_s * (double)r.n_phys;
    r.feasible = true;
    return r;
}

SweepResult optimize_configuration(const std::vector<AlgorithmCost>& costs,
                                   const LayoutConfig& layout, double p, double p_bell,
                                   const std::vector<FactorySpec>& factories, int d_min,
                                   int d_max, const ErrorModelParams& params, int threads) {
    if (costs.empty() || factories.empty() || d_min > d_max)
        throw std::invalid_argument("empty optimization search space");
    std::vector<int> ds;
    for (int d = d_min % 2 ? d_min : d_min + 1; d <= d_max; d += 2) ds.push_back(d);
    if (ds.empty()) throw std::invalid_argument("no odd distance in range");
    SweepResult out;
    out.all.resize(ds.size() * factories.size() * costs.size());

    auto eval_range = [&](size_t lo, size_t hi) {
        for (size_t idx = lo; idx < hi; idx++) {
            size_t di = idx / (factories.size() * costs.size());
            size_t fi = idx / costs.size() % factories.size();
            size_t ci = idx % costs.size();
            out.all[idx] =
                estimate_algorithm(costs[ci], layout, ds[di], p, p_bell, factories[fi], params);
        }
    };
    size_t total = out.all.size();
    int nt = std::max(1, threads);
    if (nt == 1 || total < 16) {
        eval_range(0, total);
    } else {
        std::vector<std::thread> pool;
        size_t chunk = (total + nt - 1) / nt;
        for (int t = 0; t < nt; t++) {
            size_t lo = t * chunk, hi = std::min(total, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(eval_range, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    const EstimateResult* best = nullptr;
    for (const auto& r : out.all) {
        if (!r.feasible) continue;
        if (!best || r.metric < best->metric ||
            (r.metric == best->metric &&
             (r.d < best->d || (r.d == best->d && r.factory->p_out < best->factory->p_out))))
            best = &r;
    }
    if (!best) throw std::runtime_error("no feasible configuration in the sweep");
    out.best = *best;
    return out;
}

} // namespace seamsim
