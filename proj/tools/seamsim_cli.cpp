// seamsim: distributed-surface-code memory simulator, ansatz fitter and
// factoring resource estimator. Subcommands: simulate, fit, estimate, dem,
// decode-test. Exit codes: 0 success, 2 invalid input, 3 infeasible or
// degenerate computation.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "seamsim/ansatz.hpp"
#include "seamsim/dem.hpp"
#include "seamsim/matching.hpp"
#include "seamsim/patch.hpp"
#include "seamsim/resource.hpp"
#include "seamsim/rng.hpp"
#include "seamsim/sampler.hpp"

using nlohmann::json;
using namespace seamsim;

namespace {

constexpr const char* kVersion = "seamsim 1.0.0";

int default_threads() {
    if (const char* env = std::getenv("SEAMSIM_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 1;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << content;
}

void write_manifest(const std::string& out_path, const std::string& command, const json& params,
                    uint64_t seed, double wall_s) {
    json m;
    m["tool"] = kVersion;
    m["command"] = command;
    m["parameters"] = params;
    m["seed"] = seed;
    m["outputs"] = {out_path};
    m["wall_clock_s"] = wall_s;
    write_file(out_path + ".manifest.json", m.dump(2) + "\n");
}

std::vector<double> as_list(const json& j) {
    std::vector<double> v;
    if (j.is_array())
        for (auto& x : j) v.push_back(x.get<double>());
    else
        v.push_back(j.get<double>());
    return v;
}

std::vector<int> as_int_list(const json& j) {
    std::vector<int> v;
    if (j.is_array())
        for (auto& x : j) v.push_back(x.get<int>());
    else
        v.push_back(j.get<int>());
    return v;
}

SeamAnsatz seam_from_json(const json& j) {
    SeamAnsatz s;
    if (j.contains("alpha1")) s.alpha1 = j["alpha1"];
    if (j.contains("alpha2")) s.alpha2 = j["alpha2"];
    if (j.contains("alpha3")) s.alpha3 = j["alpha3"];
    if (j.contains("alpha_c")) s.alpha_c = j["alpha_c"];
    if (j.contains("p_star")) s.p_star = j["p_star"];
    if (j.contains("p_bell_star")) s.p_bell_star = j["p_bell_star"];
    if (j.contains("bracket"))
        s.bracket = j["bracket"] == "squared" ? BracketForm::Squared : BracketForm::Plain;
    return s;
}

int cmd_simulate(const std::string& spec_path, const std::string& out_path, uint64_t shots,
                 uint64_t seed, int threads) {
    json spec = json::parse(read_file(spec_path));
    std::vector<int> dists = as_int_list(spec.at("d"));
    std::vector<double> ps = spec.contains("p") ? as_list(spec["p"]) : std::vector<double>{0.0};
    std::vector<double> pbs =
        spec.contains("p_bell") ? as_list(spec["p_bell"]) : std::vector<double>{0.0};
    std::vector<std::string> variants;
    if (spec.contains("variant")) {
        if (spec["variant"].is_array())
            for (auto& v : spec["variant"]) variants.push_back(v.get<std::string>());
        else
            variants.push_back(spec["variant"].get<std::string>());
    } else {
        variants = {"plain"};
    }
    std::string bases = spec.value("basis", "Z");
    int rounds = spec.value("rounds", 0);
    if (spec.contains("shots")) shots = spec["shots"].get<uint64_t>();

    std::string csv = "# seamsim csv v1\n";
    csv += SampleStats::csv_header();
    csv += '\n';
    auto t0 = std::chrono::steady_clock::now();
    for (auto& vname : variants) {
        for (int d : dists) {
            for (double p : ps) {
                for (double pb : pbs) {
                    for (char basis : bases) {
                        PatchSpec ps_;
                        ps_.variant = variant_from_name(vname);
                        ps_.d = d;
                        ps_.rounds = rounds;
                        ps_.basis = basis;
                        ps_.p = p;
                        ps_.p_bell = pb;
                        auto built = build_memory_circuit(ps_);
                        auto st = estimate_logical_rate(built, ps_, shots, seed, threads);
                        csv += st.csv_row();
                        csv += '\n';
                    }
                }
            }
        }
    }
    write_file(out_path, csv);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json params = {{"spec", spec}, {"shots", shots}, {"threads", threads}};
    write_manifest(out_path, "simulate", params, seed, wall);
    return 0;
}

int cmd_fit(const std::string& data_path, const std::string& model_name,
            const std::string& out_path) {
    std::ifstream f(data_path);
    if (!f) throw std::runtime_error("cannot open " + data_path);
    FitDataset data;
    std::string line;
    int col_d = -1, col_p = -1, col_pb = -1, col_phat = -1, col_sigma = -1;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (col_d < 0) {
            for (int i = 0; i < (int)cells.size(); i++) {
                if (cells[i] == "d") col_d = i;
                if (cells[i] == "p") col_p = i;
                if (cells[i] == "p_bell") col_pb = i;
                if (cells[i] == "p_hat_L") col_phat = i;
                if (cells[i] == "sigma") col_sigma = i;
            }
            if (col_d < 0 || col_p < 0 || col_phat < 0 || col_sigma < 0)
                throw std::runtime_error("CSV header missing required columns");
            continue;
        }
        FitRow r;
        r.d = std::stoi(cells.at(col_d));
        r.p = std::stod(cells.at(col_p));
        r.p_bell = col_pb >= 0 ? std::stod(cells.at(col_pb)) : 0.0;
        r.p_hat = std::stod(cells.at(col_phat));
        r.sigma = std::stod(cells.at(col_sigma));
        data.rows.push_back(r);
    }
    FitModel model;
    if (model_name == "bulk") model = FitModel::Bulk;
    else if (model_name == "seam") model = FitModel::Seam;
    else if (model_name == "seam_squared") model = FitModel::SeamSquaredBracket;
    else throw std::runtime_error("unknown model '" + model_name + "'");

    size_t drop_sigma = 0, drop_d = 0;
    FitDataset used = data.filtered(&drop_sigma, &drop_d);
    if (model != FitModel::Bulk) {
        bool any_pb = false;
        for (auto& r : used.rows) any_pb |= r.p_bell > 0;
        if (!any_pb) {
            std::cerr << "seam parameters are unidentifiable: no rows with p_bell > 0\n";
            return 3;
        }
    }
    FitResult res = fit_least_squares(used, model);
    json out;
    out["model"] = model_name;
    out["ok"] = res.ok;
    out["rows_total"] = data.rows.size();
    out["rows_used"] = used.rows.size();
    out["rows_dropped_sigma_filter"] = drop_sigma;
    out["rows_dropped_small_d"] = drop_d;
    if (!res.ok) {
        out["error"] = res.message;
        write_file(out_path, out.dump(2) + "\n");
        std::cerr << res.message << "\n";
        return 3;
    }
    json params = json::object(), unc = json::object();
    for (size_t i = 0; i < res.names.size(); i++) {
        params[res.names[i]] = res.values[i];
        unc[res.names[i]] = res.uncertainties[i];
    }
    out["parameters"] = params;
    out["uncertainty_1sigma"] = unc;
    out["chi2"] = res.chi2;
    out["dof"] = res.dof;
    out["iterations"] = res.iterations;
    write_file(out_path, out.dump(2) + "\n");
    return 0;
}

std::string human_duration(double s) {
    char buf[64];
    long days = (long)(s / 86400);
    long hours = (long)((s - days * 86400) / 3600);
    snprintf(buf, sizeof buf, "%ldd %ldh", days, hours);
    return buf;
}

int cmd_estimate(const std::string& config_path, const std::string& out_path, int threads) {
    json cfg = json::parse(read_file(config_path));
    double p = cfg.value("p", 1e-3);
    std::vector<double> pbs = cfg.contains("p_bell") ? as_list(cfg["p_bell"])
                                                     : std::vector<double>{0.0};
    LayoutConfig layout;
    layout.t_c = cfg.value("t_c", 1e-6);
    layout.t_r = cfg.value("t_r", 1e-5);
    int d_min = cfg.value("d_min", 25);
    int d_max = cfg.value("d_max", 61);
    std::vector<std::string> modes = {"distributed"};
    if (cfg.contains("modes")) {
        modes.clear();
        for (auto& m : cfg["modes"]) modes.push_back(m.get<std::string>());
    }
    ErrorModelParams params;
    if (cfg.contains("bulk")) {
        params.bulk.alpha = cfg["bulk"].value("alpha", params.bulk.alpha);
        params.bulk.p_th = cfg["bulk"].value("p_th", params.bulk.p_th);
    }
    if (cfg.contains("seam")) params.seam = seam_from_json(cfg["seam"]);
    std::vector<AlgorithmCost> costs;
    for (auto& jc : cfg.at("algorithm_costs")) {
        AlgorithmCost c;
        c.label = jc.value("label", "cost");
        c.n_toffoli = jc.at("n_toffoli").get<double>();
        c.n_cx = jc.at("n_cx").get<double>();
        c.n_logical = jc.at("n_logical").get<long>();
        c.p_classical = jc.value("p_classical", 0.0);
        costs.push_back(c);
    }
    std::vector<FactorySpec> factories = builtin_factories();
    if (cfg.contains("factories") && cfg["factories"].is_array()) {
        factories.clear();
        for (auto& jf : cfg["factories"]) {
            FactorySpec fs;
            fs.name = jf.value("name", "factory");
            fs.p_out = jf.at("p_out").get<double>();
            fs.qubits = jf.at("qubits").get<long>();
            fs.qubitcycles = jf.value("qubitcycles", 0.0);
            fs.codecycles = jf.value("codecycles", 0.0);
            factories.push_back(fs);
        }
    }
    if (factories.empty()) {
        std::cerr << "empty factory list\n";
        return 3;
    }

    auto t0 = std::chrono::steady_clock::now();
    std::string csv = "# seamsim csv v1\n";
    csv += "p_bell,mode,d,n_rows,logical_per_proc,n_proc,n_factory_proc,phys_per_proc,"
           "total_phys,factory,factory_p_out,duration_s,p_fail,expected_duration_s,"
           "expected_duration,metric,cost_label,space_overhead_pct,time_overhead_pct\n";
    bool have_ref = false;
    EstimateResult ref;
    std::vector<std::pair<std::string, EstimateResult>> rows;
    for (double pb : pbs) {
        for (auto& mode : modes) {
            LayoutConfig l = layout;
            l.mode = mode == "monolithic" ? LayoutMode::Monolithic : LayoutMode::Distributed;
            SweepResult sw =
                optimize_configuration(costs, l, p, pb, factories, d_min, d_max, params, threads);
            if (l.mode == LayoutMode::Distributed && pb == 0.0 && !have_ref) {
                ref = sw.best;
                have_ref = true;
            }
            rows.push_back({mode, sw.best});
        }
    }
    size_t ri = 0;
    for (double pb : pbs) {
        for (auto& mode : modes) {
            const EstimateResult& r = rows[ri++].second;
            char buf[512];
            std::string space = "", time = "";
            if (have_ref && mode == "distributed") {
                char b2[64];
                snprintf(b2, sizeof b2, "%.1f", 100.0 * ((double)r.n_phys / ref.n_phys - 1));
                space = b2;
                snprintf(b2, sizeof b2, "%.1f",
                         100.0 * (r.expected_duration_s / ref.expected_duration_s - 1));
                time = b2;
            }
            snprintf(buf, sizeof buf,
                     "%.10g,%s,%d,%d,%d,%d,%d,%ld,%ld,%s,%.3g,%.6e,%.6e,%.6e,%s,%.6e,%s,%s,%s\n",
                     pb, mode.c_str(), r.d, r.n_rows, 2 * r.n_rows, r.n_proc,
                     mode == "monolithic" ? 0 : 2, r.phys_per_proc, r.n_phys,
                     r.factory->name.c_str(), r.factory->p_out, r.duration_s, r.p_fail,
                     r.expected_duration_s, human_duration(r.expected_duration_s).c_str(),
                     r.metric, r.cost->label.c_str(), space.c_str(), time.c_str());
            csv += buf;
        }
    }
    write_file(out_path, csv);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(out_path, "estimate", cfg, 0, wall);
    return 0;
}

int cmd_dem(const std::string& spec_path, const std::string& out_path) {
    json spec = json::parse(read_file(spec_path));
    PatchSpec ps;
    ps.variant = variant_from_name(spec.value("variant", "plain"));
    ps.d = spec.at("d").get<int>();
    ps.rounds = spec.value("rounds", 0);
    std::string basis = spec.value("basis", "Z");
    ps.basis = basis.empty() ? 'Z' : basis[0];
    ps.p = spec.value("p", 0.0);
    ps.p_bell = spec.value("p_bell", 0.0);
    auto built = build_memory_circuit(ps);
    auto dem = build_dem(built.circuit);
    write_file(out_path, dem.serialize());
    return 0;
}

int cmd_decode_test(const std::string& spec_path, uint64_t trials, uint64_t seed) {
    json spec = json::parse(read_file(spec_path));
    PatchSpec ps;
    ps.variant = variant_from_name(spec.value("variant", "plain"));
    ps.d = spec.at("d").get<int>();
    ps.rounds = spec.value("rounds", 0);
    ps.p = spec.value("p", 1e-3);
    ps.p_bell = spec.value("p_bell", 0.0);
    auto built = build_memory_circuit(ps);
    auto dem = build_dem(built.circuit);
    MatchingGraph graph(dem);
    CounterRng rng(seed);
    uint64_t mismatches = 0, tested = 0;
    for (uint64_t t = 0; t < trials; t++) {
        // sample a random DEM-consistent syndrome with <= 8 defects
        std::vector<uint32_t> defects;
        std::vector<uint8_t> par(dem.n_detectors, 0);
        for (int k = 0; k < 4; k++) {
            auto& m = dem.mechanisms[rng.next_below(dem.mechanisms.size())];
            for (uint32_t dd : m.symptom.detectors) par[dd] ^= 1;
        }
        for (uint32_t dd = 0; dd < dem.n_detectors; dd++)
            if (par[dd] && graph.active(dd)) defects.push_back(dd);
        if (defects.size() > 8) continue;
        tested++;
        auto a = graph.decode(defects);
        auto b = graph.decode_brute_force(defects);
        if (a.weight_scaled != b.weight_scaled) mismatches++;
    }
    std::cout << "decode-test: " << tested << " syndromes, " << mismatches << " weight mismatches\n";
    return mismatches == 0 ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"distributed surface-code workbench"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string spec_path, config_path, data_path, out_path = "out.csv", model = "bulk";
    uint64_t shots = 10000, seed = 1, trials = 1000;
    int threads = default_threads();

    auto* sim = app.add_subcommand("simulate", "run memory experiments over a parameter grid");
    sim->add_option("--spec", spec_path, "PatchSpec grid JSON")->required();
    sim->add_option("--shots", shots, "shots per grid point");
    sim->add_option("--seed", seed, "RNG seed");
    sim->add_option("--threads", threads, "worker threads");
    sim->add_option("--out", out_path, "output CSV")->required();

    auto* fit = app.add_subcommand("fit", "fit an error-rate model to simulation CSV data");
    fit->add_option("--data", data_path, "input CSV from simulate")->required();
    fit->add_option("--model", model, "bulk | seam | seam_squared");
    fit->add_option("--out", out_path, "output JSON")->required();

    auto* est = app.add_subcommand("estimate", "factoring resource estimate");
    est->add_option("--config", config_path, "estimation config JSON")->required();
    est->add_option("--threads", threads, "worker threads");
    est->add_option("--out", out_path, "output CSV")->required();

    auto* dem = app.add_subcommand("dem", "dump the detector error model of one patch");
    dem->add_option("--spec", spec_path, "PatchSpec JSON")->required();
    dem->add_option("--out", out_path, "output DEM text")->required();

    auto* dt = app.add_subcommand("decode-test", "compare exact matching against brute force");
    dt->add_option("--spec", spec_path, "PatchSpec JSON")->required();
    dt->add_option("--trials", trials, "number of random syndromes");
    dt->add_option("--seed", seed, "RNG seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(spec_path, out_path, shots, seed, threads);
        if (fit->parsed()) return cmd_fit(data_path, model, out_path);
        if (est->parsed()) return cmd_estimate(config_path, out_path, threads);
        if (dem->parsed()) return cmd_dem(spec_path, out_path);
        if (dt->parsed()) return cmd_decode_test(spec_path, trials, seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
