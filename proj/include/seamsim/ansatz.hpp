#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace seamsim {

struct BulkAnsatz {
    double alpha = 0.05;
    double p_th = 7.43e-3;
};

// Pseudo-threshold bracket form. The fit function uses the plain bracket;
// the squared variant from the path-counting derivation is selectable.
enum class BracketForm : uint8_t { Plain, Squared };

struct SeamAnsatz {
    double alpha1 = 0.09789;
    double alpha2 = 0.04507;
    double alpha3 = 0.05326;
    double alpha_c = 0.2057;
    double p_star = 0.007176;
    double p_bell_star = 0.2983;
    BracketForm bracket = BracketForm::Plain;
};

double eval_bulk_ansatz(int d, double p, const BulkAnsatz& a);
double eval_seam_ansatz(int d, double p, double p_bell, const SeamAnsatz& a);
double eval_multiseam_ansatz(int d_x, int d_z, int n_seam, double p, double p_bell,
                             const SeamAnsatz& a);

struct FitRow {
    int d = 0;
    double p = 0, p_bell = 0;
    double p_hat = 0, sigma = 0;
};

struct FitDataset {
    std::vector<FitRow> rows;

    // keeps rows with sigma < p_hat/2 and d >= 5
    FitDataset filtered(size_t* dropped_sigma = nullptr, size_t* dropped_d = nullptr) const;
};

enum class FitModel : uint8_t { Bulk, Seam, SeamSquaredBracket };

struct FitResult {
    bool ok = false;
    std::string message;
    FitModel model = FitModel::Bulk;
    std::vector<std::string> names;
    std::vector<double> values;
    std::vector<double> uncertainties; // 1 sigma, linear scale
    std::vector<double> covariance;    // log-space, row-major
    double chi2 = 0;
    int dof = 0;
    int iterations = 0;

    BulkAnsatz as_bulk() const;
    SeamAnsatz as_seam() const;
};

// Levenberg-Marquardt chi^2 minimization in log-parameter space.
// Converges when the relative chi^2 change drops below 1e-10 (or after 200
// iterations); a singular normal matrix is reported with the parameter
// combination that is unidentifiable.
FitResult fit_least_squares(const FitDataset& data, FitModel model,
                            const std::vector<double>& init = {});

} // namespace seamsim
