#include "seamsim/ansatz.hpp"

#include <cmath>
#include <stdexcept>

namespace seamsim {

double eval_bulk_ansatz(int d, double p, const BulkAnsatz& a) {
    return a.alpha * std::pow(p / a.p_th, (d + 1) / 2.0);
}

namespace {

double seam_sum(int d, double p, double p_bell, const SeamAnsatz& a) {
    // sum_{i=1..d} (p_bell/p_bell**)^{i/2} (p/p*)^{(d+1-i)/2}
    double bracket = 1.0 + a.alpha_c / (1.0 - std::sqrt(p / a.p_star));
    if (a.bracket == BracketForm::Squared) bracket *= bracket;
    double xb = p_bell / a.p_bell_star * bracket;
    double xp = p / a.p_star;
    double sum = 0;
    for (int i = 1; i <= d; i++)
        sum += std::pow(xb, i / 2.0) * std::pow(xp, (d + 1 - i) / 2.0);
    return sum;
}

} // namespace

double eval_seam_ansatz(int d, double p, double p_bell, const SeamAnsatz& a) {
    if (p >= a.p_star)
        throw std::domain_error("eval_seam_ansatz: p >= p* (pseudo-threshold diverges)");
    double e = (d + 1) / 2.0;
    return a.alpha1 * std::pow(p_bell / a.p_bell_star, e) + a.alpha2 * std::pow(p / a.p_star, e) +
           a.alpha3 * seam_sum(d, p, p_bell, a);
}

double eval_multiseam_ansatz(int d_x, int d_z, int n_seam, double p, double p_bell,
                             const SeamAnsatz& a) {
    if (p >= a.p_star)
        throw std::domain_error("eval_multiseam_ansatz: p >= p* (pseudo-threshold diverges)");
    double e = (d_x + 1) / 2.0;
    return a.alpha1 * n_seam * std::pow(p_bell / a.p_bell_star, e) +
           a.alpha2 * ((double)d_z / d_x) * std::pow(p / a.p_star, e) +
           a.alpha3 * n_seam * seam_sum(d_x, p, p_bell, a);
}

FitDataset FitDataset::filtered(size_t* dropped_sigma, size_t* dropped_d) const {
    FitDataset out;
    size_t ns = 0, nd = 0;
    for (const FitRow& r : rows) {
        if (r.d < 5) {
            nd++;
            continue;
        }
        if (!(r.sigma < r.p_hat / 2) || r.sigma <= 0) {
            ns++;
            continue;
        }
        out.rows.push_back(r);
    }
    if (dropped_sigma) *dropped_sigma = ns;
    if (dropped_d) *dropped_d = nd;
    return out;
}

namespace {

struct Model {
    FitModel kind;
    std::vector<std::string> names;
    std::vector<double> defaults; // linear-space starting point

    double eval(const std::vector<double>& theta_log, const FitRow& r) const {
        auto v = [&](size_t i) { return std::exp(theta_log[i]); };
        if (kind == FitModel::Bulk) {
            BulkAnsatz b{v(0), v(1)};
            return eval_bulk_ansatz(r.d, r.p, b);
        }
        SeamAnsatz s;
        s.alpha1 = v(0);
        s.alpha2 = v(1);
        s.alpha3 = v(2);
        s.alpha_c = v(3);
        s.p_star = v(4);
        s.p_bell_star = v(5);
        s.bracket = kind == FitModel::SeamSquaredBracket ? BracketForm::Squared : BracketForm::Plain;
        if (r.p >= s.p_star) return 1e12 * (1 + r.p / s.p_star); // push the fit away
        return eval_seam_ansatz(r.d, r.p, r.p_bell, s);
    }
};

Model make_model(FitModel kind) {
    if (kind == FitModel::Bulk) return {kind, {"alpha", "p_th"}, {0.1, 0.01}};
    return {kind,
            {"alpha1", "alpha2", "alpha3", "alpha_c", "p_star", "p_bell_star"},
            {0.1, 0.05, 0.05, 0.3, 0.01, 0.3}};
}

double chi2_of(const Model& m, const std::vector<double>& theta, const FitDataset& d) {
    double s = 0;
    for (const FitRow& r : d.rows) {
        double f = m.eval(theta, r);
        double z = (r.p_hat - f) / r.sigma;
        s += z * z;
    }
    return s;
}

// solve A x = b in place (n small); returns false on a singular pivot and
// reports the offending column
bool solve_linear(std::vector<double> A, std::vector<double> b, int n, std::vector<double>& x,
                  int* bad_col = nullptr) {
    x.assign(n, 0);
    std::vector<int> perm(n);
    for (int i = 0; i < n; i++) perm[i] = i;
    for (int col = 0; col < n; col++) {
        int piv = col;
        for (int r2 = col + 1; r2 < n; r2++)
            if (std::fabs(A[r2 * n + col]) > std::fabs(A[piv * n + col])) piv = r2;
        if (std::fabs(A[piv * n + col]) < 1e-300) {
            if (bad_col) *bad_col = col;
            return false;
        }
        if (piv != col) {
            for (int k = 0; k < n; k++) std::swap(A[piv * n + k], A[col * n + k]);
            std::swap(b[piv], b[col]);
        }
        for (int r2 = col + 1; r2 < n; r2++) {
            double f = A[r2 * n + col] / A[col * n + col];
            for (int k = col; k < n; k++) A[r2 * n + k] -= f * A[col * n + k];
            b[r2] -= f * b[col];
        }
    }
    for (int r2 = n - 1; r2 >= 0; r2--) {
        double s = b[r2];
        for (int k = r2 + 1; k < n; k++) s -= A[r2 * n + k] * x[k];
        x[r2] = s / A[r2 * n + r2];
    }
    return true;
}

bool invert(const std::vector<double>& A, int n, std::vector<double>& inv) {
    inv.assign(n * n, 0);
    for (int c = 0; c < n; c++) {
        std::vector<double> e(n, 0), col;
        e[c] = 1;
        if (!solve_linear(A, e, n, col)) return false;
        for (int r2 = 0; r2 < n; r2++) inv[r2 * n + c] = col[r2];
    }
    return true;
}

} // namespace

FitResult fit_least_squares(const FitDataset& data, FitModel model,
                            const std::vector<double>& init) {
    Model m = make_model(model);
    int np = (int)m.names.size();
    FitResult res;
    res.model = model;
    res.names = m.names;
    if ((int)data.rows.size() < np) {
        res.message = "under-determined fit: " + std::to_string(data.rows.size()) +
                      " rows for " + std::to_string(np) + " parameters";
        return res;
    }
    for (const FitRow& r : data.rows)
        if (r.sigma <= 0) {
            res.message = "row with non-positive sigma";
            return res;
        }

    std::vector<double> start = init.empty() ? m.defaults : init;
    if ((int)start.size() != np) {
        res.message = "wrong number of initial parameters";
        return res;
    }
    std::vector<double> theta(np);
    for (int i = 0; i < np; i++) {
        if (start[i] <= 0) {
            res.message = "initial parameters must be positive";
            return res;
        }
        theta[i] = std::log(start[i]);
    }

    int nrows = (int)data.rows.size();
    double chi2 = chi2_of(m, theta, data);
    double lambda = 1e-3;
    int it = 0;
    int bad_col = -1;
    std::vector<double> J(nrows * np), r0(nrows);
    for (; it < 200; it++) {
        // residuals and numeric Jacobian (central differences in log space)
        for (int i = 0; i < nrows; i++)
            r0[i] = (data.rows[i].p_hat - m.eval(theta, data.rows[i])) / data.rows[i].sigma;
        for (int j = 0; j < np; j++) {
            double h = 1e-6;
            std::vector<double> tp = theta, tm = theta;
            tp[j] += h;
            tm[j] -= h;
            for (int i = 0; i < nrows; i++) {
                double fp = m.eval(tp, data.rows[i]), fm = m.eval(tm, data.rows[i]);
                J[i * np + j] = -(fp - fm) / (2 * h) / data.rows[i].sigma;
            }
        }
        // normal equations (J^T J + lambda diag) delta = -J^T r
        std::vector<double> A(np * np, 0), g(np, 0);
        for (int i = 0; i < nrows; i++) {
            for (int a = 0; a < np; a++) {
                g[a] -= J[i * np + a] * r0[i];
                for (int b = a; b < np; b++) A[a * np + b] += J[i * np + a] * J[i * np + b];
            }
        }
        for (int a = 0; a < np; a++)
            for (int b = 0; b < a; b++) A[a * np + b] = A[b * np + a];

        bool improved = false;
        for (int tries = 0; tries < 12 && !improved; tries++) {
            std::vector<double> Adamp = A;
            for (int a = 0; a < np; a++) Adamp[a * np + a] += lambda * (A[a * np + a] + 1e-12);
            std::vector<double> delta;
            if (!solve_linear(Adamp, g, np, delta, &bad_col)) {
                res.message = "singular normal matrix; parameter '" + m.names[bad_col] +
                              "' is unidentifiable from this dataset";
                return res;
            }
            std::vector<double> cand = theta;
            for (int a = 0; a < np; a++) cand[a] += delta[a];
            double c2 = chi2_of(m, cand, data);
            if (std::isfinite(c2) && c2 <= chi2) {
                double rel = chi2 > 0 ? (chi2 - c2) / chi2 : 0;
                theta = cand;
                improved = true;
                bool converged = rel < 1e-10;
                chi2 = c2;
                lambda = std::max(lambda * 0.3, 1e-12);
                if (converged) it = 1000; // break outer loop
            } else {
                lambda *= 10;
            }
        }
        if (!improved) break; // stuck: lambda exploded, accept current point
        if (it >= 1000) break;
    }

    // covariance from the Gauss-Newton normal matrix at the optimum
    for (int i = 0; i < nrows; i++)
        r0[i] = (data.rows[i].p_hat - m.eval(theta, data.rows[i])) / data.rows[i].sigma;
    for (int j = 0; j < np; j++) {
        double h = 1e-6;
        std::vector<double> tp = theta, tm = theta;
        tp[j] += h;
        tm[j] -= h;
        for (int i = 0; i < nrows; i++)
            J[i * np + j] = -(m.eval(tp, data.rows[i]) - m.eval(tm, data.rows[i])) / (2 * h) /
                            data.rows[i].sigma;
    }
    std::vector<double> A(np * np, 0);
    for (int i = 0; i < nrows; i++)
        for (int a = 0; a < np; a++)
            for (int b = 0; b < np; b++) A[a * np + b] += J[i * np + a] * J[i * np + b];
    std::vector<double> cov;
    if (!invert(A, np, cov)) {
        int bc = 0;
        solve_linear(A, std::vector<double>(np, 0.0), np, cov, &bc);
        res.message = "singular normal matrix; parameter '" + m.names[bc] +
                      "' is unidentifiable from this dataset";
        return res;
    }

    res.ok = true;
    res.chi2 = chi2_of(m, theta, data);
    res.dof = nrows - np;
    res.iterations = std::min(it, 200);
    res.covariance = cov;
    res.values.resize(np);
    res.uncertainties.resize(np);
    for (int i = 0; i < np; i++) {
        res.values[i] = std::exp(theta[i]);
        double var = cov[i * np + i];
        res.uncertainties[i] = res.values[i] * (var > 0 ? std::sqrt(var) : 0);
    }
    return res;
}

BulkAnsatz FitResult::as_bulk() const {
    if (model != FitModel::Bulk || values.size() != 2) throw std::logic_error("not a bulk fit");
    return {values[0], values[1]};
}

SeamAnsatz FitResult::as_seam() const {
    if (values.size() != 6) throw std::logic_error("not a seam fit");
    SeamAnsatz s;
    s.alpha1 = values[0];
    s.alpha2 = values[1];
    s.alpha3 = values[2];
    s.alpha_c = values[3];
    s.p_star = values[4];
    s.p_bell_star = values[5];
    s.bracket =
        model == FitModel::SeamSquaredBracket ? BracketForm::Squared : BracketForm::Plain;
    return s;
}

} // namespace seamsim
