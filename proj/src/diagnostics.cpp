#include "rrzip/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace rrzip {

namespace {

std::string format_value(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

// category index for a value given optional cut points (bins are (-inf,c1],
// (c1,c2], ..., (ck,inf))
int bin_of(double value, const std::vector<double>& cuts) {
    int b = 0;
    while (b < static_cast<int>(cuts.size()) && value > cuts[b]) ++b;
    return b;
}

}  // namespace

std::pair<double, double> information_criteria(const FitResult& fit) {
    const double k = static_cast<double>(fit.k_free);
    const double aic = 2.0 * k - 2.0 * fit.loglik;
    const double bic = (fit.n > 0.0 ? k * std::log(fit.n) : 0.0) - 2.0 * fit.loglik;
    return {aic, bic};
}

PearsonResult pearson_x2(const FitResult& fit, std::span<const double> observed_freqs) {
    if (fit.spec.kind == ModelKind::ZipRegression)
        throw std::invalid_argument("pearson_x2: defined for null-predictor models only");
    const int cells = fit.spec.design.m_items + 1;
    if (static_cast<int>(observed_freqs.size()) != cells)
        throw std::invalid_argument("pearson_x2: observed frequency vector has wrong length");

    double n = 0.0;
    for (double f : observed_freqs) n += f;
    const QMatrix q = build_q_matrix(fit.spec.design);
    const Eigen::VectorXd p = cell_distribution(fit.spec, fit.params, Observation{}, q);

    PearsonResult res;
    res.cell_contributions.resize(cells);
    for (int s = 0; s < cells; ++s) {
        const double expected = n * p[s];
        if (expected < 1e-8)
            throw std::runtime_error("pearson_x2: fitted cell " + std::to_string(s) +
                                     " below 1e-8, statistic undefined");
        const double d = observed_freqs[s] - expected;
        res.cell_contributions[s] = d * d / expected;
        res.x2 += res.cell_contributions[s];
    }
    res.df = (cells - 1) - fit.k_free;
    res.df_table2_compat = cells - fit.k_free;
    return res;
}

Eigen::VectorXd fitted_frequencies(const FitResult& fit, std::span<const Observation> data) {
    const int cells = fit.spec.design.m_items + 1;
    const QMatrix q = build_q_matrix(fit.spec.design);
    Eigen::VectorXd freqs = Eigen::VectorXd::Zero(cells);

    if (fit.spec.kind != ModelKind::ZipRegression) {
        double n = 0.0;
        for (const Observation& o : data) n += o.weight;
        return n * cell_distribution(fit.spec, fit.params, Observation{}, q);
    }
    for (const Observation& o : data)
        freqs += o.weight * cell_distribution(fit.spec, fit.params, o, q);
    return freqs;
}

double theta_star_aggregate(const FitResult& fit, std::span<const Observation> data) {
    const ModelKind kind = fit.spec.kind;
    if (kind != ModelKind::ZipNull && kind != ModelKind::ZipRegression)
        throw std::invalid_argument("theta_star_aggregate: requires a ZIP-family fit");

    double zeros = 0.0, total = 0.0;
    for (const Observation& o : data) {
        if (o.s_star != 0) continue;
        double theta;
        if (kind == ModelKind::ZipNull) {
            theta = 1.0 / (1.0 + std::exp(-fit.params[1]));
        } else {
            theta = theta_of(fit.params.tail(fit.spec.gamma_dim()), o.z);
        }
        zeros += o.weight;
        total += o.weight * theta;
    }
    if (zeros == 0.0)
        throw std::runtime_error("theta_star_aggregate: no observed zero sum scores");
    return total / zeros;
}

std::vector<EffectSizeRow> effect_sizes(const FitResult& fit,
                                        const std::map<std::string, double>& predictor_sds) {
    if (fit.spec.kind != ModelKind::ZipRegression)
        throw std::invalid_argument("effect_sizes: requires a regression fit");

    const auto names = fit.spec.param_names();
    std::vector<EffectSizeRow> rows;
    for (int j = 0; j < static_cast<int>(names.size()); ++j) {
        EffectSizeRow row;
        row.name = names[j];
        row.estimate = fit.params[j];
        row.std_error =
            fit.std_errors.size() > static_cast<Eigen::Index>(j) ? fit.std_errors[j] : 0.0;
        row.t_value = row.std_error > 0.0 ? row.estimate / row.std_error : 0.0;
        row.is_intercept = row.name.find("(intercept)") != std::string::npos;
        if (!row.is_intercept) {
            row.exp_estimate = std::exp(row.estimate);
            const std::string bare = row.name.substr(row.name.find('.') + 1);
            if (auto it = predictor_sds.find(bare); it != predictor_sds.end())
                row.exp_standardized = std::pow(*row.exp_estimate, it->second);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

ResidualGrid residuals_by_predictor(const FitResult& fit, std::span<const Observation> data,
                                    const std::vector<std::string>& x_names,
                                    const std::vector<std::string>& z_names,
                                    const std::string& predictor,
                                    const std::vector<int>& collapse_cells,
                                    const std::vector<double>& cuts,
                                    bool allow_empty_cells) {
    const int m = fit.spec.design.m_items;

    // locate the predictor column; x/z vectors carry the intercept in slot 0
    bool in_x = false;
    int col = -1;
    for (size_t j = 0; j < x_names.size(); ++j)
        if (x_names[j] == predictor) { in_x = true; col = static_cast<int>(j) + 1; }
    if (col < 0)
        for (size_t j = 0; j < z_names.size(); ++j)
            if (z_names[j] == predictor) col = static_cast<int>(j) + 1;
    if (col < 0)
        throw std::invalid_argument("residuals_by_predictor: unknown predictor '" +
                                    predictor + "'");

    // collapsed cell layout
    std::vector<int> cell_group(m + 1);
    std::vector<std::string> cell_labels;
    std::set<int> merged(collapse_cells.begin(), collapse_cells.end());
    for (int c : merged)
        if (c < 0 || c > m)
            throw std::invalid_argument("residuals_by_predictor: collapse cell outside {0..M}");
    int merged_group = -1;
    for (int s = 0; s <= m; ++s) {
        if (merged.count(s)) {
            if (merged_group < 0) {
                merged_group = static_cast<int>(cell_labels.size());
                std::string lab;
                for (int c : merged) lab += (lab.empty() ? "" : "/") + std::to_string(c);
                cell_labels.push_back(lab);
            }
            cell_group[s] = merged_group;
        } else {
            cell_group[s] = static_cast<int>(cell_labels.size());
            cell_labels.push_back(std::to_string(s));
        }
    }
    const int n_cells = static_cast<int>(cell_labels.size());

    // category per respondent
    std::vector<int> category(data.size());
    std::vector<std::string> cat_labels;
    if (cuts.empty()) {
        std::set<double> values;
        for (const Observation& o : data) values.insert((in_x ? o.x : o.z)[col]);
        std::vector<double> sorted(values.begin(), values.end());
        for (double v : sorted) cat_labels.push_back(format_value(v));
        for (size_t i = 0; i < data.size(); ++i) {
            const double v = (in_x ? data[i].x : data[i].z)[col];
            category[i] = static_cast<int>(
                std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin());
        }
    } else {
        for (size_t b = 0; b <= cuts.size(); ++b) {
            std::string lab =
                b == 0 ? "<=" + format_value(cuts[0])
                : b == cuts.size()
                    ? ">" + format_value(cuts.back())
                    : "(" + format_value(cuts[b - 1]) + "," + format_value(cuts[b]) + "]";
            cat_labels.push_back(std::move(lab));
        }
        for (size_t i = 0; i < data.size(); ++i)
            category[i] = bin_of((in_x ? data[i].x : data[i].z)[col], cuts);
    }
    const int n_cats = static_cast<int>(cat_labels.size());

    ResidualGrid grid;
    grid.predictor = predictor;
    grid.category_labels = std::move(cat_labels);
    grid.cell_labels = std::move(cell_labels);
    grid.observed = Eigen::MatrixXd::Zero(n_cats, n_cells);
    grid.fitted = Eigen::MatrixXd::Zero(n_cats, n_cells);
    grid.residuals = Eigen::MatrixXd::Zero(n_cats, n_cells);

    const QMatrix q = build_q_matrix(fit.spec.design);
    Eigen::VectorXd shared;
    if (fit.spec.kind != ModelKind::ZipRegression)
        shared = cell_distribution(fit.spec, fit.params, Observation{}, q);

    for (size_t i = 0; i < data.size(); ++i) {
        const Observation& o = data[i];
        grid.observed(category[i], cell_group[o.s_star]) += o.weight;
        const Eigen::VectorXd p = fit.spec.kind == ModelKind::ZipRegression
                                      ? cell_distribution(fit.spec, fit.params, o, q)
                                      : shared;
        for (int s = 0; s <= m; ++s)
            grid.fitted(category[i], cell_group[s]) += o.weight * p[s];
    }

    for (int c = 0; c < n_cats; ++c) {
        for (int g = 0; g < n_cells; ++g) {
            const double expected = grid.fitted(c, g);
            if (expected < 1e-8) {
                if (!allow_empty_cells)
                    throw std::runtime_error(
                        "residuals_by_predictor: fitted cell below 1e-8 in category '" +
                        grid.category_labels[c] + "' (pass allow_empty_cells to keep going)");
                grid.residuals(c, g) = std::numeric_limits<double>::quiet_NaN();
            } else {
                grid.residuals(c, g) =
                    (grid.observed(c, g) - expected) / std::sqrt(expected);
            }
        }
    }
    return grid;
}

DiagnosticsReport diagnose(const FitResult& fit, std::span<const Observation> data,
                           const std::map<std::string, double>& predictor_sds) {
    DiagnosticsReport rep;
    std::tie(rep.aic, rep.bic) = information_criteria(fit);

    const Eigen::VectorXd freqs = fitted_frequencies(fit, data);
    rep.fitted_freqs.assign(freqs.data(), freqs.data() + freqs.size());

    if (fit.spec.kind != ModelKind::ZipRegression) {
        std::vector<double> observed(fit.spec.design.m_items + 1, 0.0);
        for (const Observation& o : data) observed[o.s_star] += o.weight;
        try {
            rep.pearson = pearson_x2(fit, observed);
        } catch (const std::runtime_error&) {
            rep.notes.push_back("Pearson X2 undefined: a fitted cell is ~0");
        }
    }

    if (fit.spec.kind == ModelKind::ZipNull || fit.spec.kind == ModelKind::ZipRegression) {
        try {
            rep.theta_star_hat = theta_star_aggregate(fit, data);
        } catch (const std::runtime_error&) {
            rep.notes.push_back("theta* aggregate unavailable: no observed zeros");
        }
    }

    if (fit.spec.kind == ModelKind::ZipRegression)
        rep.effects = effect_sizes(fit, predictor_sds);

    if (fit.spec.kind == ModelKind::MultinomialRR) {
        const Eigen::VectorXd pi = multinomial_probs(fit.params);
        for (int s = 0; s < pi.size(); ++s)
            if (pi[s] < 5e-4)
                rep.notes.push_back("boundary estimate: pi_" + std::to_string(s) +
                                    " ~ 0 (displayed as 0.000)");
    }
    for (size_t j = 0; j < fit.se_flagged.size(); ++j)
        if (fit.se_flagged[j])
            rep.notes.push_back("standard error flagged (near-singular Hessian): " +
                                fit.spec.param_names()[j]);
    return rep;
}

}  // namespace rrzip
