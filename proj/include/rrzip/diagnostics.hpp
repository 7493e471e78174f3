#ifndef RRZIP_DIAGNOSTICS_HPP
#define RRZIP_DIAGNOSTICS_HPP

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rrzip/estimation.hpp"

namespace rrzip {

// AIC = 2k - 2 loglik, BIC = k ln(n) - 2 loglik.
std::pair<double, double> information_criteria(const FitResult& fit);

struct PearsonResult {
    double x2 = 0.0;
    int df = 0;                 // (cells - 1) - k
    int df_table2_compat = 0;   // cells - k; see README note on df conventions
    std::vector<double> cell_contributions;
};

// Goodness of fit over the M+1 sum-score cells; null-predictor models only.
PearsonResult pearson_x2(const FitResult& fit, std::span<const double> observed_freqs);

// Expected frequency per observed sum score under the fitted model.
Eigen::VectorXd fitted_frequencies(const FitResult& fit, std::span<const Observation> data);

// Weighted mean of the fitted SP probabilities over respondents with an
// observed sum score of zero (ZIP-family fits only).
double theta_star_aggregate(const FitResult& fit, std::span<const Observation> data);

struct EffectSizeRow {
    std::string name;
    double estimate = 0.0;
    double std_error = 0.0;
    double t_value = 0.0;
    bool is_intercept = false;
    std::optional<double> exp_estimate;      // absent for intercepts
    std::optional<double> exp_standardized;  // exp(estimate)^sd when an sd is known
};

std::vector<EffectSizeRow> effect_sizes(const FitResult& fit,
                                        const std::map<std::string, double>& predictor_sds);

// Pearson residuals on a (predictor category) x (sum-score cell) grid.
struct ResidualGrid {
    std::string predictor;
    std::vector<std::string> category_labels;
    std::vector<std::string> cell_labels;   // after collapsing
    Eigen::MatrixXd observed;
    Eigen::MatrixXd fitted;
    Eigen::MatrixXd residuals;              // NaN rows for empty categories
};

// collapse_cells lists sum scores merged into one cell (e.g. {4,5}); cuts, when
// nonempty, bin a continuous predictor at the given points; otherwise each
// distinct value forms a category.
ResidualGrid residuals_by_predictor(const FitResult& fit, std::span<const Observation> data,
                                    const std::vector<std::string>& x_names,
                                    const std::vector<std::string>& z_names,
                                    const std::string& predictor,
                                    const std::vector<int>& collapse_cells,
                                    const std::vector<double>& cuts,
                                    bool allow_empty_cells = false);

struct DiagnosticsReport {
    double aic = 0.0;
    double bic = 0.0;
    std::optional<PearsonResult> pearson;
    std::vector<double> fitted_freqs;
    std::optional<double> theta_star_hat;
    std::vector<EffectSizeRow> effects;
    std::vector<std::string> notes;  // boundary estimates, flagged standard errors
};

DiagnosticsReport diagnose(const FitResult& fit, std::span<const Observation> data,
                           const std::map<std::string, double>& predictor_sds = {});

}  // namespace rrzip

#endif
