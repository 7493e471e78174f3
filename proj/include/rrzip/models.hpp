#ifndef RRZIP_MODELS_HPP
#define RRZIP_MODELS_HPP

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "rrzip/design.hpp"

namespace rrzip {

// The four nested model families:
//   MultinomialRR — free true-score distribution behind the misclassification,
//   PoissonRR     — right-truncated Poisson true scores,
//   ZipNull       — Poisson RR plus a constant observed-zero-inflation probability,
//   ZipRegression — log-linear Poisson rate and logit zero-inflation with predictors.
enum class ModelKind { MultinomialRR, PoissonRR, ZipNull, ZipRegression };

std::string to_string(ModelKind kind);

struct ModelSpec {
    ModelKind kind = ModelKind::ZipNull;
    RRDesign design;
    // predictor column names, excluding the intercept; must be empty for the
    // null models. ZipRegression always carries intercepts in both parts.
    std::vector<std::string> lambda_predictors;
    std::vector<std::string> sp_predictors;

    int beta_dim() const;   // 0 unless ZipRegression, else 1 + lambda_predictors
    int gamma_dim() const;  // 0 unless ZipRegression, else 1 + sp_predictors
    int param_count() const;
    std::vector<std::string> param_names() const;
    void validate() const;
};

// One respondent (or one frequency-table row when weight > 1). Predictor
// vectors carry a leading 1 for the intercept.
struct Observation {
    int s_star = 0;
    Eigen::VectorXd x = Eigen::VectorXd::Ones(1);
    Eigen::VectorXd z = Eigen::VectorXd::Ones(1);
    double weight = 1.0;
};

// Unconstrained parameter layouts:
//   MultinomialRR — M logits for categories 1..M (softmax, reference 0)
//   PoissonRR     — ln(lambda)
//   ZipNull       — (ln(lambda), logit(theta*))
//   ZipRegression — (beta_0..beta_k, gamma_0..gamma_l)

// Link transforms. Throw std::domain_error on a non-finite linear predictor
// so the optimizer can backtrack.
double lambda_of(const Eigen::VectorXd& beta, const Eigen::VectorXd& x);
double theta_of(const Eigen::VectorXd& gamma, const Eigen::VectorXd& z);

// Multinomial true-score probabilities from the softmax layout.
Eigen::VectorXd multinomial_probs(const Eigen::VectorXd& logits);

// P(S* = s*) for each observed cell 0..M given one respondent's predictors.
Eigen::VectorXd cell_distribution(const ModelSpec& spec, const Eigen::VectorXd& params,
                                  const Observation& obs, const QMatrix& q);

double cell_probability(const ModelSpec& spec, const Eigen::VectorXd& params,
                        const Observation& obs, const QMatrix& q);

// Observed-data log-likelihood: sum of weight * ln(cell probability). Returns
// -infinity when any cell probability underflows below 1e-300.
double log_likelihood(const ModelSpec& spec, const Eigen::VectorXd& params,
                      std::span<const Observation> data, const QMatrix& q);

}  // namespace rrzip

#endif
