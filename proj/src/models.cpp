#include "rrzip/models.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rrzip {

namespace {

constexpr double kUnderflowFloor = 1e-300;

double checked_dot(const double* coef, const Eigen::VectorXd& v, int dim, const char* what) {
    if (v.size() != dim)
        throw std::invalid_argument(std::string(what) + ": dimension mismatch");
    double eta = 0.0;
    for (int j = 0; j < dim; ++j) eta += coef[j] * v[j];
    if (!std::isfinite(eta))
        throw std::domain_error(std::string(what) + ": non-finite linear predictor");
    return eta;
}

double logistic(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

// Truncated Poisson probabilities from eta = ln(lambda) into pi[0..m]. The
// recurrence lambda^s/s! is safe while m*eta stays well under the exp overflow
// range; beyond that, normalize in log space.
void trunc_pois_from_eta(double eta, int m, double* pi) {
    if (m * eta > 600.0) {
        double max_log = -std::numeric_limits<double>::infinity();
        for (int s = 0; s <= m; ++s) {
            pi[s] = s * eta - std::lgamma(s + 1.0);
            max_log = std::max(max_log, pi[s]);
        }
        double total = 0.0;
        for (int s = 0; s <= m; ++s) total += pi[s] = std::exp(pi[s] - max_log);
        for (int s = 0; s <= m; ++s) pi[s] /= total;
        return;
    }
    const double lambda = std::exp(eta);
    pi[0] = 1.0;
    double total = 1.0;
    for (int s = 1; s <= m; ++s) total += pi[s] = pi[s - 1] * lambda / s;
    for (int s = 0; s <= m; ++s) pi[s] /= total;
}

constexpr int kMaxM = 30;  // matches the design-module cap

}  // namespace

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::MultinomialRR: return "multinomial";
        case ModelKind::PoissonRR: return "poisson";
        case ModelKind::ZipNull: return "zip-null";
        case ModelKind::ZipRegression: return "zip-reg";
    }
    return "unknown";
}

int ModelSpec::beta_dim() const {
    return kind == ModelKind::ZipRegression ? 1 + static_cast<int>(lambda_predictors.size()) : 0;
}

int ModelSpec::gamma_dim() const {
    return kind == ModelKind::ZipRegression ? 1 + static_cast<int>(sp_predictors.size()) : 0;
}

int ModelSpec::param_count() const {
    switch (kind) {
        case ModelKind::MultinomialRR: return design.m_items;
        case ModelKind::PoissonRR: return 1;
        case ModelKind::ZipNull: return 2;
        case ModelKind::ZipRegression: return beta_dim() + gamma_dim();
    }
    return 0;
}

std::vector<std::string> ModelSpec::param_names() const {
    std::vector<std::string> names;
    switch (kind) {
        case ModelKind::MultinomialRR:
            for (int s = 1; s <= design.m_items; ++s)
                names.push_back("logit_pi_" + std::to_string(s));
            break;
        case ModelKind::PoissonRR:
            names.push_back("log_lambda");
            break;
        case ModelKind::ZipNull:
            names.push_back("log_lambda");
            names.push_back("logit_theta");
            break;
        case ModelKind::ZipRegression:
            names.push_back("beta.(intercept)");
            for (const auto& p : lambda_predictors) names.push_back("beta." + p);
            names.push_back("gamma.(intercept)");
            for (const auto& p : sp_predictors) names.push_back("gamma." + p);
            break;
    }
    return names;
}

void ModelSpec::validate() const {
    if (kind != ModelKind::ZipRegression &&
        (!lambda_predictors.empty() || !sp_predictors.empty()))
        throw std::invalid_argument("ModelSpec: only zip-reg accepts predictors");
}

double lambda_of(const Eigen::VectorXd& beta, const Eigen::VectorXd& x) {
    return std::exp(checked_dot(beta.data(), x, static_cast<int>(beta.size()), "lambda_of"));
}

double theta_of(const Eigen::VectorXd& gamma, const Eigen::VectorXd& z) {
    return logistic(checked_dot(gamma.data(), z, static_cast<int>(gamma.size()), "theta_of"));
}

Eigen::VectorXd multinomial_probs(const Eigen::VectorXd& logits) {
    if (!logits.allFinite())
        throw std::domain_error("multinomial_probs: non-finite logit");
    Eigen::VectorXd full(logits.size() + 1);
    full[0] = 0.0;  // reference category
    full.tail(logits.size()) = logits;
    const double shift = full.maxCoeff();
    Eigen::VectorXd pi = (full.array() - shift).exp();
    return pi / pi.sum();
}

Eigen::VectorXd cell_distribution(const ModelSpec& spec, const Eigen::VectorXd& params,
                                  const Observation& obs, const QMatrix& q) {
    const int m = spec.design.m_items;
    if (params.size() != spec.param_count())
        throw std::invalid_argument("cell_distribution: parameter length mismatch");
    if (q.m_items() != m)
        throw std::invalid_argument("cell_distribution: QMatrix built for a different M");

    double pi_buf[kMaxM + 1];
    switch (spec.kind) {
        case ModelKind::MultinomialRR:
            return q.entries() * multinomial_probs(params);
        case ModelKind::PoissonRR: {
            if (!std::isfinite(params[0]))
                throw std::domain_error("cell_distribution: non-finite linear predictor");
            trunc_pois_from_eta(params[0], m, pi_buf);
            return q.entries() * Eigen::Map<const Eigen::VectorXd>(pi_buf, m + 1);
        }
        case ModelKind::ZipNull:
        case ModelKind::ZipRegression: {
            double eta, zeta;
            if (spec.kind == ModelKind::ZipNull) {
                eta = params[0];
                zeta = params[1];
                if (!std::isfinite(eta) || !std::isfinite(zeta))
                    throw std::domain_error("cell_distribution: non-finite linear predictor");
            } else {
                const int kb = spec.beta_dim();
                eta = checked_dot(params.data(), obs.x, kb, "cell_distribution");
                zeta = checked_dot(params.data() + kb, obs.z, spec.gamma_dim(),
                                   "cell_distribution");
            }
            const double theta = logistic(zeta);
            trunc_pois_from_eta(eta, m, pi_buf);
            Eigen::VectorXd p =
                (1.0 - theta) * (q.entries() * Eigen::Map<const Eigen::VectorXd>(pi_buf, m + 1));
            p[0] += theta;  // I* theta*: self-protective mass lands on s* = 0
            return p;
        }
    }
    throw std::logic_error("cell_distribution: unknown model kind");
}

double cell_probability(const ModelSpec& spec, const Eigen::VectorXd& params,
                        const Observation& obs, const QMatrix& q) {
    if (obs.s_star < 0 || obs.s_star > spec.design.m_items)
        throw std::invalid_argument("cell_probability: observed score outside {0..M}");
    return cell_distribution(spec, params, obs, q)[obs.s_star];
}

double log_likelihood(const ModelSpec& spec, const Eigen::VectorXd& params,
                      std::span<const Observation> data, const QMatrix& q) {
    const int m = spec.design.m_items;
    double ll = 0.0;

    if (spec.kind != ModelKind::ZipRegression) {
        // cell probabilities shared by every respondent
        if (data.empty()) return 0.0;
        const Eigen::VectorXd shared = cell_distribution(spec, params, data.front(), q);
        for (const Observation& obs : data) {
            if (obs.s_star < 0 || obs.s_star > m)
                throw std::invalid_argument("log_likelihood: observed score outside {0..M}");
            const double p = shared[obs.s_star];
            if (!(p > kUnderflowFloor))
                return -std::numeric_limits<double>::infinity();
            ll += obs.weight * std::log(p);
        }
        return ll;
    }

    if (params.size() != spec.param_count())
        throw std::invalid_argument("log_likelihood: parameter length mismatch");
    if (q.m_items() != m)
        throw std::invalid_argument("log_likelihood: QMatrix built for a different M");

    const int kb = spec.beta_dim();
    const int kg = spec.gamma_dim();
    const double* beta = params.data();
    const double* gamma = params.data() + kb;
    const Eigen::MatrixXd& Q = q.entries();
    double pi_buf[kMaxM + 1];

    for (const Observation& obs : data) {
        if (obs.s_star < 0 || obs.s_star > m)
            throw std::invalid_argument("log_likelihood: observed score outside {0..M}");
        const double eta = checked_dot(beta, obs.x, kb, "log_likelihood");
        const double zeta = checked_dot(gamma, obs.z, kg, "log_likelihood");
        const double theta = logistic(zeta);

        trunc_pois_from_eta(eta, m, pi_buf);
        double mix = 0.0;
        for (int s = 0; s <= m; ++s) mix += Q(obs.s_star, s) * pi_buf[s];
        const double p = (1.0 - theta) * mix + (obs.s_star == 0 ? theta : 0.0);
        if (!(p > kUnderflowFloor))
            return -std::numeric_limits<double>::infinity();
        ll += obs.weight * std::log(p);
    }
    return ll;
}

}  // namespace rrzip
