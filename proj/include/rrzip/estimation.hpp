#ifndef RRZIP_ESTIMATION_HPP
#define RRZIP_ESTIMATION_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rrzip/models.hpp"

namespace rrzip {

struct FitOptions {
    double tol_grad = 1e-8;         // max-norm of the numerical gradient
    double tol_step = 1e-10;        // relative step length
    int max_iter = 500;
    int max_starts = 10;            // retries from perturbed starting values
    double rel_step_grad = 1e-6;    // central-difference step, gradient
    double rel_step_hess = 1e-4;    // central-difference step, Hessian
    double start_perturb_radius = 0.5;
    std::uint64_t seed = 0;         // perturbation stream
    // optional observer, called once per accepted iteration with the loglik
    std::function<void(int iter, double loglik)> on_iterate;
};

enum class FitStatus {
    Converged,       // optimizer converged, well-conditioned Hessian
    SingularHessian, // optimizer converged, covariance from a pseudo-inverse
    NonConvergence,  // iteration budget exhausted on every start
};

struct FitResult {
    ModelSpec spec;
    Eigen::VectorXd params;
    double loglik = 0.0;
    Eigen::MatrixXd covariance;       // inverse observed Hessian of -loglik
    Eigen::VectorXd std_errors;
    std::vector<bool> se_flagged;     // true where the pseudo-inverse dropped mass
    bool converged = false;
    FitStatus status = FitStatus::NonConvergence;
    int n_starts_used = 0;
    int iterations = 0;
    double grad_max_norm = 0.0;
    int k_free = 0;
    double n = 0.0;                   // total respondent weight
};

// Central differences with per-coordinate step rel_step*max(|theta_j|,1).
// Throws std::domain_error if any probe point is non-finite.
Eigen::VectorXd numeric_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                 const Eigen::VectorXd& at, double rel_step);
Eigen::MatrixXd numeric_hessian(const std::function<double(const Eigen::VectorXd&)>& f,
                                const Eigen::VectorXd& at, double rel_step);

// Deterministic default starting values (moment-based rates, logit(0.1) SP).
Eigen::VectorXd default_start(const ModelSpec& spec, std::span<const Observation> data);

// BFGS ascent on the observed-data log-likelihood with multi-start recovery.
FitResult fit(const ModelSpec& spec, std::span<const Observation> data, const QMatrix& q,
              const FitOptions& opts = {});

}  // namespace rrzip

#endif
