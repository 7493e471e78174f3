#include "rrzip/estimation.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>

namespace rrzip {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCondCutoff = 1e12;

double probe(const std::function<double(const Eigen::VectorXd&)>& f,
             const Eigen::VectorXd& at) {
    const double v = f(at);
    if (!std::isfinite(v))
        throw std::domain_error("numeric derivative: objective not finite at probe point");
    return v;
}

struct BfgsOutcome {
    Eigen::VectorXd x;
    double loglik = -kInf;
    bool converged = false;
    int iterations = 0;
    double grad_max_norm = kInf;
};

// Maximizes ll() by BFGS on f = -ll with Armijo backtracking. ll may return
// -inf (or throw std::domain_error) for rejected regions; the line search
// backtracks through those.
BfgsOutcome bfgs_maximize(const std::function<double(const Eigen::VectorXd&)>& ll,
                          const Eigen::VectorXd& x0, const FitOptions& opts) {
    const auto f = [&](const Eigen::VectorXd& x) -> double {
        try {
            const double v = ll(x);
            return std::isnan(v) ? kInf : -v;
        } catch (const std::domain_error&) {
            return kInf;  // overflowed linear predictor: reject the step
        }
    };

    BfgsOutcome out;
    out.x = x0;
    double fx = f(out.x);
    if (!std::isfinite(fx)) return out;  // invalid starting point
    out.loglik = -fx;

    const int k = static_cast<int>(x0.size());
    Eigen::MatrixXd B = Eigen::MatrixXd::Identity(k, k);  // inverse-Hessian approx
    Eigen::VectorXd grad;
    try {
        grad = numeric_gradient(f, out.x, opts.rel_step_grad);
    } catch (const std::domain_error&) {
        return out;
    }

    for (int iter = 0; iter < opts.max_iter; ++iter) {
        out.grad_max_norm = grad.lpNorm<Eigen::Infinity>();
        if (out.grad_max_norm < opts.tol_grad) {
            out.converged = true;
            break;
        }

        Eigen::VectorXd dir = -(B * grad);
        if (dir.dot(grad) >= 0.0) dir = -grad;  // reset on a non-descent direction

        // Armijo backtracking
        const double slope = grad.dot(dir);
        double alpha = 1.0;
        double f_new = kInf;
        Eigen::VectorXd x_new;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            x_new = out.x + alpha * dir;
            f_new = f(x_new);
            if (std::isfinite(f_new) && f_new <= fx + 1e-4 * alpha * slope) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            // no improving step at the smallest trial length: treat as stalled
            out.converged = true;
            break;
        }

        const Eigen::VectorXd step = x_new - out.x;
        const double rel_step = step.norm() / std::max(1.0, out.x.norm());

        Eigen::VectorXd grad_new;
        try {
            grad_new = numeric_gradient(f, x_new, opts.rel_step_grad);
        } catch (const std::domain_error&) {
            // gradient probes left the valid region; keep the accepted point
            out.x = x_new;
            fx = f_new;
            out.iterations = iter + 1;
            break;
        }

        const Eigen::VectorXd y = grad_new - grad;
        const double sy = step.dot(y);
        if (sy > 1e-12 * step.norm() * y.norm()) {
            const Eigen::VectorXd By = B * y;
            const double yBy = y.dot(By);
            // BFGS inverse update
            B += ((sy + yBy) / (sy * sy)) * (step * step.transpose()) -
                 (By * step.transpose() + step * By.transpose()) / sy;
        }

        out.x = x_new;
        fx = f_new;
        grad = grad_new;
        out.iterations = iter + 1;
        if (opts.on_iterate) opts.on_iterate(out.iterations, -fx);

        if (rel_step < opts.tol_step) {
            out.grad_max_norm = grad.lpNorm<Eigen::Infinity>();
            out.converged = true;
            break;
        }
    }
    out.loglik = -fx;
    if (!out.converged) out.grad_max_norm = grad.lpNorm<Eigen::Infinity>();
    return out;
}

struct CovarianceResult {
    Eigen::MatrixXd cov;
    Eigen::VectorXd se;
    std::vector<bool> flagged;
    bool well_conditioned = false;
    bool available = false;
};

// Inverts the observed Hessian of -loglik; near-singular spectra fall back to
// a pseudo-inverse with per-parameter flags on the dropped directions.
// noise_floor: eigenvalues at the finite-difference noise scale are treated as
// zero — the 1e12 condition cutoff alone cannot see them.
CovarianceResult covariance_from_hessian(const Eigen::MatrixXd& hess, double noise_floor) {
    const int k = static_cast<int>(hess.rows());
    CovarianceResult res;
    res.flagged.assign(k, false);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hess);
    if (eig.info() != Eigen::Success) return res;
    const Eigen::VectorXd& vals = eig.eigenvalues();
    const double max_val = vals.cwiseAbs().maxCoeff();
    if (!(max_val > 0.0) || !std::isfinite(max_val)) return res;

    const double cutoff = std::max(max_val / kCondCutoff, noise_floor);
    Eigen::VectorXd inv_vals(k);
    bool dropped = false;
    for (int i = 0; i < k; ++i) {
        if (vals[i] > cutoff) {
            inv_vals[i] = 1.0 / vals[i];
        } else {
            inv_vals[i] = 0.0;
            dropped = true;
            for (int j = 0; j < k; ++j)
                if (std::abs(eig.eigenvectors()(j, i)) > 1e-3) res.flagged[j] = true;
        }
    }
    res.cov = eig.eigenvectors() * inv_vals.asDiagonal() * eig.eigenvectors().transpose();
    res.se = res.cov.diagonal().cwiseMax(0.0).cwiseSqrt();
    res.well_conditioned = !dropped;
    res.available = true;
    return res;
}

}  // namespace

Eigen::VectorXd numeric_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                 const Eigen::VectorXd& at, double rel_step) {
    const int k = static_cast<int>(at.size());
    Eigen::VectorXd g(k);
    Eigen::VectorXd x = at;
    for (int j = 0; j < k; ++j) {
        const double h = rel_step * std::max(std::abs(at[j]), 1.0);
        x[j] = at[j] + h;
        const double fp = probe(f, x);
        x[j] = at[j] - h;
        const double fm = probe(f, x);
        x[j] = at[j];
        g[j] = (fp - fm) / (2.0 * h);
    }
    return g;
}

Eigen::MatrixXd numeric_hessian(const std::function<double(const Eigen::VectorXd&)>& f,
                                const Eigen::VectorXd& at, double rel_step) {
    const int k = static_cast<int>(at.size());
    Eigen::VectorXd h(k);
    for (int j = 0; j < k; ++j) h[j] = rel_step * std::max(std::abs(at[j]), 1.0);

    Eigen::MatrixXd hess(k, k);
    Eigen::VectorXd x = at;
    const double f0 = probe(f, x);

    for (int j = 0; j < k; ++j) {
        x[j] = at[j] + h[j];
        const double fp = probe(f, x);
        x[j] = at[j] - h[j];
        const double fm = probe(f, x);
        x[j] = at[j];
        hess(j, j) = (fp - 2.0 * f0 + fm) / (h[j] * h[j]);
    }
    for (int j = 0; j < k; ++j) {
        for (int l = j + 1; l < k; ++l) {
            x[j] = at[j] + h[j]; x[l] = at[l] + h[l];
            const double fpp = probe(f, x);
            x[l] = at[l] - h[l];
            const double fpm = probe(f, x);
            x[j] = at[j] - h[j]; x[l] = at[l] + h[l];
            const double fmp = probe(f, x);
            x[l] = at[l] - h[l];
            const double fmm = probe(f, x);
            x[j] = at[j]; x[l] = at[l];
            const double v = (fpp - fpm - fmp + fmm) / (4.0 * h[j] * h[l]);
            hess(j, l) = v;
            hess(l, j) = v;
        }
    }
    return 0.5 * (hess + hess.transpose());
}

Eigen::VectorXd default_start(const ModelSpec& spec, std::span<const Observation> data) {
    const int m = spec.design.m_items;

    // moment-corrected mean of the true score, clamped to a sane rate
    double wsum = 0.0, mean_obs = 0.0;
    for (const Observation& o : data) {
        wsum += o.weight;
        mean_obs += o.weight * o.s_star;
    }
    if (wsum > 0.0) mean_obs /= wsum;
    const double denom = spec.design.p_yes_given_1 - spec.design.p_yes_given_0;
    double lam0 = (mean_obs - m * spec.design.p_yes_given_0) / denom;
    lam0 = std::min(static_cast<double>(m), std::max(0.05, lam0));
    const double logit_01 = std::log(0.1 / 0.9);

    switch (spec.kind) {
        case ModelKind::MultinomialRR:
            return Eigen::VectorXd::Zero(m);  // uniform over categories
        case ModelKind::PoissonRR: {
            Eigen::VectorXd p(1);
            p[0] = std::log(lam0);
            return p;
        }
        case ModelKind::ZipNull: {
            Eigen::VectorXd p(2);
            p[0] = std::log(lam0);
            p[1] = logit_01;
            return p;
        }
        case ModelKind::ZipRegression: {
            Eigen::VectorXd p = Eigen::VectorXd::Zero(spec.param_count());
            p[0] = std::log(lam0);          // beta intercept
            p[spec.beta_dim()] = logit_01;  // gamma intercept
            return p;
        }
    }
    throw std::logic_error("default_start: unknown model kind");
}

FitResult fit(const ModelSpec& spec, std::span<const Observation> data, const QMatrix& q,
              const FitOptions& opts) {
    spec.validate();
    if (data.empty()) throw std::invalid_argument("fit: empty data");

    const auto ll = [&](const Eigen::VectorXd& x) { return log_likelihood(spec, x, data, q); };
    const auto negll = [&](const Eigen::VectorXd& x) { return -ll(x); };

    const Eigen::VectorXd x0 = default_start(spec, data);
    const int k = static_cast<int>(x0.size());
    std::mt19937_64 rng(opts.seed);

    FitResult result;
    result.spec = spec;
    result.k_free = k;
    result.n = 0.0;
    for (const Observation& o : data) result.n += o.weight;

    std::optional<BfgsOutcome> best;              // highest loglik over all starts
    std::optional<BfgsOutcome> best_converged;    // ... among converged runs
    CovarianceResult best_cov;
    int starts = 0;
    double max_start_ll = -std::numeric_limits<double>::infinity();

    for (int s = 0; s < std::max(1, opts.max_starts); ++s) {
        Eigen::VectorXd start = x0;
        if (s > 0) {
            for (int j = 0; j < k; ++j) {
                const double u = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
                start[j] += opts.start_perturb_radius * u;
            }
        }
        ++starts;
        try {
            max_start_ll = std::max(max_start_ll, ll(start));
        } catch (const std::domain_error&) {
        }
        BfgsOutcome run = bfgs_maximize(ll, start, opts);
        if (!best || run.loglik > best->loglik) best = run;

        if (run.converged) {
            if (!best_converged || run.loglik > best_converged->loglik) {
                // central-difference roundoff scale for the Hessian entries
                const double noise_floor = 64.0 * std::numeric_limits<double>::epsilon() *
                                           std::max(1.0, std::abs(run.loglik)) /
                                           (opts.rel_step_hess * opts.rel_step_hess);
                CovarianceResult cov;
                try {
                    cov = covariance_from_hessian(
                        numeric_hessian(negll, run.x, opts.rel_step_hess), noise_floor);
                } catch (const std::domain_error&) {
                    cov = CovarianceResult{};
                }
                best_converged = run;
                best_cov = cov;
                if (cov.available && cov.well_conditioned) break;  // done
            }
        }
    }

    result.n_starts_used = starts;
    // a converged run that sits below some starting value is a poor local
    // optimum; fall back to the best run overall in that case
    if (best_converged && best_converged->loglik < max_start_ll - 1e-9 &&
        best->loglik > best_converged->loglik)
        best_converged.reset();
    const BfgsOutcome& pick = best_converged ? *best_converged : *best;
    result.params = pick.x;
    result.loglik = pick.loglik;
    result.iterations = pick.iterations;
    result.grad_max_norm = pick.grad_max_norm;
    result.converged = pick.converged;

    if (best_converged) {
        result.status = (best_cov.available && best_cov.well_conditioned)
                            ? FitStatus::Converged
                            : FitStatus::SingularHessian;
    } else {
        result.status = FitStatus::NonConvergence;
        const double noise_floor = 64.0 * std::numeric_limits<double>::epsilon() *
                                   std::max(1.0, std::abs(pick.loglik)) /
                                   (opts.rel_step_hess * opts.rel_step_hess);
        try {
            best_cov = covariance_from_hessian(
                numeric_hessian(negll, pick.x, opts.rel_step_hess), noise_floor);
        } catch (const std::domain_error&) {
            best_cov = CovarianceResult{};
        }
    }

    if (best_cov.available) {
        result.covariance = best_cov.cov;
        result.std_errors = best_cov.se;
        result.se_flagged = best_cov.flagged;
    } else {
        result.covariance = Eigen::MatrixXd::Zero(k, k);
        result.std_errors =
            Eigen::VectorXd::Constant(k, std::numeric_limits<double>::quiet_NaN());
        result.se_flagged.assign(k, true);
    }
    if (result.status == FitStatus::NonConvergence)
        result.se_flagged.assign(k, true);  // nothing about the curvature is trustworthy

    return result;
}

}  // namespace rrzip
