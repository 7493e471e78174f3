#include "rrzip/distributions.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rrzip {

std::vector<double> truncated_poisson_pmf(double lambda, int m_max) {
    if (m_max < 1) throw std::invalid_argument("truncated_poisson_pmf: m_max must be >= 1");
    if (!std::isfinite(lambda) || lambda < 0.0)
        throw std::invalid_argument("truncated_poisson_pmf: lambda must be finite and >= 0");

    std::vector<double> pmf(static_cast<size_t>(m_max) + 1, 0.0);
    if (lambda == 0.0) {
        pmf[0] = 1.0;
        return pmf;
    }
    // log space: s*ln(lambda) - ln(s!); the exp(-lambda) factor cancels in the
    // normalization, so large lambda cannot overflow.
    const double log_lambda = std::log(lambda);
    double max_log = -std::numeric_limits<double>::infinity();
    for (int s = 0; s <= m_max; ++s) {
        pmf[s] = s * log_lambda - std::lgamma(s + 1.0);
        max_log = std::max(max_log, pmf[s]);
    }
    double total = 0.0;
    for (double& v : pmf) {
        v = std::exp(v - max_log);
        total += v;
    }
    for (double& v : pmf) v /= total;
    return pmf;
}

std::vector<double> poisson_pmf(double lambda, int m_max) {
    if (m_max < 0) throw std::invalid_argument("poisson_pmf: m_max must be >= 0");
    if (!std::isfinite(lambda) || lambda < 0.0)
        throw std::invalid_argument("poisson_pmf: lambda must be finite and >= 0");
    std::vector<double> pmf(static_cast<size_t>(m_max) + 1, 0.0);
    if (lambda == 0.0) {
        pmf[0] = 1.0;
        return pmf;
    }
    for (int s = 0; s <= m_max; ++s)
        pmf[s] = std::exp(s * std::log(lambda) - lambda - std::lgamma(s + 1.0));
    return pmf;
}

double BernoulliSumDist::mean() const {
    double m = 0.0;
    for (size_t s = 0; s < pmf.size(); ++s) m += static_cast<double>(s) * pmf[s];
    return m;
}

BernoulliSumDist bernoulli_sum_exact(std::span<const double> probs) {
    for (double p : probs)
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("bernoulli_sum_exact: probability outside [0,1]");

    // sequential convolution, one item at a time
    std::vector<double> pmf{1.0};
    for (double p : probs) {
        std::vector<double> next(pmf.size() + 1, 0.0);
        for (size_t s = 0; s < pmf.size(); ++s) {
            next[s] += pmf[s] * (1.0 - p);
            next[s + 1] += pmf[s] * p;
        }
        pmf = std::move(next);
    }
    return BernoulliSumDist{{probs.begin(), probs.end()}, std::move(pmf)};
}

PoissonApproxReport poisson_approx_report(std::span<const double> probs) {
    PoissonApproxReport rep;
    BernoulliSumDist exact = bernoulli_sum_exact(probs);
    rep.lambda = std::accumulate(probs.begin(), probs.end(), 0.0);
    rep.exact_pmf = std::move(exact.pmf);
    rep.poisson_pmf = poisson_pmf(rep.lambda, static_cast<int>(probs.size()));

    const size_t n = rep.exact_pmf.size();
    rep.abs_dev.resize(n);
    rep.rel_dev.resize(n);
    for (size_t s = 0; s < n; ++s) {
        rep.abs_dev[s] = std::abs(rep.exact_pmf[s] - rep.poisson_pmf[s]);
        rep.rel_dev[s] = rep.exact_pmf[s] > 0.0
                             ? rep.abs_dev[s] / rep.exact_pmf[s]
                             : std::numeric_limits<double>::quiet_NaN();
        if (rep.abs_dev[s] > rep.max_abs_dev) {
            rep.max_abs_dev = rep.abs_dev[s];
            rep.max_abs_dev_count = static_cast<int>(s);
        }
    }
    return rep;
}

}  // namespace rrzip
