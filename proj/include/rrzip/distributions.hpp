#ifndef RRZIP_DISTRIBUTIONS_HPP
#define RRZIP_DISTRIBUTIONS_HPP

#include <span>
#include <vector>

namespace rrzip {

// Right-truncated Poisson pmf on {0..m_max}, renormalized. lambda = 0 is the
// point-mass-at-zero limit.
std::vector<double> truncated_poisson_pmf(double lambda, int m_max);

// Untruncated Poisson masses exp(-lambda) lambda^s / s! for s in {0..m_max}.
std::vector<double> poisson_pmf(double lambda, int m_max);

// Exact distribution of a sum of independent Bernoulli variables.
struct BernoulliSumDist {
    std::vector<double> probs;  // per-item success probabilities
    std::vector<double> pmf;    // length probs.size()+1
    double mean() const;
};

BernoulliSumDist bernoulli_sum_exact(std::span<const double> probs);

// Side-by-side comparison of the exact Bernoulli-sum distribution with the
// Poisson(sum of probs) approximation. The Poisson column is deliberately
// left untruncated.
struct PoissonApproxReport {
    double lambda = 0.0;
    std::vector<double> exact_pmf;
    std::vector<double> poisson_pmf;
    std::vector<double> abs_dev;
    std::vector<double> rel_dev;  // abs_dev / exact, NaN where exact == 0
    double max_abs_dev = 0.0;
    int max_abs_dev_count = 0;
};

PoissonApproxReport poisson_approx_report(std::span<const double> probs);

}  // namespace rrzip

#endif
