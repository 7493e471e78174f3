#include "rrzip/design.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rrzip {

namespace {

constexpr int kMaxItems = 30;

// Pascal-triangle row; exact in double for n <= 30.
std::vector<double> binomial_row(int n) {
    std::vector<double> row(static_cast<size_t>(n) + 1, 1.0);
    for (int k = 1; k <= n; ++k) row[k] = row[k - 1] * (n - k + 1) / k;
    return row;
}

}  // namespace

RRDesign forced_response_design(double p_yes_given_1, double p_yes_given_0, int m_items) {
    if (!(p_yes_given_1 >= 0.0 && p_yes_given_1 <= 1.0) ||
        !(p_yes_given_0 >= 0.0 && p_yes_given_0 <= 1.0)) {
        throw std::invalid_argument("forced_response_design: probabilities must lie in [0,1]");
    }
    if (!(p_yes_given_0 < p_yes_given_1)) {
        throw std::invalid_argument(
            "forced_response_design: non-identifiable design, requires "
            "p_yes_given_0 < p_yes_given_1");
    }
    if (m_items < 1 || m_items > kMaxItems) {
        throw std::invalid_argument("forced_response_design: m_items must be in [1," +
                                    std::to_string(kMaxItems) + "]");
    }
    return RRDesign{p_yes_given_1, p_yes_given_0, m_items};
}

RRDesign design_from_dice(const std::vector<int>& force_yes,
                          const std::vector<int>& force_no, int m_items) {
    auto mass = [](const std::vector<int>& outcomes) {
        double p = 0.0;
        for (int v : outcomes) {
            if (v < 2 || v > 12)
                throw std::invalid_argument("design_from_dice: dice sum outside [2,12]");
            p += (6.0 - std::abs(v - 7)) / 36.0;
        }
        return p;
    };
    const double p_force_yes = mass(force_yes);
    const double p_force_no = mass(force_no);
    if (p_force_yes + p_force_no > 1.0)
        throw std::invalid_argument("design_from_dice: overlapping forced outcomes");
    // truthful respondents answer their true status
    return forced_response_design(1.0 - p_force_no, p_force_yes, m_items);
}

QMatrix::QMatrix(Eigen::MatrixXd entries, int m_items)
    : entries_(std::move(entries)), m_items_(m_items) {
    const int n = m_items_ + 1;
    if (entries_.rows() != n || entries_.cols() != n)
        throw std::invalid_argument("QMatrix: entries must be (M+1)x(M+1)");
    for (int s = 0; s < n; ++s) {
        double col = 0.0;
        for (int t = 0; t < n; ++t) {
            const double q = entries_(t, s);
            if (!(q >= 0.0 && q <= 1.0 + 1e-15))
                throw std::invalid_argument("QMatrix: entry outside [0,1]");
            col += q;
        }
        if (std::abs(col - 1.0) > 1e-12)
            throw std::invalid_argument("QMatrix: column " + std::to_string(s) +
                                        " does not sum to 1");
    }
}

QMatrix build_q_matrix(const RRDesign& design) {
    const int m = design.m_items;
    const double p11 = design.p_yes_given_1;
    const double p10 = design.p_yes_given_0;
    const double p01 = 1.0 - p11;
    const double p00 = 1.0 - p10;

    std::vector<std::vector<double>> choose(static_cast<size_t>(m) + 1);
    for (int n = 0; n <= m; ++n) choose[n] = binomial_row(n);

    Eigen::MatrixXd q(m + 1, m + 1);
    for (int s = 0; s <= m; ++s) {        // true score
        for (int so = 0; so <= m; ++so) { // observed score
            // j = number of true-present items answered "no"; the remaining
            // so+j-s observed yeses come from the m-s true-absent items.
            double total = 0.0;
            const int j_lo = std::max(0, s - so);
            const int j_hi = std::min(s, m - so);
            for (int j = j_lo; j <= j_hi; ++j) {
                total += choose[s][j] * choose[m - s][so + j - s] *
                         std::pow(p11, s - j) * std::pow(p01, j) *
                         std::pow(p10, so + j - s) * std::pow(p00, m - so - j);
            }
            q(so, s) = total;
        }
    }
    return QMatrix(std::move(q), m);
}

MomEstimate mom_prevalence(long yes_count, long n, const RRDesign& design) {
    if (n < 1) throw std::invalid_argument("mom_prevalence: n must be >= 1");
    if (yes_count < 0 || yes_count > n)
        throw std::invalid_argument("mom_prevalence: yes_count must lie in [0,n]");
    const double p_hat = static_cast<double>(yes_count) / static_cast<double>(n);
    const double raw =
        (p_hat - design.p_yes_given_0) / (design.p_yes_given_1 - design.p_yes_given_0);
    MomEstimate est;
    est.prevalence = std::min(1.0, std::max(0.0, raw));
    est.clamped = (raw < 0.0 || raw > 1.0);
    return est;
}

}  // namespace rrzip
