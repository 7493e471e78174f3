#ifndef RRZIP_DESIGN_HPP
#define RRZIP_DESIGN_HPP

#include <Eigen/Dense>
#include <vector>

namespace rrzip {

// Forced-response design: per-item conditional probabilities of an observed
// "yes" given the true status. p_{0|1} and p_{0|0} are implied complements.
struct RRDesign {
    double p_yes_given_1 = 1.0;  // p_{1|1}
    double p_yes_given_0 = 0.0;  // p_{1|0}
    int m_items = 1;             // M
};

// Validates bounds and identifiability (the two misclassification columns
// must differ). m_items is capped at 30 so binomial coefficients stay exact.
RRDesign forced_response_design(double p_yes_given_1, double p_yes_given_0, int m_items);

// Design derived from the sum of two fair dice: outcomes in force_yes force a
// "yes", outcomes in force_no force a "no", the rest are answered truthfully.
RRDesign design_from_dice(const std::vector<int>& force_yes,
                          const std::vector<int>& force_no, int m_items);

// Sum-score misclassification matrix. Row index = observed score s*, column
// index = true score s; every column is a probability distribution.
class QMatrix {
public:
    QMatrix(Eigen::MatrixXd entries, int m_items);

    double operator()(int s_obs, int s_true) const { return entries_(s_obs, s_true); }
    const Eigen::MatrixXd& entries() const { return entries_; }
    int m_items() const { return m_items_; }

private:
    Eigen::MatrixXd entries_;
    int m_items_;
};

QMatrix build_q_matrix(const RRDesign& design);

struct MomEstimate {
    double prevalence = 0.0;
    bool clamped = false;  // raw estimate fell outside [0,1]
};

// Moment estimator (p_hat* - p_{1|0}) / (p_{1|1} - p_{1|0}), clamped to [0,1].
MomEstimate mom_prevalence(long yes_count, long n, const RRDesign& design);

}  // namespace rrzip

#endif
