#ifndef RRZIP_IO_HPP
#define RRZIP_IO_HPP

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "rrzip/diagnostics.hpp"
#include "rrzip/distributions.hpp"
#include "rrzip/simulation.hpp"

namespace rrzip::io {

struct Dataset {
    std::vector<Observation> observations;
    std::vector<std::string> x_names;  // predictor columns behind obs.x[1..]
    std::vector<std::string> z_names;
    int m_items = 0;

    double total_weight() const;
    std::vector<double> observed_freqs() const;  // length m_items+1
};

// Design config: either the two probabilities, or a dice shorthand
// {"dice": {"force_yes": [...], "force_no": [...]}}; m_items always required.
RRDesign load_design_json(const std::string& path);

// Frequency table: header "sum_score,count".
Dataset load_freq_csv(const std::string& path, const RRDesign& design);

// Individual records: header row; requires a sum_score column or item columns
// y1..yM (0/1, summed); predictor columns referenced by x_cols/z_cols.
Dataset load_individual_csv(const std::string& path, const RRDesign& design,
                            const std::vector<std::string>& x_cols,
                            const std::vector<std::string>& z_cols);

void write_individual_csv(const std::string& path, const Dataset& data);

SimScenario load_scenario_json(const std::string& path);

// JSON array of per-item prevalences, for the approximation check.
std::vector<double> load_probability_list(const std::string& path);

// Weighted standard deviation of each predictor column (for standardized
// effect sizes).
std::map<std::string, double> predictor_sds(const Dataset& data);

// ---- reports ----

nlohmann::ordered_json fit_report_json(const nlohmann::ordered_json& config_echo,
                                       const FitResult& fit, const DiagnosticsReport& diag,
                                       const Dataset& data,
                                       const std::vector<ResidualGrid>& grids = {});
std::string fit_report_text(const FitResult& fit, const DiagnosticsReport& diag,
                            const Dataset& data,
                            const std::vector<ResidualGrid>& grids = {});

nlohmann::ordered_json approx_report_json(const nlohmann::ordered_json& config_echo,
                                          const PoissonApproxReport& report);
std::string approx_report_text(const PoissonApproxReport& report);

nlohmann::ordered_json recovery_report_json(const nlohmann::ordered_json& config_echo,
                                            const RecoverySummary& summary);
std::string recovery_report_text(const RecoverySummary& summary);

void write_residual_csv(const std::string& path, const std::vector<ResidualGrid>& grids);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace rrzip::io

#endif
