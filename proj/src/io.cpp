#include "rrzip/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace rrzip::io {

namespace {

using nlohmann::ordered_json;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

double parse_number(const std::string& cell, const std::string& what, int line_no) {
    size_t consumed = 0;
    double v = 0.0;
    try {
        v = std::stod(cell, &consumed);
    } catch (const std::exception&) {
        consumed = 0;
    }
    if (consumed != cell.size() || cell.empty())
        throw std::runtime_error("line " + std::to_string(line_no) + ": non-numeric " +
                                 what + " '" + cell + "'");
    return v;
}

long parse_count(const std::string& cell, const std::string& what, int line_no) {
    const double v = parse_number(cell, what, line_no);
    if (v != std::floor(v))
        throw std::runtime_error("line " + std::to_string(line_no) + ": " + what +
                                 " must be an integer, got '" + cell + "'");
    return static_cast<long>(v);
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    // drop trailing blank lines
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty()) throw std::runtime_error("EmptyInput: '" + path + "' has no content");
    return lines;
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("'" + path + "': " + e.what());
    }
    return j;
}

int find_column(const std::vector<std::string>& header, const std::string& name) {
    for (size_t j = 0; j < header.size(); ++j)
        if (header[j] == name) return static_cast<int>(j);
    return -1;
}

std::string fmt(double v, int decimals) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(decimals) << v;
    return os.str();
}

ordered_json grid_json(const ResidualGrid& g) {
    ordered_json j;
    j["predictor"] = g.predictor;
    j["cells"] = g.cell_labels;
    ordered_json rows = ordered_json::array();
    for (int c = 0; c < g.observed.rows(); ++c) {
        ordered_json row;
        row["category"] = g.category_labels[c];
        for (int s = 0; s < g.observed.cols(); ++s) {
            row["observed"].push_back(g.observed(c, s));
            row["fitted"].push_back(g.fitted(c, s));
            const double r = g.residuals(c, s);
            if (std::isnan(r))
                row["residuals"].push_back(nullptr);
            else
                row["residuals"].push_back(r);
        }
        rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    return j;
}

}  // namespace

double Dataset::total_weight() const {
    double w = 0.0;
    for (const auto& o : observations) w += o.weight;
    return w;
}

std::vector<double> Dataset::observed_freqs() const {
    std::vector<double> freqs(static_cast<size_t>(m_items) + 1, 0.0);
    for (const auto& o : observations) freqs[o.s_star] += o.weight;
    return freqs;
}

RRDesign load_design_json(const std::string& path) {
    const nlohmann::json j = read_json_file(path);
    if (!j.contains("m_items"))
        throw std::runtime_error("'" + path + "': design requires m_items");
    const int m = j.at("m_items").get<int>();

    if (j.contains("dice")) {
        if (j.contains("p_yes_given_1") || j.contains("p_yes_given_0"))
            throw std::runtime_error("'" + path +
                                     "': give either dice or explicit probabilities, not both");
        const auto& dice = j.at("dice");
        return design_from_dice(dice.at("force_yes").get<std::vector<int>>(),
                                dice.at("force_no").get<std::vector<int>>(), m);
    }
    if (!j.contains("p_yes_given_1") || !j.contains("p_yes_given_0"))
        throw std::runtime_error("'" + path + "': design requires p_yes_given_1/p_yes_given_0");
    return forced_response_design(j.at("p_yes_given_1").get<double>(),
                                  j.at("p_yes_given_0").get<double>(), m);
}

Dataset load_freq_csv(const std::string& path, const RRDesign& design) {
    const auto lines = read_lines(path);
    const auto header = split_csv_line(lines[0]);
    if (header.size() != 2 || header[0] != "sum_score" || header[1] != "count")
        throw std::runtime_error("'" + path + "': expected header 'sum_score,count'");

    Dataset data;
    data.m_items = design.m_items;
    for (size_t i = 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        const int line_no = static_cast<int>(i) + 1;
        const auto cells = split_csv_line(lines[i]);
        if (cells.size() != 2)
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": expected 2 cells, got " + std::to_string(cells.size()));
        const long s = parse_count(cells[0], "sum_score", line_no);
        const long count = parse_count(cells[1], "count", line_no);
        if (s < 0 || s > design.m_items)
            throw std::runtime_error("line " + std::to_string(line_no) + ": sum score " +
                                     std::to_string(s) + " outside {0.." +
                                     std::to_string(design.m_items) + "}");
        if (count < 0)
            throw std::runtime_error("line " + std::to_string(line_no) + ": negative count");
        if (count == 0) continue;
        Observation obs;
        obs.s_star = static_cast<int>(s);
        obs.weight = static_cast<double>(count);
        data.observations.push_back(std::move(obs));
    }
    if (data.observations.empty())
        throw std::runtime_error("EmptyInput: '" + path + "' contains no observations");
    return data;
}

Dataset load_individual_csv(const std::string& path, const RRDesign& design,
                            const std::vector<std::string>& x_cols,
                            const std::vector<std::string>& z_cols) {
    const auto lines = read_lines(path);
    const auto header = split_csv_line(lines[0]);
    const int m = design.m_items;

    const int score_col = find_column(header, "sum_score");
    std::vector<int> item_cols;
    if (score_col < 0) {
        for (int k = 1; k <= m; ++k) {
            const int c = find_column(header, "y" + std::to_string(k));
            if (c < 0)
                throw std::runtime_error("'" + path +
                                         "': need a sum_score column or item columns y1..y" +
                                         std::to_string(m));
            item_cols.push_back(c);
        }
    }

    auto locate = [&](const std::vector<std::string>& cols, const char* role) {
        std::vector<int> idx;
        for (const auto& name : cols) {
            const int c = find_column(header, name);
            if (c < 0)
                throw std::runtime_error("'" + path + "': unknown " + role + " column '" +
                                         name + "'");
            idx.push_back(c);
        }
        return idx;
    };
    const std::vector<int> x_idx = locate(x_cols, "x");
    const std::vector<int> z_idx = locate(z_cols, "z");

    Dataset data;
    data.m_items = m;
    data.x_names = x_cols;
    data.z_names = z_cols;

    for (size_t i = 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        const int line_no = static_cast<int>(i) + 1;
        const auto cells = split_csv_line(lines[i]);
        if (cells.size() != header.size())
            throw std::runtime_error("line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(header.size()) + " cells, got " +
                                     std::to_string(cells.size()));
        Observation obs;
        if (score_col >= 0) {
            const long s = parse_count(cells[score_col], "sum_score", line_no);
            if (s < 0 || s > m)
                throw std::runtime_error("line " + std::to_string(line_no) + ": sum score " +
                                         std::to_string(s) + " outside {0.." +
                                         std::to_string(m) + "}");
            obs.s_star = static_cast<int>(s);
        } else {
            int s = 0;
            for (int c : item_cols) {
                const long y = parse_count(cells[c], "item response", line_no);
                if (y != 0 && y != 1)
                    throw std::runtime_error("line " + std::to_string(line_no) +
                                             ": item responses must be 0/1");
                s += static_cast<int>(y);
            }
            obs.s_star = s;
        }
        obs.x.resize(1 + x_idx.size());
        obs.x[0] = 1.0;
        for (size_t j = 0; j < x_idx.size(); ++j)
            obs.x[j + 1] = parse_number(cells[x_idx[j]], "predictor " + x_cols[j], line_no);
        obs.z.resize(1 + z_idx.size());
        obs.z[0] = 1.0;
        for (size_t j = 0; j < z_idx.size(); ++j)
            obs.z[j + 1] = parse_number(cells[z_idx[j]], "predictor " + z_cols[j], line_no);
        obs.weight = 1.0;
        data.observations.push_back(std::move(obs));
    }
    if (data.observations.empty())
        throw std::runtime_error("EmptyInput: '" + path + "' contains no observations");
    return data;
}

void write_individual_csv(const std::string& path, const Dataset& data) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "sum_score";
    for (const auto& n : data.x_names) out << "," << n;
    for (const auto& n : data.z_names) out << "," << n;
    out << "\n";
    out << std::setprecision(17);
    for (const auto& o : data.observations) {
        out << o.s_star;
        for (int j = 1; j < o.x.size(); ++j) out << "," << o.x[j];
        for (int j = 1; j < o.z.size(); ++j) out << "," << o.z[j];
        out << "\n";
    }
}

SimScenario load_scenario_json(const std::string& path) {
    const nlohmann::json j = read_json_file(path);
    SimScenario sc;
    const auto& d = j.at("design");
    sc.design = forced_response_design(d.at("p_yes_given_1").get<double>(),
                                       d.at("p_yes_given_0").get<double>(),
                                       d.at("m_items").get<int>());
    sc.n = j.at("n").get<int>();
    const auto beta = j.at("beta").get<std::vector<double>>();
    const auto gamma = j.at("gamma").get<std::vector<double>>();
    sc.beta = Eigen::Map<const Eigen::VectorXd>(beta.data(), beta.size());
    sc.gamma = Eigen::Map<const Eigen::VectorXd>(gamma.data(), gamma.size());
    for (const auto& p : j.at("predictors")) {
        PredictorGen gen;
        gen.name = p.at("name").get<std::string>();
        const std::string kind = p.at("kind").get<std::string>();
        if (kind == "constant") {
            gen.kind = PredictorGen::Kind::Constant;
            gen.value = p.at("value").get<double>();
        } else if (kind == "dummy") {
            gen.kind = PredictorGen::Kind::Dummy;
            gen.prevalence = p.at("prevalence").get<double>();
        } else if (kind == "scale") {
            gen.kind = PredictorGen::Kind::Scale;
            gen.levels = p.at("levels").get<std::vector<double>>();
            gen.level_probs = p.at("probs").get<std::vector<double>>();
        } else {
            throw std::runtime_error("'" + path + "': unknown predictor kind '" + kind + "'");
        }
        sc.predictors.push_back(std::move(gen));
    }
    sc.x_names = j.at("x").get<std::vector<std::string>>();
    sc.z_names = j.at("z").get<std::vector<std::string>>();
    sc.seed = j.value("seed", 0ULL);
    const std::string mode = j.value("mode", "per_item");
    if (mode == "per_item")
        sc.mode = GenerationMode::PerItem;
    else if (mode == "q_matrix")
        sc.mode = GenerationMode::QMatrixDraw;
    else
        throw std::runtime_error("'" + path + "': unknown mode '" + mode + "'");
    sc.validate();
    return sc;
}

std::vector<double> load_probability_list(const std::string& path) {
    const nlohmann::json j = read_json_file(path);
    if (!j.is_array())
        throw std::runtime_error("'" + path + "': expected a JSON array of probabilities");
    return j.get<std::vector<double>>();
}

std::map<std::string, double> predictor_sds(const Dataset& data) {
    std::map<std::string, double> sds;
    auto column_sd = [&](bool in_x, int col) {
        double w = 0.0, mean = 0.0;
        for (const auto& o : data.observations) {
            const double v = (in_x ? o.x : o.z)[col];
            w += o.weight;
            mean += o.weight * v;
        }
        mean /= w;
        double ss = 0.0;
        for (const auto& o : data.observations) {
            const double v = (in_x ? o.x : o.z)[col];
            ss += o.weight * (v - mean) * (v - mean);
        }
        return w > 1.0 ? std::sqrt(ss / (w - 1.0)) : 0.0;
    };
    for (size_t j = 0; j < data.x_names.size(); ++j)
        sds[data.x_names[j]] = column_sd(true, static_cast<int>(j) + 1);
    for (size_t j = 0; j < data.z_names.size(); ++j)
        if (!sds.count(data.z_names[j]))
            sds[data.z_names[j]] = column_sd(false, static_cast<int>(j) + 1);
    return sds;
}

// ---- reports ----

nlohmann::ordered_json fit_report_json(const ordered_json& config_echo, const FitResult& fit,
                                       const DiagnosticsReport& diag, const Dataset& data,
                                       const std::vector<ResidualGrid>& grids) {
    ordered_json j;
    j["schema_version"] = 1;
    j["config"] = config_echo;
    j["model"] = to_string(fit.spec.kind);
    j["design"] = {{"p_yes_given_1", fit.spec.design.p_yes_given_1},
                   {"p_yes_given_0", fit.spec.design.p_yes_given_0},
                   {"m_items", fit.spec.design.m_items}};
    j["data"] = {{"n", fit.n}, {"observed_freqs", data.observed_freqs()}};

    ordered_json params = ordered_json::array();
    const auto names = fit.spec.param_names();
    for (int p = 0; p < fit.params.size(); ++p) {
        ordered_json row;
        row["name"] = names[p];
        row["estimate"] = fit.params[p];
        row["std_error"] = std::isfinite(fit.std_errors[p]) ? ordered_json(fit.std_errors[p])
                                                            : ordered_json(nullptr);
        row["se_flagged"] = static_cast<bool>(fit.se_flagged[p]);
        params.push_back(std::move(row));
    }
    const char* status = fit.status == FitStatus::Converged        ? "converged"
                         : fit.status == FitStatus::SingularHessian ? "singular_hessian"
                                                                     : "non_convergence";
    j["fit"] = {{"converged", fit.converged},
                {"status", status},
                {"loglik", fit.loglik},
                {"k_free", fit.k_free},
                {"n_starts_used", fit.n_starts_used},
                {"iterations", fit.iterations},
                {"grad_max_norm", fit.grad_max_norm},
                {"parameters", params}};

    // link-transformed views of the estimates
    if (fit.spec.kind == ModelKind::PoissonRR || fit.spec.kind == ModelKind::ZipNull) {
        j["fit"]["lambda"] = std::exp(fit.params[0]);
        if (fit.spec.kind == ModelKind::ZipNull)
            j["fit"]["theta"] = 1.0 / (1.0 + std::exp(-fit.params[1]));
    } else if (fit.spec.kind == ModelKind::MultinomialRR) {
        const Eigen::VectorXd pi = multinomial_probs(fit.params);
        j["fit"]["pi"] = std::vector<double>(pi.data(), pi.data() + pi.size());
    }

    ordered_json dj;
    dj["aic"] = diag.aic;
    dj["bic"] = diag.bic;
    if (diag.pearson) {
        dj["pearson_x2"] = diag.pearson->x2;
        dj["df"] = diag.pearson->df;
        dj["df_table2_compat"] = diag.pearson->df_table2_compat;
        dj["x2_cell_contributions"] = diag.pearson->cell_contributions;
    }
    dj["fitted_freqs"] = diag.fitted_freqs;
    if (diag.theta_star_hat) dj["theta_star_hat"] = *diag.theta_star_hat;
    if (!diag.effects.empty()) {
        ordered_json effects = ordered_json::array();
        for (const auto& e : diag.effects) {
            ordered_json row;
            row["name"] = e.name;
            row["estimate"] = e.estimate;
            row["std_error"] = e.std_error;
            row["t_value"] = e.t_value;
            if (e.exp_estimate) row["exp_estimate"] = *e.exp_estimate;
            if (e.exp_standardized) row["exp_standardized"] = *e.exp_standardized;
            effects.push_back(std::move(row));
        }
        dj["effect_sizes"] = std::move(effects);
    }
    if (!diag.notes.empty()) dj["notes"] = diag.notes;
    j["diagnostics"] = std::move(dj);

    if (!grids.empty()) {
        ordered_json gj = ordered_json::array();
        for (const auto& g : grids) gj.push_back(grid_json(g));
        j["residual_grids"] = std::move(gj);
    }
    return j;
}

std::string fit_report_text(const FitResult& fit, const DiagnosticsReport& diag,
                            const Dataset& data, const std::vector<ResidualGrid>& grids) {
    std::ostringstream os;
    os << "model: " << to_string(fit.spec.kind) << "\n";
    os << "n = " << fmt(fit.n, 0) << ", k = " << fit.k_free << "\n";
    os << "status: "
       << (fit.status == FitStatus::Converged        ? "converged"
           : fit.status == FitStatus::SingularHessian ? "converged (singular Hessian)"
                                                       : "NOT CONVERGED")
       << " after " << fit.iterations << " iterations, " << fit.n_starts_used
       << " start(s)\n\n";

    os << "loglik = " << fmt(fit.loglik, 1) << "\n";
    os << "AIC    = " << fmt(diag.aic, 1) << "\n";
    os << "BIC    = " << fmt(diag.bic, 1) << "\n";
    if (diag.pearson) {
        os << "X2     = " << fmt(diag.pearson->x2, 1) << " (df = " << diag.pearson->df
           << ", Table-2-style df = " << diag.pearson->df_table2_compat << ")\n";
    }
    os << "\nparameters:\n";
    const auto names = fit.spec.param_names();
    for (int p = 0; p < fit.params.size(); ++p) {
        os << "  " << std::left << std::setw(24) << names[p] << std::right << std::setw(10)
           << fmt(fit.params[p], 4);
        if (std::isfinite(fit.std_errors[p]))
            os << "  (se " << fmt(fit.std_errors[p], 4) << ")";
        if (fit.se_flagged[p]) os << "  [flagged]";
        os << "\n";
    }

    if (fit.spec.kind == ModelKind::MultinomialRR) {
        const Eigen::VectorXd pi = multinomial_probs(fit.params);
        os << "\npi-hat:";
        // estimates below 5e-4 print as 0.000 (boundary convention)
        for (int s = 0; s < pi.size(); ++s) os << " " << fmt(pi[s] < 5e-4 ? 0.0 : pi[s], 3);
        os << "\n";
    } else if (fit.spec.kind == ModelKind::PoissonRR) {
        os << "\nlambda-hat = " << fmt(std::exp(fit.params[0]), 3) << "\n";
    } else if (fit.spec.kind == ModelKind::ZipNull) {
        os << "\nlambda-hat = " << fmt(std::exp(fit.params[0]), 3)
           << ", theta-hat = " << fmt(1.0 / (1.0 + std::exp(-fit.params[1])), 3) << "\n";
    }
    if (diag.theta_star_hat) os << "theta*-hat = " << fmt(*diag.theta_star_hat, 3) << "\n";

    os << "\nobserved freqs:";
    for (double f : data.observed_freqs()) os << " " << fmt(f, 0);
    os << "\nfitted freqs:  ";
    for (double f : diag.fitted_freqs) os << " " << fmt(f, 1);
    os << "\n";

    if (!diag.effects.empty()) {
        os << "\neffect sizes:\n";
        os << "  " << std::left << std::setw(28) << "coefficient" << std::right
           << std::setw(9) << "est" << std::setw(9) << "se" << std::setw(8) << "t"
           << std::setw(9) << "exp" << std::setw(10) << "exp^sd" << "\n";
        for (const auto& e : diag.effects) {
            os << "  " << std::left << std::setw(28) << e.name << std::right << std::setw(9)
               << fmt(e.estimate, 2) << std::setw(9) << fmt(e.std_error, 2) << std::setw(8)
               << fmt(e.t_value, 2);
            os << std::setw(9) << (e.exp_estimate ? fmt(*e.exp_estimate, 2) : "-");
            os << std::setw(10) << (e.exp_standardized ? fmt(*e.exp_standardized, 2) : "-");
            os << "\n";
        }
    }

    for (const auto& g : grids) {
        os << "\nPearson residuals by " << g.predictor << " (columns:";
        for (const auto& c : g.cell_labels) os << " " << c;
        os << ")\n";
        for (int c = 0; c < g.residuals.rows(); ++c) {
            os << "  " << std::left << std::setw(14) << g.category_labels[c] << std::right;
            for (int s = 0; s < g.residuals.cols(); ++s)
                os << std::setw(8)
                   << (std::isnan(g.residuals(c, s)) ? std::string("-")
                                                     : fmt(g.residuals(c, s), 2));
            os << "\n";
        }
    }

    if (!diag.notes.empty()) {
        os << "\nnotes:\n";
        for (const auto& n : diag.notes) os << "  - " << n << "\n";
    }
    return os.str();
}

nlohmann::ordered_json approx_report_json(const ordered_json& config_echo,
                                          const PoissonApproxReport& report) {
    ordered_json j;
    j["schema_version"] = 1;
    j["config"] = config_echo;
    j["lambda"] = report.lambda;
    j["exact_pmf"] = report.exact_pmf;
    j["poisson_pmf"] = report.poisson_pmf;
    j["abs_dev"] = report.abs_dev;
    ordered_json rel = ordered_json::array();
    for (double v : report.rel_dev)
        rel.push_back(std::isnan(v) ? ordered_json(nullptr) : ordered_json(v));
    j["rel_dev"] = std::move(rel);
    j["max_abs_dev"] = report.max_abs_dev;
    j["max_abs_dev_count"] = report.max_abs_dev_count;
    return j;
}

std::string approx_report_text(const PoissonApproxReport& report) {
    std::ostringstream os;
    os << "lambda = " << fmt(report.lambda, 4) << "\n\n";
    os << std::left << std::setw(22) << "count" << std::right;
    for (size_t s = 0; s < report.exact_pmf.size(); ++s) os << std::setw(9) << s;
    os << "\n" << std::left << std::setw(22) << "exact distribution" << std::right;
    for (double v : report.exact_pmf) os << std::setw(9) << fmt(v, 4);
    os << "\n" << std::left << std::setw(22) << "Poisson approximation" << std::right;
    for (double v : report.poisson_pmf) os << std::setw(9) << fmt(v, 4);
    os << "\n" << std::left << std::setw(22) << "absolute deviation" << std::right;
    for (double v : report.abs_dev) os << std::setw(9) << fmt(v, 4);
    os << "\n\nmax absolute deviation " << fmt(report.max_abs_dev, 4) << " at count "
       << report.max_abs_dev_count << "\n";
    return os.str();
}

nlohmann::ordered_json recovery_report_json(const ordered_json& config_echo,
                                            const RecoverySummary& summary) {
    ordered_json j;
    j["schema_version"] = 1;
    j["config"] = config_echo;
    j["n_replicates"] = summary.n_replicates;
    j["n_converged"] = summary.n_converged;
    ordered_json rows = ordered_json::array();
    for (const auto& c : summary.coefficients) {
        ordered_json row;
        row["name"] = c.name;
        row["truth"] = c.truth;
        row["mean_estimate"] = c.mean_estimate;
        row["bias"] = c.bias;
        row["rmse"] = c.rmse;
        row["coverage"] = c.coverage;
        row["sign_recovery"] =
            std::isnan(c.sign_recovery) ? ordered_json(nullptr) : ordered_json(c.sign_recovery);
        rows.push_back(std::move(row));
    }
    j["coefficients"] = std::move(rows);
    return j;
}

std::string recovery_report_text(const RecoverySummary& summary) {
    std::ostringstream os;
    os << "replicates: " << summary.n_replicates << " (" << summary.n_converged
       << " converged)\n\n";
    os << std::left << std::setw(28) << "coefficient" << std::right << std::setw(9) << "truth"
       << std::setw(9) << "mean" << std::setw(9) << "bias" << std::setw(9) << "rmse"
       << std::setw(10) << "coverage" << std::setw(8) << "sign" << "\n";
    for (const auto& c : summary.coefficients) {
        os << std::left << std::setw(28) << c.name << std::right << std::setw(9)
           << fmt(c.truth, 3) << std::setw(9) << fmt(c.mean_estimate, 3) << std::setw(9)
           << fmt(c.bias, 3) << std::setw(9) << fmt(c.rmse, 3) << std::setw(10)
           << fmt(c.coverage, 3) << std::setw(8)
           << (std::isnan(c.sign_recovery) ? std::string("-") : fmt(c.sign_recovery, 3))
           << "\n";
    }
    return os.str();
}

void write_residual_csv(const std::string& path, const std::vector<ResidualGrid>& grids) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "predictor,category,cell,observed,fitted,residual\n";
    out << std::setprecision(17);
    for (const auto& g : grids)
        for (int c = 0; c < g.observed.rows(); ++c)
            for (int s = 0; s < g.observed.cols(); ++s)
                out << g.predictor << "," << g.category_labels[c] << "," << g.cell_labels[s]
                    << "," << g.observed(c, s) << "," << g.fitted(c, s) << ","
                    << g.residuals(c, s) << "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
}

}  // namespace rrzip::io
