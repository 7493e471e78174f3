#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "rrzip/io.hpp"

namespace {

using nlohmann::ordered_json;

struct CommonArgs {
    std::string design_path;
    std::string data_path;
    std::string format = "freq";
    std::string model = "zip-null";
    std::vector<std::string> x_cols, z_cols;
    std::string out_path;
    bool json_stdout = false;
    // estimation flags
    double tol_grad = 1e-8;
    double rel_step = 1e-6;
    int max_iter = 500;
    int max_starts = 10;
    std::uint64_t seed = 0;
};

void add_common_flags(CLI::App* cmd, CommonArgs& a, bool with_model) {
    cmd->add_option("--design", a.design_path, "design config JSON")->required();
    cmd->add_option("--data", a.data_path, "input CSV")->required();
    cmd->add_option("--format", a.format, "data format")
        ->check(CLI::IsMember({"freq", "individual", "items"}));
    if (with_model) {
        cmd->add_option("--model", a.model, "model kind")
            ->check(CLI::IsMember({"multinomial", "poisson", "zip-null", "zip-reg"}));
        cmd->add_option("--x", a.x_cols, "lambda predictor columns")->delimiter(',');
        cmd->add_option("--z", a.z_cols, "SP predictor columns")->delimiter(',');
    }
    cmd->add_option("--out", a.out_path, "output path prefix (.json/.txt)");
    cmd->add_flag("--json", a.json_stdout, "print the JSON report to stdout");
    cmd->add_option("--tol-grad", a.tol_grad, "gradient max-norm tolerance");
    cmd->add_option("--rel-step", a.rel_step, "relative finite-difference step");
    cmd->add_option("--max-iter", a.max_iter, "BFGS iteration budget");
    cmd->add_option("--max-starts", a.max_starts, "perturbed-start budget");
    cmd->add_option("--seed", a.seed, "seed for start perturbations");
}

std::uint64_t resolve_seed(std::uint64_t from_config) {
    if (const char* env = std::getenv("RRZIP_SEED")) return std::strtoull(env, nullptr, 10);
    return from_config;
}

rrzip::ModelKind parse_model(const std::string& name) {
    if (name == "multinomial") return rrzip::ModelKind::MultinomialRR;
    if (name == "poisson") return rrzip::ModelKind::PoissonRR;
    if (name == "zip-null") return rrzip::ModelKind::ZipNull;
    return rrzip::ModelKind::ZipRegression;
}

rrzip::io::Dataset load_data(const CommonArgs& a, const rrzip::RRDesign& design) {
    if (a.format == "freq") {
        if (!a.x_cols.empty() || !a.z_cols.empty())
            throw std::runtime_error("predictor columns require --format individual");
        return rrzip::io::load_freq_csv(a.data_path, design);
    }
    return rrzip::io::load_individual_csv(a.data_path, design, a.x_cols, a.z_cols);
}

ordered_json config_echo(const std::string& command, const CommonArgs& a,
                         std::uint64_t seed) {
    ordered_json j;
    j["command"] = command;
    j["design"] = a.design_path;
    j["data"] = a.data_path;
    j["format"] = a.format;
    j["model"] = a.model;
    j["x"] = a.x_cols;
    j["z"] = a.z_cols;
    j["tol_grad"] = a.tol_grad;
    j["rel_step"] = a.rel_step;
    j["max_iter"] = a.max_iter;
    j["max_starts"] = a.max_starts;
    j["seed"] = seed;
    if (!a.out_path.empty()) j["out"] = a.out_path;
    return j;
}

void emit(const CommonArgs& a, const ordered_json& json_report, const std::string& text) {
    if (!a.out_path.empty()) {
        rrzip::io::write_text_file(a.out_path + ".json", json_report.dump(2) + "\n");
        rrzip::io::write_text_file(a.out_path + ".txt", text);
    }
    if (a.json_stdout)
        std::cout << json_report.dump(2) << "\n";
    else if (a.out_path.empty())
        std::cout << text;
}

int run_fit(const std::string& command, const CommonArgs& a,
            const std::vector<std::string>& residual_predictors,
            const std::vector<int>& collapse_cells, int bins, bool allow_empty,
            const std::string& residual_csv) {
    const rrzip::RRDesign design = rrzip::io::load_design_json(a.design_path);
    const rrzip::io::Dataset data = load_data(a, design);

    rrzip::ModelSpec spec;
    spec.kind = parse_model(a.model);
    spec.design = design;
    if (spec.kind == rrzip::ModelKind::ZipRegression) {
        spec.lambda_predictors = data.x_names;
        spec.sp_predictors = data.z_names;
    } else if (!a.x_cols.empty() || !a.z_cols.empty()) {
        throw std::runtime_error("model '" + a.model + "' does not accept predictors");
    }

    rrzip::FitOptions opts;
    opts.tol_grad = a.tol_grad;
    opts.rel_step_grad = a.rel_step;
    opts.max_iter = a.max_iter;
    opts.max_starts = a.max_starts;
    opts.seed = resolve_seed(a.seed);

    const rrzip::QMatrix q = rrzip::build_q_matrix(design);
    const rrzip::FitResult fit = rrzip::fit(spec, data.observations, q, opts);
    const auto sds = rrzip::io::predictor_sds(data);
    const rrzip::DiagnosticsReport diag = rrzip::diagnose(fit, data.observations, sds);

    std::vector<rrzip::ResidualGrid> grids;
    for (const std::string& pred : residual_predictors) {
        // discrete predictors spread as-is; quantile cuts for many-valued ones
        std::vector<double> values;
        for (const auto& o : data.observations) {
            bool in_x = false;
            int col = -1;
            for (size_t jx = 0; jx < data.x_names.size(); ++jx)
                if (data.x_names[jx] == pred) { in_x = true; col = static_cast<int>(jx) + 1; }
            if (col < 0)
                for (size_t jz = 0; jz < data.z_names.size(); ++jz)
                    if (data.z_names[jz] == pred) col = static_cast<int>(jz) + 1;
            if (col < 0) throw std::runtime_error("unknown predictor column '" + pred + "'");
            values.push_back((in_x ? o.x : o.z)[col]);
        }
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        std::vector<double> cuts;
        if (static_cast<int>(values.size()) > bins) {
            // interior quantile cut points
            std::vector<double> sorted;
            for (const auto& o : data.observations) {
                for (size_t jx = 0; jx < data.x_names.size(); ++jx)
                    if (data.x_names[jx] == pred) sorted.push_back(o.x[jx + 1]);
                for (size_t jz = 0; jz < data.z_names.size(); ++jz)
                    if (data.z_names[jz] == pred) sorted.push_back(o.z[jz + 1]);
            }
            std::sort(sorted.begin(), sorted.end());
            for (int b = 1; b < bins; ++b)
                cuts.push_back(sorted[sorted.size() * b / bins]);
            cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        }
        grids.push_back(rrzip::residuals_by_predictor(fit, data.observations, data.x_names,
                                                      data.z_names, pred, collapse_cells,
                                                      cuts, allow_empty));
    }
    if (!residual_csv.empty()) rrzip::io::write_residual_csv(residual_csv, grids);

    const ordered_json report = rrzip::io::fit_report_json(
        config_echo(command, a, opts.seed), fit, diag, data, grids);
    emit(a, report, rrzip::io::fit_report_text(fit, diag, data, grids));
    return fit.converged ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"zero-inflated Poisson randomized-response model fitting"};
    app.require_subcommand(1);

    CommonArgs fit_args;
    CLI::App* fit_cmd = app.add_subcommand("fit", "fit a model and report diagnostics");
    add_common_flags(fit_cmd, fit_args, true);

    CommonArgs diag_args;
    std::vector<std::string> residual_predictors;
    std::vector<int> collapse_cells;
    int bins = 5;
    bool allow_empty = false;
    std::string residual_csv;
    CLI::App* diag_cmd =
        app.add_subcommand("diagnose", "fit plus per-predictor residual grids");
    add_common_flags(diag_cmd, diag_args, true);
    diag_cmd->add_option("--residuals-by", residual_predictors,
                         "predictor columns for residual grids")
        ->delimiter(',');
    diag_cmd->add_option("--collapse", collapse_cells, "sum-score cells to merge")
        ->delimiter(',');
    diag_cmd->add_option("--bins", bins, "quantile bins for continuous predictors");
    diag_cmd->add_flag("--allow-empty-cells", allow_empty,
                       "emit NaN residuals instead of failing on empty cells");
    diag_cmd->add_option("--residual-csv", residual_csv, "dump residual grids to CSV");

    std::string scenario_path, sim_out, sim_mode;
    int replicates = 0;
    int threads = 0;
    bool sim_json = false;
    std::uint64_t sim_seed = 0;
    bool sim_seed_set = false;
    CommonArgs sim_est;  // estimation flags reused for replicate fits
    CLI::App* sim_cmd = app.add_subcommand(
        "simulate", "generate synthetic data or run a parameter-recovery study");
    sim_cmd->add_option("--scenario", scenario_path, "scenario JSON")->required();
    sim_cmd->add_option("--replicates", replicates, "recovery-study replicates (0: emit one dataset)");
    sim_cmd->add_option("--threads", threads, "worker threads (0: hardware)");
    sim_cmd->add_option("--mode", sim_mode, "override generation mode")
        ->check(CLI::IsMember({"per_item", "q_matrix"}));
    sim_cmd->add_option("--out", sim_out, "output path prefix");
    sim_cmd->add_flag("--json", sim_json, "print the JSON report to stdout");
    sim_cmd->add_option("--seed", sim_seed, "override scenario seed")
        ->each([&](const std::string&) { sim_seed_set = true; });
    sim_cmd->add_option("--tol-grad", sim_est.tol_grad, "gradient tolerance");
    sim_cmd->add_option("--rel-step", sim_est.rel_step, "finite-difference step");
    sim_cmd->add_option("--max-iter", sim_est.max_iter, "BFGS iteration budget");
    sim_cmd->add_option("--max-starts", sim_est.max_starts, "perturbed-start budget");

    std::string items_path, probs_inline, approx_out;
    bool approx_json = false;
    CLI::App* approx_cmd = app.add_subcommand(
        "approx-check", "exact Bernoulli-sum distribution vs Poisson approximation");
    approx_cmd->add_option("--items", items_path, "JSON array of item prevalences");
    approx_cmd->add_option("--probs", probs_inline, "comma-separated prevalences");
    approx_cmd->add_option("--out", approx_out, "output path prefix");
    approx_cmd->add_flag("--json", approx_json, "print the JSON report to stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (fit_cmd->parsed()) return run_fit("fit", fit_args, {}, {}, 5, false, "");
        if (diag_cmd->parsed())
            return run_fit("diagnose", diag_args, residual_predictors, collapse_cells, bins,
                           allow_empty, residual_csv);

        if (sim_cmd->parsed()) {
            rrzip::SimScenario scenario = rrzip::io::load_scenario_json(scenario_path);
            if (sim_seed_set) scenario.seed = sim_seed;
            scenario.seed = resolve_seed(scenario.seed);
            if (sim_mode == "per_item") scenario.mode = rrzip::GenerationMode::PerItem;
            if (sim_mode == "q_matrix") scenario.mode = rrzip::GenerationMode::QMatrixDraw;

            ordered_json echo;
            echo["command"] = "simulate";
            echo["scenario"] = scenario_path;
            echo["replicates"] = replicates;
            echo["seed"] = scenario.seed;
            echo["mode"] = scenario.mode == rrzip::GenerationMode::PerItem ? "per_item"
                                                                           : "q_matrix";

            if (replicates <= 0) {
                if (sim_out.empty())
                    throw std::runtime_error("simulate with --replicates 0 requires --out");
                const rrzip::SimData sim = rrzip::generate(scenario);
                rrzip::io::Dataset data;
                data.observations = sim.observations;
                data.x_names = scenario.x_names;
                data.z_names = scenario.z_names;
                data.m_items = scenario.design.m_items;
                rrzip::io::write_individual_csv(sim_out + ".csv", data);

                ordered_json truth;
                truth["schema_version"] = 1;
                truth["config"] = echo;
                truth["beta"] = std::vector<double>(sim.truth.beta.data(),
                                                    sim.truth.beta.data() + sim.truth.beta.size());
                truth["gamma"] = std::vector<double>(
                    sim.truth.gamma.data(), sim.truth.gamma.data() + sim.truth.gamma.size());
                truth["true_score"] = sim.truth.true_score;
                truth["sp"] = sim.truth.sp;
                rrzip::io::write_text_file(sim_out + "_truth.json", truth.dump(2) + "\n");
                std::cout << "wrote " << sim_out << ".csv (" << sim.observations.size()
                          << " rows)\n";
                return 0;
            }

            rrzip::FitOptions opts;
            opts.tol_grad = sim_est.tol_grad;
            opts.rel_step_grad = sim_est.rel_step;
            opts.max_iter = sim_est.max_iter;
            opts.max_starts = sim_est.max_starts;
            const rrzip::RecoverySummary summary =
                rrzip::recovery_study(scenario, replicates, opts, threads);
            const ordered_json report = rrzip::io::recovery_report_json(echo, summary);
            const std::string text = rrzip::io::recovery_report_text(summary);
            if (!sim_out.empty()) {
                rrzip::io::write_text_file(sim_out + ".json", report.dump(2) + "\n");
                rrzip::io::write_text_file(sim_out + ".txt", text);
            }
            if (sim_json)
                std::cout << report.dump(2) << "\n";
            else if (sim_out.empty())
                std::cout << text;
            return summary.n_converged == summary.n_replicates ? 0 : 2;
        }

        if (approx_cmd->parsed()) {
            std::vector<double> probs;
            if (!items_path.empty()) {
                probs = rrzip::io::load_probability_list(items_path);
            } else if (!probs_inline.empty()) {
                std::stringstream ss(probs_inline);
                std::string cell;
                while (std::getline(ss, cell, ',')) probs.push_back(std::stod(cell));
            } else {
                throw std::runtime_error("approx-check requires --items or --probs");
            }
            const rrzip::PoissonApproxReport report = rrzip::poisson_approx_report(probs);
            ordered_json echo;
            echo["command"] = "approx-check";
            echo["items"] = items_path.empty() ? probs_inline : items_path;
            const ordered_json json_report = rrzip::io::approx_report_json(echo, report);
            const std::string text = rrzip::io::approx_report_text(report);
            if (!approx_out.empty()) {
                rrzip::io::write_text_file(approx_out + ".json", json_report.dump(2) + "\n");
                rrzip::io::write_text_file(approx_out + ".txt", text);
            }
            if (approx_json)
                std::cout << json_report.dump(2) << "\n";
            else if (approx_out.empty())
                std::cout << text;
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
