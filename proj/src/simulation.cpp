#include "rrzip/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace rrzip {

double RandomStream::uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

int RandomStream::categorical(std::span<const double> probs) {
    const double u = uniform01();
    double acc = 0.0;
    for (size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;  // guard against rounding
}

int RandomStream::uniform_int(int n) {
    // rejection sampling keeps the draw exactly uniform
    const std::uint64_t bound = n;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() / bound * bound;
    std::uint64_t v;
    do { v = engine_(); } while (v >= limit);
    return static_cast<int>(v % bound);
}

std::uint64_t RandomStream::substream_seed(std::uint64_t master, std::uint64_t r) {
    // SplitMix64 finalizer over master + r * golden gamma
    std::uint64_t z = master + (r + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

void SimScenario::validate() const {
    if (n < 0) throw std::invalid_argument("SimScenario: n must be >= 0");
    auto find = [&](const std::string& name) {
        for (const auto& g : predictors)
            if (g.name == name) return true;
        return false;
    };
    for (const auto& nm : x_names)
        if (!find(nm)) throw std::invalid_argument("SimScenario: unknown x predictor " + nm);
    for (const auto& nm : z_names)
        if (!find(nm)) throw std::invalid_argument("SimScenario: unknown z predictor " + nm);
    if (beta.size() != 1 + static_cast<Eigen::Index>(x_names.size()))
        throw std::invalid_argument("SimScenario: beta length must be 1 + |x_names|");
    if (gamma.size() != 1 + static_cast<Eigen::Index>(z_names.size()))
        throw std::invalid_argument("SimScenario: gamma length must be 1 + |z_names|");
    for (const auto& g : predictors) {
        if (g.kind == PredictorGen::Kind::Scale) {
            if (g.levels.empty() || g.levels.size() != g.level_probs.size())
                throw std::invalid_argument("SimScenario: scale predictor '" + g.name +
                                            "' needs matching levels/probabilities");
            const double total =
                std::accumulate(g.level_probs.begin(), g.level_probs.end(), 0.0);
            if (std::abs(total - 1.0) > 1e-9)
                throw std::invalid_argument("SimScenario: probabilities for '" + g.name +
                                            "' do not sum to 1");
        }
        if (g.kind == PredictorGen::Kind::Dummy &&
            !(g.prevalence >= 0.0 && g.prevalence <= 1.0))
            throw std::invalid_argument("SimScenario: dummy prevalence outside [0,1]");
    }
}

ModelSpec SimScenario::model_spec() const {
    ModelSpec spec;
    spec.kind = ModelKind::ZipRegression;
    spec.design = design;
    spec.lambda_predictors = x_names;
    spec.sp_predictors = z_names;
    return spec;
}

namespace {

double draw_predictor(const PredictorGen& gen, RandomStream& rng) {
    switch (gen.kind) {
        case PredictorGen::Kind::Constant: return gen.value;
        case PredictorGen::Kind::Dummy: return rng.bernoulli(gen.prevalence) ? 1.0 : 0.0;
        case PredictorGen::Kind::Scale: return gen.levels[rng.categorical(gen.level_probs)];
    }
    throw std::logic_error("draw_predictor: unknown kind");
}

int draw_truncated_poisson(double lambda, int m, RandomStream& rng) {
    // inverse CDF over the finite support
    double probs[64];
    double total = probs[0] = 1.0;
    for (int s = 1; s <= m; ++s) total += probs[s] = probs[s - 1] * lambda / s;
    const double u = rng.uniform01() * total;
    double acc = 0.0;
    for (int s = 0; s <= m; ++s) {
        acc += probs[s];
        if (u < acc) return s;
    }
    return m;
}

// observed sum after per-item misclassification: the item pattern is drawn
// uniformly over patterns with the given sum, then each item flips on its own
int misclassify_per_item(int true_score, const RRDesign& d, RandomStream& rng) {
    const int m = d.m_items;
    int positions[64];
    for (int i = 0; i < m; ++i) positions[i] = i;
    for (int i = 0; i < true_score; ++i)
        std::swap(positions[i], positions[i + rng.uniform_int(m - i)]);
    bool item_true[64] = {};
    for (int i = 0; i < true_score; ++i) item_true[positions[i]] = true;

    int observed = 0;
    for (int item = 0; item < m; ++item) {
        const double p_yes = item_true[item] ? d.p_yes_given_1 : d.p_yes_given_0;
        if (rng.bernoulli(p_yes)) ++observed;
    }
    return observed;
}

}  // namespace

SimData generate(const SimScenario& scenario) {
    scenario.validate();
    const int m = scenario.design.m_items;
    const QMatrix q = build_q_matrix(scenario.design);
    RandomStream rng(scenario.seed);

    SimData out;
    out.observations.reserve(scenario.n);
    out.truth.beta = scenario.beta;
    out.truth.gamma = scenario.gamma;
    out.truth.true_score.reserve(scenario.n);
    out.truth.sp.reserve(scenario.n);
    out.truth.lambda.reserve(scenario.n);
    out.truth.theta.reserve(scenario.n);

    std::vector<double> q_col(m + 1);

    for (int i = 0; i < scenario.n; ++i) {
        // draw the predictor pool once so x and z share values by name
        std::vector<double> pool(scenario.predictors.size());
        for (size_t g = 0; g < scenario.predictors.size(); ++g)
            pool[g] = draw_predictor(scenario.predictors[g], rng);
        auto value_of = [&](const std::string& name) {
            for (size_t g = 0; g < scenario.predictors.size(); ++g)
                if (scenario.predictors[g].name == name) return pool[g];
            throw std::logic_error("generate: predictor lookup failed");
        };

        Observation obs;
        obs.x.resize(1 + scenario.x_names.size());
        obs.x[0] = 1.0;
        for (size_t j = 0; j < scenario.x_names.size(); ++j)
            obs.x[j + 1] = value_of(scenario.x_names[j]);
        obs.z.resize(1 + scenario.z_names.size());
        obs.z[0] = 1.0;
        for (size_t j = 0; j < scenario.z_names.size(); ++j)
            obs.z[j + 1] = value_of(scenario.z_names[j]);

        const double lambda = lambda_of(scenario.beta, obs.x);
        const double theta = theta_of(scenario.gamma, obs.z);
        const bool sp = rng.bernoulli(theta);
        const int true_score = draw_truncated_poisson(lambda, m, rng);

        if (sp) {
            obs.s_star = 0;
        } else if (scenario.mode == GenerationMode::PerItem) {
            obs.s_star = misclassify_per_item(true_score, scenario.design, rng);
        } else {
            for (int so = 0; so <= m; ++so) q_col[so] = q(so, true_score);
            obs.s_star = rng.categorical(q_col);
        }

        out.truth.true_score.push_back(true_score);
        out.truth.sp.push_back(sp ? 1 : 0);
        out.truth.lambda.push_back(lambda);
        out.truth.theta.push_back(theta);
        out.observations.push_back(std::move(obs));
    }
    return out;
}

RecoverySummary recovery_study(const SimScenario& scenario, int n_replicates,
                               const FitOptions& fit_opts, int n_threads) {
    if (n_replicates < 0)
        throw std::invalid_argument("recovery_study: n_replicates must be >= 0");
    scenario.validate();

    RecoverySummary summary;
    summary.n_replicates = n_replicates;
    if (n_replicates == 0) return summary;

    const ModelSpec spec = scenario.model_spec();
    const QMatrix q = build_q_matrix(scenario.design);
    const int k = spec.param_count();

    Eigen::VectorXd truth(k);
    truth.head(scenario.beta.size()) = scenario.beta;
    truth.tail(scenario.gamma.size()) = scenario.gamma;

    struct ReplicateResult {
        bool converged = false;
        Eigen::VectorXd estimate;
        Eigen::VectorXd se;
    };
    std::vector<ReplicateResult> results(n_replicates);

    auto run_replicate = [&](int r) {
        SimScenario rep = scenario;
        rep.seed = RandomStream::substream_seed(scenario.seed, static_cast<std::uint64_t>(r));
        const SimData sim = generate(rep);
        FitOptions opts = fit_opts;
        opts.seed = rep.seed;
        const FitResult fit_res = fit(spec, sim.observations, q, opts);
        results[r].converged = fit_res.converged;
        results[r].estimate = fit_res.params;
        results[r].se = fit_res.std_errors;
    };

    if (n_threads <= 0)
        n_threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    n_threads = std::min(n_threads, n_replicates);
    if (n_threads <= 1) {
        for (int r = 0; r < n_replicates; ++r) run_replicate(r);
    } else {
        std::vector<std::thread> workers;
        for (int w = 0; w < n_threads; ++w) {
            workers.emplace_back([&, w]() {
                for (int r = w; r < n_replicates; r += n_threads) run_replicate(r);
            });
        }
        for (auto& t : workers) t.join();
    }

    const auto names = spec.param_names();
    summary.coefficients.resize(k);
    for (int j = 0; j < k; ++j) {
        auto& coef = summary.coefficients[j];
        coef.name = names[j];
        coef.truth = truth[j];
    }

    int converged = 0;
    std::vector<double> sum_est(k, 0.0), sum_sq(k, 0.0), covered(k, 0.0), signs(k, 0.0);
    for (int r = 0; r < n_replicates; ++r) {  // deterministic index-order fold
        const auto& res = results[r];
        if (!res.converged) continue;
        ++converged;
        for (int j = 0; j < k; ++j) {
            const double est = res.estimate[j];
            sum_est[j] += est;
            sum_sq[j] += (est - truth[j]) * (est - truth[j]);
            if (std::isfinite(res.se[j]) &&
                std::abs(est - truth[j]) <= 1.96 * res.se[j])
                covered[j] += 1.0;
            if (truth[j] != 0.0 && est * truth[j] > 0.0) signs[j] += 1.0;
        }
    }
    summary.n_converged = converged;
    for (int j = 0; j < k; ++j) {
        auto& coef = summary.coefficients[j];
        if (converged > 0) {
            coef.mean_estimate = sum_est[j] / converged;
            coef.bias = coef.mean_estimate - coef.truth;
            coef.rmse = std::sqrt(sum_sq[j] / converged);
            coef.coverage = covered[j] / converged;
            coef.sign_recovery = coef.truth != 0.0
                                     ? signs[j] / converged
                                     : std::numeric_limits<double>::quiet_NaN();
        }
    }
    return summary;
}

double brute_force_loglik(const ModelSpec& spec, const Eigen::VectorXd& params,
                          std::span<const Observation> data, const QMatrix& q) {
    const int m = spec.design.m_items;
    if (m > 6) throw std::invalid_argument("brute_force_loglik: requires M <= 6");
    if (params.size() != spec.param_count())
        throw std::invalid_argument("brute_force_loglik: parameter length mismatch");

    // direct (non-log-space) evaluation, independent of the models module path
    auto prior_probs = [&](const Observation& obs) {
        std::vector<double> pi(m + 1);
        if (spec.kind == ModelKind::MultinomialRR) {
            double total = 1.0;
            pi[0] = 1.0;
            for (int s = 1; s <= m; ++s) total += pi[s] = std::exp(params[s - 1]);
            for (double& v : pi) v /= total;
        } else {
            double eta;
            if (spec.kind == ModelKind::ZipRegression) {
                eta = params.head(spec.beta_dim()).dot(obs.x);
            } else {
                eta = params[0];
            }
            const double lambda = std::exp(eta);
            double total = 0.0;
            double fact = 1.0;
            for (int s = 0; s <= m; ++s) {
                if (s > 0) fact *= s;
                total += pi[s] = std::exp(-lambda) * std::pow(lambda, s) / fact;
            }
            for (double& v : pi) v /= total;
        }
        return pi;
    };

    auto sp_prob = [&](const Observation& obs) -> double {
        switch (spec.kind) {
            case ModelKind::MultinomialRR:
            case ModelKind::PoissonRR: return 0.0;
            case ModelKind::ZipNull: return 1.0 / (1.0 + std::exp(-params[1]));
            case ModelKind::ZipRegression: {
                const double zeta = params.tail(spec.gamma_dim()).dot(obs.z);
                return 1.0 / (1.0 + std::exp(-zeta));
            }
        }
        return 0.0;
    };

    double ll = 0.0;
    for (const Observation& obs : data) {
        const std::vector<double> pi = prior_probs(obs);
        const double theta = sp_prob(obs);
        double total = 0.0;
        for (int sp = 0; sp <= 1; ++sp) {
            const double p_sp = sp ? theta : 1.0 - theta;
            for (int s = 0; s <= m; ++s) {
                // observed score is 0 with certainty under SP, else misclassified
                const double p_obs = sp ? (obs.s_star == 0 ? 1.0 : 0.0)
                                        : q(obs.s_star, s);
                total += p_sp * pi[s] * p_obs;
            }
        }
        ll += obs.weight * std::log(total);
    }
    return ll;
}

}  // namespace rrzip
