#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "rrzip/distributions.hpp"

using namespace rrzip;

TEST_CASE("truncated Poisson pmf") {
    SUBCASE("lambda 0 is a point mass at zero") {
        const auto pmf = truncated_poisson_pmf(0.0, 5);
        CHECK(pmf[0] == 1.0);
        for (int s = 1; s <= 5; ++s) CHECK(pmf[s] == 0.0);
    }
    SUBCASE("lambda 1, M 2 has masses proportional to 1, 1, 1/2") {
        const auto pmf = truncated_poisson_pmf(1.0, 2);
        CHECK(pmf[0] == doctest::Approx(0.4).epsilon(1e-12));
        CHECK(pmf[1] == doctest::Approx(0.4).epsilon(1e-12));
        CHECK(pmf[2] == doctest::Approx(0.2).epsilon(1e-12));
    }
    SUBCASE("normalizes for random rates and truncation points") {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int rep = 0; rep < 1000; ++rep) {
            const double lambda = 20.0 * u(rng) + 1e-9;
            const int m = 1 + static_cast<int>(rng() % 10);
            const auto pmf = truncated_poisson_pmf(lambda, m);
            double total = 0.0;
            for (double v : pmf) total += v;
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    SUBCASE("agrees with the direct formula") {
        const double lambda = 0.301;
        const auto trunc = truncated_poisson_pmf(lambda, 5);
        double norm = 0.0;
        for (int s = 0; s <= 5; ++s)
            norm += std::exp(-lambda) * std::pow(lambda, s) / std::tgamma(s + 1.0);
        for (int s = 0; s <= 5; ++s) {
            const double direct =
                std::exp(-lambda) * std::pow(lambda, s) / std::tgamma(s + 1.0) / norm;
            CHECK(trunc[s] == doctest::Approx(direct).epsilon(1e-12));
        }
    }
    SUBCASE("rejects bad rates") {
        CHECK_THROWS_AS(truncated_poisson_pmf(-0.1, 5), std::invalid_argument);
        CHECK_THROWS_AS(truncated_poisson_pmf(std::nan(""), 5), std::invalid_argument);
        CHECK_THROWS_AS(truncated_poisson_pmf(1.0, 0), std::invalid_argument);
    }
}

TEST_CASE("bernoulli_sum_exact") {
    SUBCASE("two fair coins") {
        const auto dist = bernoulli_sum_exact(std::vector<double>{0.5, 0.5});
        CHECK(dist.pmf[0] == doctest::Approx(0.25).epsilon(1e-15));
        CHECK(dist.pmf[1] == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(dist.pmf[2] == doctest::Approx(0.25).epsilon(1e-15));
    }
    SUBCASE("degenerate items") {
        const auto dist = bernoulli_sum_exact(std::vector<double>{1.0, 1.0, 1.0});
        CHECK(dist.pmf[0] == 0.0);
        CHECK(dist.pmf[3] == 1.0);
    }
    SUBCASE("survey prevalences reproduce the published table") {
        const std::vector<double> probs{0.001, 0.050, 0.009, 0.069, 0.172};
        const auto dist = bernoulli_sum_exact(probs);
        const std::vector<double> expected{0.7250, 0.2498, 0.0244, 0.0008, 0.0000, 0.0000};
        REQUIRE(dist.pmf.size() == expected.size());
        for (size_t s = 0; s < expected.size(); ++s)
            CHECK(std::abs(dist.pmf[s] - expected[s]) < 5e-5);
    }
    SUBCASE("matches brute-force enumeration over all outcome patterns") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int m : {1, 4, 8, 12}) {
            std::vector<double> probs(m);
            for (double& p : probs) p = u(rng);
            const auto dist = bernoulli_sum_exact(probs);

            std::vector<double> brute(m + 1, 0.0);
            for (unsigned long pattern = 0; pattern < (1UL << m); ++pattern) {
                double prob = 1.0;
                int sum = 0;
                for (int i = 0; i < m; ++i) {
                    if (pattern >> i & 1) {
                        prob *= probs[i];
                        ++sum;
                    } else {
                        prob *= 1.0 - probs[i];
                    }
                }
                brute[sum] += prob;
            }
            for (int s = 0; s <= m; ++s)
                CHECK(dist.pmf[s] == doctest::Approx(brute[s]).epsilon(1e-12));
        }
    }
    SUBCASE("mean equals the sum of the probabilities") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int rep = 0; rep < 50; ++rep) {
            std::vector<double> probs(1 + rng() % 10);
            double total = 0.0;
            for (double& p : probs) total += p = u(rng);
            CHECK(bernoulli_sum_exact(probs).mean() ==
                  doctest::Approx(total).epsilon(1e-12));
        }
    }
    SUBCASE("rejects out-of-range probabilities") {
        CHECK_THROWS_AS((bernoulli_sum_exact(std::vector<double>{0.5, 1.2})),
                        std::invalid_argument);
        CHECK_THROWS_AS((bernoulli_sum_exact(std::vector<double>{-0.1})),
                        std::invalid_argument);
    }
}

TEST_CASE("poisson_approx_report") {
    SUBCASE("survey items: largest deviation sits at count 1") {
        const std::vector<double> probs{0.001, 0.050, 0.009, 0.069, 0.172};
        const auto rep = poisson_approx_report(probs);
        CHECK(rep.lambda == doctest::Approx(0.301).epsilon(1e-12));
        CHECK(rep.max_abs_dev_count == 1);
        CHECK(rep.max_abs_dev == doctest::Approx(0.0270).epsilon(2e-3));
    }
    SUBCASE("all-zero items collapse to a shared point mass") {
        const auto rep = poisson_approx_report(std::vector<double>{0.0, 0.0, 0.0});
        CHECK(rep.exact_pmf[0] == 1.0);
        CHECK(rep.poisson_pmf[0] == 1.0);
        CHECK(rep.max_abs_dev == 0.0);
    }
    SUBCASE("two quarter items against Poisson(0.5)") {
        const auto rep = poisson_approx_report(std::vector<double>{0.25, 0.25});
        // hand convolution vs e^{-1/2} (1, 1/2, 1/8)
        CHECK(rep.exact_pmf[0] == doctest::Approx(0.5625).epsilon(1e-12));
        CHECK(rep.exact_pmf[1] == doctest::Approx(0.3750).epsilon(1e-12));
        CHECK(rep.exact_pmf[2] == doctest::Approx(0.0625).epsilon(1e-12));
        const double e_half = std::exp(-0.5);
        CHECK(rep.poisson_pmf[0] == doctest::Approx(e_half).epsilon(1e-12));
        CHECK(rep.poisson_pmf[1] == doctest::Approx(e_half * 0.5).epsilon(1e-12));
        CHECK(rep.poisson_pmf[2] == doctest::Approx(e_half * 0.125).epsilon(1e-12));
    }
}
