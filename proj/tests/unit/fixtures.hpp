#ifndef RRZIP_TEST_FIXTURES_HPP
#define RRZIP_TEST_FIXTURES_HPP

#include <vector>

#include "rrzip/design.hpp"
#include "rrzip/models.hpp"

namespace fixtures {

// as-programmed survey design and the observed sum-score frequency table
inline rrzip::RRDesign programmed_design() {
    return rrzip::forced_response_design(0.9329, 0.18678, 5);
}

inline const std::vector<double>& survey_freqs() {
    static const std::vector<double> freqs{288, 295, 207, 68, 7, 5};
    return freqs;
}

inline std::vector<rrzip::Observation> survey_observations() {
    std::vector<rrzip::Observation> obs;
    const auto& freqs = survey_freqs();
    for (int s = 0; s < static_cast<int>(freqs.size()); ++s) {
        rrzip::Observation o;
        o.s_star = s;
        o.weight = freqs[s];
        obs.push_back(std::move(o));
    }
    return obs;
}

inline rrzip::ModelSpec null_spec(rrzip::ModelKind kind) {
    rrzip::ModelSpec spec;
    spec.kind = kind;
    spec.design = programmed_design();
    return spec;
}

}  // namespace fixtures

#endif
