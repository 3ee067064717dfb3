#ifndef RMONO_ORACLE_HPP
#define RMONO_ORACLE_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rmono/admissibility.hpp"
#include "rmono/spline.hpp"

namespace rmono {

/// Random r-monotone spline generator.  The seed fully determines the output.
struct GeneratorConfig {
    int r = 3;
    int pieces = 3;
    std::pair<double, double> knot_range{0.1, 10.0};
    std::pair<double, double> coefficient_range{0.1, 5.0};
    std::uint64_t seed = 0;

    void validate() const;
};

MonotoneSpline generate(const GeneratorConfig& config);

/// Grid-sampled sup |x^(k)| with doubling refinement until two successive
/// levels agree to relative 1e-9.  Independent of the closed-form norms.
double numeric_sup_norm(const MonotoneSpline& x, int k, int max_doublings = 12);
double numeric_sup_norm(const AlternatingSpline& s, int k, int max_doublings = 12);

struct TrialFailure {
    int trial = -1;
    std::uint64_t seed = 0;  // reproduction seed for this trial
    int r = 0;
    std::vector<int> orders;
    std::vector<double> norms;
    std::string stage;  // which assertion failed
};

struct SuiteReport {
    int trials = 0;
    int failures = 0;
    std::vector<TrialFailure> failure_list;
    double worst_margin = 0.0;  // smallest binding margin seen over the suite

    std::string summary() const;
};

/// Property suite: generate x, decide on its measured norms, check the
/// extremal sign pattern at every intermediate order, and verify that
/// dropping the lowest target below its stage bound flips the verdict.
SuiteReport comparison_suite(int trials, int max_r, int max_d, std::uint64_t seed,
                             bool parallel = true);

}  // namespace rmono

#endif
