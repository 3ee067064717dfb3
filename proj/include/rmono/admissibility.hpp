#ifndef RMONO_ADMISSIBILITY_HPP
#define RMONO_ADMISSIBILITY_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rmono/solver.hpp"
#include "rmono/spline.hpp"

namespace rmono {

/// Raised when a solver stage fails for numerical (not feasibility) reasons.
struct numerical_failure : std::runtime_error {
    int stage;
    numerical_failure(const std::string& what, int stage_)
        : std::runtime_error(what), stage(stage_) {}
};

enum class SplineType { Type1, Type2, Type3, None };
enum class Certainty { Certain, BoundaryAtTolerance };

const char* to_string(SplineType t);
const char* to_string(Certainty c);

struct DecisionConfig {
    double equality_tolerance = 1e-9;  // relative, three-way comparisons
    double limit_factor = 4.0;         // geometric schedule for the l sweep
    int limit_max_stages = 20;
    int grid_size = 10001;

    void validate() const;
};

struct Verdict {
    bool admissible = false;
    SplineType type = SplineType::None;
    std::optional<AlternatingSpline> witness;
    int binding_stage = -1;            // index into OrderSpec.orders where the decision resolved
    std::vector<double> margins;       // per order: target minus the stage bound it was compared to
    Certainty certainty = Certainty::Certain;
};

/// Decide whether the targets are the derivative norms of some r-monotone
/// function on the negative half-line, and construct the extremal witness.
Verdict decide(const OrderSpec& spec, const NormTargets& targets, const DecisionConfig& config = {});

/// Sharp d = 3 admissibility threshold for M_{k1} given M_{k2} and M_r.
double three_order_bound(int r, int k1, int k2, double m_k2, double m_r);

struct LimitEstimate {
    double limit = 0.0;
    double uncertainty = 0.0;  // absolute error estimate of `limit`
    std::vector<std::pair<double, double>> samples;  // (l, bound(l))
};

/// Limit of ||phi_l^(k1)|| as l grows, over splines matching the tail
/// targets; the admissibility threshold for M_{k1} when k_d < r.
LimitEstimate estimate_limit(int r, int k1, const std::vector<int>& tail_orders,
                             const std::vector<double>& tail_targets,
                             const DecisionConfig& config = {});

struct ExtremalEntry {
    int order;        // intermediate order k (or r for the top check)
    int gap_index;    // i with k_i < k < k_{i+1}, k_0 := -1
    double x_norm;
    double witness_norm;
    double signed_diff;  // (-1)^i (||x^(k)|| - ||phi^(k)||)
    bool pass;
};

struct ExtremalReport {
    bool ok = true;
    std::vector<ExtremalEntry> entries;
};

/// Sign comparison at one order k not in the spec.
ExtremalEntry extremal_check(const MonotoneSpline& x, const Verdict& verdict, const OrderSpec& spec,
                             int k, double slack = 1e-7);

/// All intermediate orders, plus the r-norm comparison when k_d < r.
ExtremalReport extremal_check_all(const MonotoneSpline& x, const Verdict& verdict,
                                  const OrderSpec& spec, double slack = 1e-7);

}  // namespace rmono

#endif
