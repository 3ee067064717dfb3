#ifndef RMONO_SOLVER_HPP
#define RMONO_SOLVER_HPP

#include <optional>
#include <string>
#include <vector>

#include "rmono/spline.hpp"

namespace rmono {

enum class SolveStatus {
    Ok,
    NoSolution,     // targets infeasible at this knot count
    MaxIterations,  // numerical failure, distinct from infeasibility
    PathCollision,  // two tracked knots merged along a continuation path
};

const char* to_string(SolveStatus s);

/// Nonlinear moment system: equality constraints on the closed-form norms
/// of an alternating spline.  Square when the knot count (plus one if l is
/// unknown) equals the number of constrained orders.
struct MomentSystem {
    int r;
    std::vector<int> orders;     // constrained orders, strictly increasing
    std::vector<double> targets; // matching positive targets
    double l = 1.0;              // fixed value of ||phi^(r)||, ignored if l_unknown
    bool l_unknown = false;

    MomentSystem(int r_, std::vector<int> orders_, std::vector<double> targets_, double l_ = 1.0,
                 bool l_unknown_ = false);

    int equations() const { return static_cast<int>(orders.size()); }
};

/// F_i = ||phi^(k_i)|| - M_{k_i} for the spline with the given knots and l.
std::vector<double> residual(const std::vector<double>& knots, double l, const MomentSystem& sys);

/// Determinant of the generalized Vandermonde matrix (x_j^{alpha_i});
/// strictly positive for strictly decreasing positive x and strictly
/// decreasing exponents.
double vandermonde_det(const std::vector<double>& x, const std::vector<double>& exponents);

struct SolverOptions {
    double residual_tol = 1e-12;   // relative to the largest target
    double knot_merge_tol = 1e-10; // relative to the largest knot
    int max_iterations = 200;
    int max_halvings = 60;
};

struct KnotSolveResult {
    SolveStatus status = SolveStatus::Ok;
    std::vector<double> knots;
    double l = 0.0;
    int iterations = 0;
    double residual_norm = 0.0;
};

/// Damped Newton on a square moment system.  The ordered-positive solution
/// is unique, so converged runs agree regardless of the starting guess.
KnotSolveResult solve_fixed_count(const MomentSystem& sys, std::vector<double> initial_knots,
                                  double initial_l = 1.0, const SolverOptions& opt = {});

struct ContinuationStep {
    double grown_knot;           // value of the new smallest knot
    std::vector<double> knots;   // full knot vector at this step
    double tracked_norm;         // ||phi^(k)|| at the order being driven to target
};

struct ContinuationTrace {
    std::vector<ContinuationStep> steps;
    std::string termination;
};

struct GrowResult {
    SolveStatus status = SolveStatus::Ok;
    std::optional<AlternatingSpline> spline;
    ContinuationTrace trace;
};

/// Introduce a new smallest knot into a witness spline and follow the
/// implicit-function path until ||phi^(new_order)|| first crosses
/// new_target.  The witness must satisfy `sys` (its current constraints)
/// and new_target must exceed the witness's current norm at new_order.
GrowResult grow_knot(const AlternatingSpline& witness, int new_order, double new_target,
                     const MomentSystem& sys, const SolverOptions& opt = {});

struct MinLResult {
    SolveStatus status = SolveStatus::Ok;
    double l_min = 0.0;
    std::optional<AlternatingSpline> spline;
};

/// Minimal ||phi^(r)|| over splines matching m >= 2 norm targets at orders
/// all below r.  The minimizer carries m-1 knots.
MinLResult solve_min_l(int r, const std::vector<int>& orders, const std::vector<double>& targets,
                       const SolverOptions& opt = {});

struct ForLResult {
    SolveStatus status = SolveStatus::Ok;
    std::optional<AlternatingSpline> spline;
};

/// Spline matching m targets (orders all below r) with ||phi^(r)|| = l,
/// for l >= the minimal value; carries m knots (m-1 exactly at l = l_min).
ForLResult solve_for_l(int r, const std::vector<int>& orders, const std::vector<double>& targets,
                       double l, const SolverOptions& opt = {});

}  // namespace rmono

#endif
