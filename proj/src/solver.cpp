#include "rmono/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rmono {

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Ok: return "ok";
        case SolveStatus::NoSolution: return "no-solution";
        case SolveStatus::MaxIterations: return "max-iterations";
        case SolveStatus::PathCollision: return "path-collision";
    }
    return "unknown";
}

MomentSystem::MomentSystem(int r_, std::vector<int> orders_, std::vector<double> targets_, double l_,
                           bool l_unknown_)
    : r(r_), orders(std::move(orders_)), targets(std::move(targets_)), l(l_), l_unknown(l_unknown_) {
    if (r < 1 || r > kMaxOrder) throw std::invalid_argument("MomentSystem: bad order r");
    if (orders.size() != targets.size())
        throw std::invalid_argument("MomentSystem: orders/targets length mismatch");
    if (orders.empty()) throw std::invalid_argument("MomentSystem: empty system");
    for (std::size_t i = 0; i < orders.size(); ++i) {
        if (orders[i] < 0 || orders[i] >= r)
            throw std::invalid_argument("MomentSystem: constrained orders must lie in [0, r)");
        if (i > 0 && orders[i] <= orders[i - 1])
            throw std::invalid_argument("MomentSystem: orders must be strictly increasing");
    }
    if (!l_unknown && !(l > 0.0)) throw std::invalid_argument("MomentSystem: l must be positive");
}

std::vector<double> residual(const std::vector<double>& knots, double l, const MomentSystem& sys) {
    AlternatingSpline phi(sys.r, l, knots);
    std::vector<double> out(sys.orders.size());
    for (std::size_t i = 0; i < sys.orders.size(); ++i)
        out[i] = phi.norm(sys.orders[i]) - sys.targets[i];
    return out;
}

namespace {

// Dense linear solve with partial pivoting; A is n*n row-major, overwritten.
bool solve_linear(std::vector<double>& A, std::vector<double>& b, int n) {
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = std::abs(A[col * n + col]);
        for (int row = col + 1; row < n; ++row) {
            const double v = std::abs(A[row * n + col]);
            if (v > best) {
                best = v;
                piv = row;
            }
        }
        if (best == 0.0) return false;
        if (piv != col) {
            for (int j = 0; j < n; ++j) std::swap(A[col * n + j], A[piv * n + j]);
            std::swap(b[col], b[piv]);
        }
        const double d = A[col * n + col];
        for (int row = col + 1; row < n; ++row) {
            const double f = A[row * n + col] / d;
            if (f == 0.0) continue;
            for (int j = col; j < n; ++j) A[row * n + j] -= f * A[col * n + j];
            b[row] -= f * b[col];
        }
    }
    for (int row = n - 1; row >= 0; --row) {
        double acc = b[row];
        for (int j = row + 1; j < n; ++j) acc -= A[row * n + j] * b[j];
        b[row] = acc / A[row * n + row];
    }
    return true;
}

// d norm(k_i) / d a_j for the alternating spline; column for l appended when
// l is unknown.
void fill_jacobian(const std::vector<double>& knots, double l, const MomentSystem& sys,
                   std::vector<double>& J) {
    const int m = sys.equations();
    const int s = static_cast<int>(knots.size());
    const int n = s + (sys.l_unknown ? 1 : 0);
    J.assign(static_cast<std::size_t>(m) * n, 0.0);
    for (int i = 0; i < m; ++i) {
        const int k = sys.orders[i];
        const double dscale = l / factorial(sys.r - k - 1);
        for (int j = 0; j < s; ++j) {
            const double sign = (j % 2 == 0) ? 1.0 : -1.0;
            J[i * n + j] = sign * dscale * std::pow(knots[j], sys.r - k - 1);
        }
        if (sys.l_unknown) {
            double acc = 0.0;
            for (int j = 0; j < s; ++j) {
                const double sign = (j % 2 == 0) ? 1.0 : -1.0;
                acc += sign * std::pow(knots[j], sys.r - k);
            }
            J[i * n + s] = acc / factorial(sys.r - k);
        }
    }
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// The alternating sums behind each equation cancel down from terms of size
// l * a1^(r-k) / (r-k)!, so that magnitude, not the (possibly much smaller)
// target, sets the attainable residual floor in double precision.
bool residual_within_tol(const std::vector<double>& F, const std::vector<double>& knots, double l,
                         const MomentSystem& sys, double tol) {
    const double a1 = knots.empty() ? 0.0 : knots.front();
    for (std::size_t i = 0; i < F.size(); ++i) {
        const int k = sys.orders[i];
        const double lead = l * std::pow(a1, sys.r - k) / factorial(sys.r - k);
        const double scale = std::max(std::abs(sys.targets[i]), lead);
        if (std::abs(F[i]) > tol * scale) return false;
    }
    return true;
}

bool ordered_positive(const std::vector<double>& knots, double l, bool check_l) {
    for (std::size_t j = 0; j < knots.size(); ++j) {
        if (!(knots[j] > 0.0)) return false;
        if (j > 0 && !(knots[j] < knots[j - 1])) return false;
    }
    if (check_l && !(l > 0.0)) return false;
    return true;
}

}  // namespace

double vandermonde_det(const std::vector<double>& x, const std::vector<double>& exponents) {
    const int n = static_cast<int>(x.size());
    if (n < 1 || exponents.size() != x.size())
        throw std::invalid_argument("vandermonde_det: need equal nonzero lengths");
    for (int j = 0; j < n; ++j) {
        if (!(x[j] > 0.0)) throw std::invalid_argument("vandermonde_det: x must be positive");
        if (j > 0 && !(x[j] < x[j - 1]))
            throw std::invalid_argument("vandermonde_det: x must be strictly decreasing");
        if (j > 0 && !(exponents[j] < exponents[j - 1]))
            throw std::invalid_argument("vandermonde_det: exponents must be strictly decreasing");
    }
    std::vector<double> A(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A[i * n + j] = std::pow(x[j], exponents[i]);
    // LU with partial pivoting, accumulating the determinant.
    double det = 1.0;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = std::abs(A[col * n + col]);
        for (int row = col + 1; row < n; ++row)
            if (std::abs(A[row * n + col]) > best) {
                best = std::abs(A[row * n + col]);
                piv = row;
            }
        if (best == 0.0) return 0.0;
        if (piv != col) {
            for (int j = 0; j < n; ++j) std::swap(A[col * n + j], A[piv * n + j]);
            det = -det;
        }
        det *= A[col * n + col];
        for (int row = col + 1; row < n; ++row) {
            const double f = A[row * n + col] / A[col * n + col];
            for (int j = col; j < n; ++j) A[row * n + j] -= f * A[col * n + j];
        }
    }
    return det;
}

KnotSolveResult solve_fixed_count(const MomentSystem& sys, std::vector<double> initial_knots,
                                  double initial_l, const SolverOptions& opt) {
    const int s = static_cast<int>(initial_knots.size());
    const int n = s + (sys.l_unknown ? 1 : 0);
    if (n != sys.equations())
        throw std::invalid_argument("solve_fixed_count: system is not square");
    if (!ordered_positive(initial_knots, sys.l_unknown ? initial_l : sys.l, sys.l_unknown))
        throw std::invalid_argument("solve_fixed_count: initial guess not ordered positive");

    KnotSolveResult res;
    res.knots = std::move(initial_knots);
    res.l = sys.l_unknown ? initial_l : sys.l;

    const double tol = opt.residual_tol * max_abs(sys.targets);
    std::vector<double> J;
    int stall = 0;
    bool full_step = false;
    double prev_rn = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < opt.max_iterations; ++iter) {
        std::vector<double> F = residual(res.knots, res.l, sys);
        const double rn = max_abs(F);
        res.residual_norm = rn;
        res.iterations = iter;
        if (rn <= tol) return res;
        // Undamped Newton that has stopped making progress is sitting at the
        // cancellation noise floor of the alternating sums; that is as
        // converged as doubles allow.  Damped iterations are excluded: there
        // the iterate error is amplified by near-singular Jacobians.
        if (full_step && rn >= 0.5 * prev_rn &&
            residual_within_tol(F, res.knots, res.l, sys, opt.residual_tol))
            return res;

        fill_jacobian(res.knots, res.l, sys, J);
        std::vector<double> A = J;
        std::vector<double> d = F;
        for (double& v : d) v = -v;
        if (!solve_linear(A, d, n)) {
            res.status = SolveStatus::MaxIterations;
            return res;
        }

        // Trust region: no knot moves more than 45% of the way to a neighbor
        // (or to zero) in one step.  Full Newton steps from rough guesses can
        // leap across a knot collision into a spurious basin and creep there.
        double cap = 1.0;
        for (int j = 0; j < s; ++j) {
            double room = res.knots[j];
            if (j > 0) room = std::min(room, res.knots[j - 1] - res.knots[j]);
            if (j + 1 < s) room = std::min(room, res.knots[j] - res.knots[j + 1]);
            if (d[j] != 0.0) cap = std::min(cap, 0.45 * room / std::abs(d[j]));
        }
        if (sys.l_unknown && d[s] != 0.0) cap = std::min(cap, 0.5 * res.l / std::abs(d[s]));

        double step = cap;
        int halvings = 0;
        auto at_step = [&](double st, std::vector<double>& k2, double& l2) {
            k2 = res.knots;
            for (int j = 0; j < s; ++j) k2[j] += st * d[j];
            l2 = sys.l_unknown ? res.l + st * d[s] : res.l;
        };
        auto trial_valid = [&](double st) {
            std::vector<double> k2;
            double l2;
            at_step(st, k2, l2);
            return ordered_positive(k2, l2, sys.l_unknown);
        };
        while (!trial_valid(step) && halvings < opt.max_halvings) {
            step *= 0.5;
            ++halvings;
        }
        if (!trial_valid(step)) {
            res.status = SolveStatus::NoSolution;
            return res;
        }
        // Backtrack until the residual decreases.  When no step does, the
        // iterate sits at a local residual minimum: either the noise floor of
        // a solution, or the domain boundary of an infeasible target.
        std::vector<double> k2;
        double l2;
        at_step(step, k2, l2);
        double rn_next = max_abs(residual(k2, l2, sys));
        while (rn_next >= rn && halvings < opt.max_halvings) {
            step *= 0.5;
            ++halvings;
            at_step(step, k2, l2);
            rn_next = max_abs(residual(k2, l2, sys));
        }
        if (rn_next >= rn) {
            if (residual_within_tol(F, res.knots, res.l, sys, opt.residual_tol)) return res;
            if (++stall >= 3) {
                res.status = SolveStatus::NoSolution;
                return res;
            }
        } else {
            stall = 0;
        }
        res.knots = std::move(k2);
        res.l = l2;
        full_step = halvings == 0 && cap >= 1.0;
        prev_rn = rn;
    }
    std::vector<double> F = residual(res.knots, res.l, sys);
    res.residual_norm = max_abs(F);
    if (res.residual_norm <= tol ||
        (full_step && residual_within_tol(F, res.knots, res.l, sys, opt.residual_tol)))
        return res;
    res.status = SolveStatus::MaxIterations;
    return res;
}

namespace {

// Newton corrector for the continuation: the grown knot `u` is frozen as the
// (s+1)-th alternating term, the original s knots are the unknowns.
bool correct_at(const MomentSystem& sys, double u, std::vector<double>& knots,
                const SolverOptions& opt) {
    const int s = static_cast<int>(knots.size());
    if (s > 0 && (!ordered_positive(knots, sys.l, false) || !(knots.back() > u))) return false;
    const double tol = opt.residual_tol * max_abs(sys.targets);
    double prev_rn = std::numeric_limits<double>::infinity();
    bool full_step = false;
    std::vector<double> J;
    for (int iter = 0; iter < 60; ++iter) {
        std::vector<double> full = knots;
        full.push_back(u);
        std::vector<double> F = residual(full, sys.l, sys);
        const double rn = max_abs(F);
        if (rn <= tol) return true;
        if (full_step && rn >= 0.5 * prev_rn &&
            residual_within_tol(F, full, sys.l, sys, opt.residual_tol))
            return true;
        prev_rn = rn;

        // Jacobian restricted to the first s knots.
        J.assign(static_cast<std::size_t>(s) * s, 0.0);
        for (int i = 0; i < s; ++i) {
            const int k = sys.orders[i];
            const double dscale = sys.l / factorial(sys.r - k - 1);
            for (int j = 0; j < s; ++j) {
                const double sign = (j % 2 == 0) ? 1.0 : -1.0;
                J[i * s + j] = sign * dscale * std::pow(knots[j], sys.r - k - 1);
            }
        }
        std::vector<double> d = F;
        for (double& v : d) v = -v;
        if (!solve_linear(J, d, s)) return false;

        double step = 1.0;
        int halvings = 0;
        auto valid = [&](double st) {
            std::vector<double> k2 = knots;
            for (int j = 0; j < s; ++j) k2[j] += st * d[j];
            if (!(k2[s - 1] > u)) return false;
            return ordered_positive(k2, sys.l, false);
        };
        while (!valid(step) && halvings < opt.max_halvings) {
            step *= 0.5;
            ++halvings;
        }
        if (!valid(step)) return false;
        for (int j = 0; j < s; ++j) knots[j] += step * d[j];
        full_step = halvings == 0;
    }
    std::vector<double> full = knots;
    full.push_back(u);
    std::vector<double> F = residual(full, sys.l, sys);
    return max_abs(F) <= tol ||
           (full_step && residual_within_tol(F, full, sys.l, sys, opt.residual_tol));
}

double tracked_norm(const MomentSystem& sys, const std::vector<double>& knots, double u, int order,
                    double constant) {
    std::vector<double> full = knots;
    full.push_back(u);
    AlternatingSpline phi(sys.r, sys.l, full, constant);
    return phi.norm(order);
}

}  // namespace

GrowResult grow_knot(const AlternatingSpline& witness, int new_order, double new_target,
                     const MomentSystem& sys, const SolverOptions& opt) {
    GrowResult out;
    if (sys.l_unknown) throw std::invalid_argument("grow_knot: l must be fixed along the path");
    if (witness.knot_count() != sys.equations())
        throw std::invalid_argument("grow_knot: witness does not match the system size");
    if (new_order < 0 || new_order >= sys.orders.front())
        throw std::invalid_argument("grow_knot: new order must precede the constrained orders");
    const double start_norm = witness.norm(new_order);
    if (!(new_target > start_norm))
        throw std::invalid_argument("grow_knot: new target must exceed the current norm");

    const int s = witness.knot_count();
    std::vector<double> knots = witness.knots;
    std::vector<double> prev_knots = knots;
    double u = 0.0, prev_u = 0.0;
    double g = start_norm - new_target;  // negative until the crossing

    const double top = knots.front();
    double h = std::max(1e-3 * knots.back(), 1e-9 * top);
    const double h_min = 1e-14 * top;
    const int max_steps = 20000;
    // Knots closer than ~100 ulps of the path's scale are numerically
    // indistinguishable; anything wider is a legitimate configuration even
    // when a pair travels outward together with a shrinking gap.
    const double rel_merge = 1e-14;

    auto push_step = [&](double uu, const std::vector<double>& kk, double nn) {
        out.trace.steps.push_back({uu, kk, nn});
    };
    push_step(0.0, knots, start_norm);

    bool bracketed = false;
    double u_hi = 0.0;
    std::vector<double> knots_hi;

    for (int step_idx = 0; step_idx < max_steps && !bracketed; ++step_idx) {
        if (h < h_min) {
            out.status = SolveStatus::MaxIterations;
            out.trace.termination = "step-underflow";
            return out;
        }
        double u_next = u + h;

        // Predict the corrected knots at u_next from the last two path
        // points; the smallest original knot moves ahead of the grown one, so
        // the step is capped by the current gap only when no valid prediction
        // is available.
        std::vector<double> guess = knots;
        bool predicted = false;
        if (u > prev_u) {
            const double f = (u_next - u) / (u - prev_u);
            for (int j = 0; j < s; ++j) guess[j] = knots[j] + f * (knots[j] - prev_knots[j]);
            predicted = ordered_positive(guess, sys.l, false) && guess.back() > u_next;
            if (!predicted) guess = knots;
        }
        if (!predicted && u_next >= knots.back()) {
            u_next = u + 0.75 * (knots.back() - u);
            if (!(u_next > u)) {
                h *= 0.5;
                continue;
            }
        }
        if (!correct_at(sys, u_next, guess, opt)) {
            h *= 0.5;
            continue;
        }

        const double norm_here = tracked_norm(sys, guess, u_next, new_order, witness.constant);
        const double g_next = norm_here - new_target;
        if (g_next >= 0.0) {
            bracketed = true;
            u_hi = u_next;
            knots_hi = guess;
        } else {
            // Collision guard, only while the target is still ahead.
            const double scale = guess.front();
            bool merged = guess.back() - u_next <= rel_merge * scale;
            for (int j = 0; j + 1 < s && !merged; ++j)
                if (guess[j] - guess[j + 1] <= rel_merge * scale) merged = true;
            if (merged) {
                out.status = SolveStatus::PathCollision;
                out.trace.termination = "knot-merge";
                return out;
            }
            std::vector<double> full_here = guess;
            full_here.push_back(u_next);
            push_step(u_next, full_here, norm_here);
            prev_u = u;
            prev_knots = knots;
            u = u_next;
            knots = guess;
            g = g_next;
            h *= 1.3;
        }
    }
    if (!bracketed) {
        out.status = SolveStatus::MaxIterations;
        out.trace.termination = "no-crossing";
        return out;
    }

    // Bisect the bracketing step down to the Newton basin of the full system.
    double u_lo = u;
    std::vector<double> knots_mid = knots_hi;
    for (int iter = 0; iter < 80 && (u_hi - u_lo) > 1e-14 * std::max(1.0, u_hi); ++iter) {
        const double um = 0.5 * (u_lo + u_hi);
        // knots_hi solves the system at u_hi > um, so it is always a feasible
        // start; the previous midpoint's knots may sit below um when the
        // smallest pair travels with a gap finer than the bisection stride.
        std::vector<double> guess =
            (!knots_mid.empty() && knots_mid.back() > um) ? knots_mid : knots_hi;
        if (!correct_at(sys, um, guess, opt)) break;
        const double gm = tracked_norm(sys, guess, um, new_order, witness.constant) - new_target;
        if (gm >= 0.0) {
            u_hi = um;
            knots_hi = guess;
        } else {
            u_lo = um;
        }
        knots_mid = guess;
    }

    // Polish on the full square system including the new constraint.
    std::vector<int> all_orders = sys.orders;
    all_orders.insert(all_orders.begin(), new_order);
    std::vector<double> all_targets = sys.targets;
    // The constant contributes only at order zero.
    all_targets.insert(all_targets.begin(),
                       new_order == 0 ? new_target - witness.constant : new_target);
    MomentSystem full_sys(sys.r, all_orders, all_targets, sys.l, false);
    std::vector<double> full_knots = knots_hi;
    full_knots.push_back(u_hi);
    KnotSolveResult polished = solve_fixed_count(full_sys, full_knots, sys.l, opt);
    if (polished.status != SolveStatus::Ok) {
        const double rn = max_abs(residual(full_knots, sys.l, full_sys));
        if (rn > 1e-9 * max_abs(all_targets)) {
            out.status = polished.status;
            out.trace.termination = "polish-failed";
            return out;
        }
        polished.knots = full_knots;
    }
    out.spline = AlternatingSpline(sys.r, sys.l, polished.knots, witness.constant);
    out.trace.termination = "crossed";
    push_step(polished.knots.back(), polished.knots, out.spline->norm(new_order));
    return out;
}

MinLResult solve_min_l(int r, const std::vector<int>& orders, const std::vector<double>& targets,
                       const SolverOptions& opt) {
    MinLResult out;
    const int m = static_cast<int>(orders.size());
    if (m < 2)
        throw std::invalid_argument("solve_min_l: need at least two constrained orders");
    if (orders.size() != targets.size())
        throw std::invalid_argument("solve_min_l: orders/targets length mismatch");
    for (int k : orders)
        if (k < 0 || k >= r) throw std::invalid_argument("solve_min_l: orders must lie in [0, r)");

    if (m == 2) {
        // One knot, closed form: norm_k = l a^{r-k}/(r-k)!.
        const int k1 = orders[0], k2 = orders[1];
        const double a = std::pow(targets[0] / targets[1] * factorial(r - k1) / factorial(r - k2),
                                  1.0 / (k2 - k1));
        const double l = targets[1] * factorial(r - k2) / std::pow(a, r - k2);
        out.l_min = l;
        out.spline = AlternatingSpline(r, l, {a});
        return out;
    }

    std::vector<int> tail_orders(orders.begin() + 1, orders.end());
    std::vector<double> tail_targets(targets.begin() + 1, targets.end());
    MinLResult sub = solve_min_l(r, tail_orders, tail_targets, opt);
    if (sub.status != SolveStatus::Ok) {
        out.status = sub.status;
        return out;
    }

    MomentSystem sys(r, orders, targets, 1.0, /*l_unknown=*/true);
    for (double frac : {0.1, 0.3, 0.5}) {
        std::vector<double> guess = sub.spline->knots;
        guess.push_back(frac * guess.back());
        KnotSolveResult k = solve_fixed_count(sys, guess, sub.l_min, opt);
        if (k.status == SolveStatus::Ok) {
            out.l_min = k.l;
            out.spline = AlternatingSpline(r, k.l, k.knots);
            return out;
        }
        out.status = k.status;
    }
    return out;
}

ForLResult solve_for_l(int r, const std::vector<int>& orders, const std::vector<double>& targets,
                       double l, const SolverOptions& opt) {
    ForLResult out;
    const int m = static_cast<int>(orders.size());
    if (m < 1) throw std::invalid_argument("solve_for_l: empty system");
    if (!(l > 0.0)) throw std::invalid_argument("solve_for_l: l must be positive");
    for (int k : orders)
        if (k < 0 || k >= r) throw std::invalid_argument("solve_for_l: orders must lie in [0, r)");

    if (m >= 2) {
        MinLResult min = solve_min_l(r, orders, targets, opt);
        if (min.status == SolveStatus::Ok) {
            if (l < min.l_min * (1.0 - 1e-9)) {
                out.status = SolveStatus::NoSolution;
                return out;
            }
            if (std::abs(l - min.l_min) <= 1e-9 * min.l_min) {
                out.spline = min.spline;
                return out;
            }
        }
    }

    // Staged build at fixed l: one knot for the highest order, then grow a
    // new smallest knot for each earlier order in turn.
    const int km = orders.back();
    const double a1 = std::pow(factorial(r - km) * targets.back() / l, 1.0 / (r - km));
    AlternatingSpline phi(r, l, {a1});
    for (int i = m - 2; i >= 0; --i) {
        const double bound = phi.norm(orders[i]);
        if (!(targets[i] > bound)) {
            out.status = SolveStatus::NoSolution;
            return out;
        }
        MomentSystem sys(r, std::vector<int>(orders.begin() + i + 1, orders.end()),
                         std::vector<double>(targets.begin() + i + 1, targets.end()), l, false);
        GrowResult g = grow_knot(phi, orders[i], targets[i], sys, opt);
        if (g.status != SolveStatus::Ok) {
            out.status = g.status;
            return out;
        }
        phi = *g.spline;
    }
    out.spline = phi;
    return out;
}

}  // namespace rmono
