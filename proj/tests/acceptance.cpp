// Acceptance checks, one pass/fail line per criterion.  Exit code is the
// number of failed criteria.
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "rmono/admissibility.hpp"
#include "rmono/oracle.hpp"
#include "rmono/parallel.hpp"
#include "rmono/solver.hpp"

using namespace rmono;

namespace {

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

bool rel_close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// 1. d = 3 boundary against the closed-form threshold.
Check criterion1() {
    Check c;
    OrderSpec spec(2, {0, 1, 2});
    Verdict below = decide(spec, NormTargets({0.5 * (1.0 - 1e-8), 1.0, 1.0}));
    Verdict at = decide(spec, NormTargets({0.5, 1.0, 1.0}));
    Verdict above = decide(spec, NormTargets({0.5 * (1.0 + 1e-8), 1.0, 1.0}));
    c.require(!below.admissible, "M0 just below 0.5 must be inadmissible");
    c.require(at.admissible && at.type == SplineType::Type2, "M0 = 0.5 must be Type2");
    c.require(above.admissible && above.type == SplineType::Type1,
              "M0 just above 0.5 must be Type1");

    int grid_failures = 0;
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
            const double m1 = 0.3 + 2.7 * i / 9.0;
            const double m2 = 0.3 + 2.7 * j / 9.0;
            const double bound = three_order_bound(2, 0, 1, m1, m2);
            Verdict lo = decide(spec, NormTargets({0.9 * bound, m1, m2}));
            Verdict hi = decide(spec, NormTargets({1.1 * bound, m1, m2}));
            if (lo.admissible || !hi.admissible || hi.type != SplineType::Type1) ++grid_failures;
        }
    }
    c.require(grid_failures == 0,
              "grid disagreements with three_order_bound: " + std::to_string(grid_failures));
    return c;
}

// 2. Worked Type ladder for r = 3, k = (0,1,2,3).
Check criterion2() {
    Check c;
    OrderSpec spec(3, {0, 1, 2, 3});
    c.require(!decide(spec, NormTargets({0.1, 0.5, 1.0, 1.0})).admissible,
              "M0 = 0.1 < 1/6 must be inadmissible");
    {
        Verdict v = decide(spec, NormTargets({1.0 / 6.0, 0.5, 1.0, 1.0}));
        c.require(v.admissible && v.type == SplineType::Type2, "M0 = 1/6 must be Type2");
    }
    for (double m0 : {0.2, 1.0, 7.3}) {
        Verdict v = decide(spec, NormTargets({m0, 0.5, 1.0, 1.0}));
        c.require(v.admissible && v.type == SplineType::Type3,
                  "M0 = " + std::to_string(m0) + " must be Type3");
        if (v.witness)
            c.require(rel_close(v.witness->constant, m0 - 1.0 / 6.0, 1e-8),
                      "Type3 constant must equal M0 - 1/6");
    }

    const double bound = (1.331 - 0.001) / 6.0;  // (1.1^3 - 0.1^3)/6
    {
        Verdict v = decide(spec, NormTargets({bound, 0.6, 1.0, 1.0}));
        c.require(v.admissible && v.type == SplineType::Type2, "M0 at the 0.6-family bound: Type2");
        if (v.witness && v.witness->knot_count() == 2) {
            c.require(rel_close(v.witness->knots[0], 1.1, 1e-8), "Type2 knot a1 = 1.1");
            c.require(rel_close(v.witness->knots[1], 0.1, 1e-8), "Type2 knot a2 = 0.1");
        } else {
            c.require(false, "Type2 witness must carry knots (1.1, 0.1)");
        }
    }
    {
        DecisionConfig tight;
        tight.equality_tolerance = 1e-12;
        Verdict v = decide(spec, NormTargets({bound * (1.0 + 1e-9), 0.6, 1.0, 1.0}), tight);
        c.require(v.admissible && v.type == SplineType::Type1,
                  "M0 just above the 0.6-family bound: Type1");
        if (v.witness && v.witness->knot_count() == 3) {
            c.require(rel_close(v.witness->knots[0], 1.1, 1e-8), "Type1 knot a1 -> 1.1");
            c.require(rel_close(v.witness->knots[1], 0.1, 1e-8), "Type1 knot a2 -> 0.1");
        } else {
            c.require(false, "Type1 witness must carry 3 knots");
        }
    }
    {
        Verdict v = decide(spec, NormTargets({0.4, 0.6, 1.0, 1.0}));
        c.require(v.admissible && v.type == SplineType::Type1, "M0 = 0.4 must be Type1");
        if (v.witness) {
            const std::vector<double> targets{0.4, 0.6, 1.0, 1.0};
            for (int i = 0; i < 4; ++i)
                c.require(rel_close(v.witness->norm(spec.orders[i]), targets[i], 1e-8),
                          "Type1 witness norm mismatch at order " +
                              std::to_string(spec.orders[i]));
        }
    }
    return c;
}

// 3. The k_d < r limit threshold.
Check criterion3() {
    Check c;
    MinLResult min = solve_min_l(3, {1, 2}, {1.0, 1.0});
    c.require(min.status == SolveStatus::Ok && rel_close(min.l_min, 0.5, 1e-8),
              "l_min must be 0.5");
    c.require(min.spline && min.spline->knot_count() == 1 &&
                  rel_close(min.spline->knots[0], 2.0, 1e-8),
              "minimal-l knot must be 2");

    LimitEstimate lim = estimate_limit(3, 0, {1, 2}, {1.0, 1.0});
    c.require(std::abs(lim.limit - 0.5) <= 1e-6, "limit must be 0.5 within 1e-6");
    for (std::size_t i = 1; i < lim.samples.size(); ++i)
        c.require(lim.samples[i].second <= lim.samples[i - 1].second * (1.0 + 1e-9),
                  "limit samples must be nonincreasing");

    OrderSpec spec(3, {0, 1, 2});
    Verdict admit = decide(spec, NormTargets({0.6, 1.0, 1.0}));
    c.require(admit.admissible, "M0 = 0.6 must be admissible");
    Verdict reject = decide(spec, NormTargets({0.45, 1.0, 1.0}));
    c.require(!reject.admissible, "M0 = 0.45 must be inadmissible");
    Verdict boundary = decide(spec, NormTargets({0.5, 1.0, 1.0}));
    c.require(!boundary.admissible && boundary.certainty == Certainty::BoundaryAtTolerance,
              "M0 = 0.5 must be boundary-at-tolerance inadmissible");
    return c;
}

// 4. Newton round-trip uniqueness.
Check criterion4() {
    Check c;
    const int trials = 10000;
    std::atomic<int> failures{0};
    parallel_for(trials, [&](std::int64_t trial) {
        try {
        std::mt19937_64 rng(0x4c4bull * (trial + 1));
        // Knot spread capped at 7x: the alternating sums cancel down from
        // terms of size a1^r, so a wider spread at r = 8 would push the
        // smallest knot below the double-precision noise floor of 1e-8.
        std::uniform_real_distribution<double> unif(0.5, 3.5);
        std::uniform_real_distribution<double> pert(-1.0, 1.0);
        const int r = 2 + static_cast<int>(rng() % 7);  // r in [2, 8]
        const int s = 1 + static_cast<int>(rng() % std::min(6, r));
        std::vector<double> knots;
        int guard = 0;
        while (static_cast<int>(knots.size()) < s && guard++ < 1000) {
            const double a = unif(rng);
            bool ok = true;
            for (double e : knots)
                if (std::abs(e - a) < 0.3) ok = false;
            if (ok) knots.push_back(a);
        }
        if (static_cast<int>(knots.size()) < s) return;
        std::sort(knots.begin(), knots.end(), std::greater<>());
        std::vector<int> orders;
        while (static_cast<int>(orders.size()) < s) {
            const int k = static_cast<int>(rng() % r);
            if (std::find(orders.begin(), orders.end(), k) == orders.end()) orders.push_back(k);
        }
        std::sort(orders.begin(), orders.end());
        AlternatingSpline phi(r, 1.0, knots);
        std::vector<double> targets;
        for (int k : orders) targets.push_back(phi.norm(k));
        MomentSystem sys(r, orders, targets, 1.0);

        std::vector<std::vector<double>> recovered;
        for (int run = 0; run < 2; ++run) {
            std::vector<double> guess = knots;
            for (std::size_t j = 0; j < guess.size(); ++j) {
                const double gap =
                    (j + 1 < guess.size()) ? guess[j] - guess[j + 1] : guess[j];
                guess[j] += 0.05 * gap * pert(rng);
            }
            std::sort(guess.begin(), guess.end(), std::greater<>());
            KnotSolveResult res = solve_fixed_count(sys, guess);
            if (res.status != SolveStatus::Ok) {
                ++failures;
                return;
            }
            recovered.push_back(res.knots);
        }
        for (int j = 0; j < s; ++j) {
            if (!rel_close(recovered[0][j], knots[j], 1e-8) ||
                !rel_close(recovered[0][j], recovered[1][j], 1e-8)) {
                ++failures;
                return;
            }
        }
        } catch (const std::exception&) {
            ++failures;
        }
    });
    c.require(failures.load() == 0,
              std::to_string(failures.load()) + " of 10000 round trips failed");
    return c;
}

// 5. Generalized Vandermonde positivity.
Check criterion5() {
    Check c;
    const int trials = 100000;
    std::atomic<int> failures{0};
    parallel_for(trials, [&](std::int64_t trial) {
        std::mt19937_64 rng(0x5a5aull * (trial + 1));
        std::uniform_real_distribution<double> ux(0.1, 10.0);
        std::uniform_real_distribution<double> ua(-5.0, 5.0);
        const int n = 1 + static_cast<int>(rng() % 8);
        std::vector<double> x, a;
        while (static_cast<int>(x.size()) < n) {
            const double v = ux(rng);
            bool ok = true;
            for (double e : x)
                if (std::abs(e - v) < 1e-3) ok = false;
            if (ok) x.push_back(v);
        }
        while (static_cast<int>(a.size()) < n) {
            const double v = ua(rng);
            bool ok = true;
            for (double e : a)
                if (std::abs(e - v) < 1e-3) ok = false;
            if (ok) a.push_back(v);
        }
        std::sort(x.begin(), x.end(), std::greater<>());
        std::sort(a.begin(), a.end(), std::greater<>());
        if (!(vandermonde_det(x, a) > 0.0)) ++failures;
    });
    c.require(failures.load() == 0,
              std::to_string(failures.load()) + " nonpositive determinants");
    return c;
}

// 6. End-to-end realizability oracle.
Check criterion6() {
    Check c;
    SuiteReport rep = comparison_suite(1000, 6, 5, /*seed=*/20240817);
    c.require(rep.failures == 0, std::to_string(rep.failures) + " of 1000 trials failed");
    if (rep.failures != 0) {
        std::string first = rep.failure_list.front().stage;
        c.require(false, "first failure: " + first);
    }
    return c;
}

// 7. Closed-form norms against the grid oracle.
Check criterion7() {
    Check c;
    const int trials = 1000;
    std::atomic<int> failures{0};
    parallel_for(trials, [&](std::int64_t trial) {
        try {
        std::mt19937_64 rng(0x77ull * (trial + 1));
        std::uniform_real_distribution<double> unif(0.2, 6.0);
        const int r = 2 + static_cast<int>(rng() % 5);
        const int s = 1 + static_cast<int>(rng() % 4);
        std::vector<double> knots;
        while (static_cast<int>(knots.size()) < s) {
            const double a = unif(rng);
            bool ok = true;
            for (double e : knots)
                if (std::abs(e - a) < 0.05) ok = false;
            if (ok) knots.push_back(a);
        }
        std::sort(knots.begin(), knots.end(), std::greater<>());
        AlternatingSpline phi(r, unif(rng), knots);
        for (int k = 0; k <= r; ++k) {
            const double exact = phi.norm(k);
            const double grid = numeric_sup_norm(phi, k);
            if (!rel_close(grid, exact, 1e-8)) {
                ++failures;
                return;
            }
        }
        } catch (const std::exception&) {
            ++failures;
        }
    });
    c.require(failures.load() == 0,
              std::to_string(failures.load()) + " of 1000 splines disagreed");
    return c;
}

// 8. Scaling equivariance of decide.
Check criterion8() {
    Check c;
    std::atomic<int> failures{0};
    parallel_for(100, [&](std::int64_t trial) {
        try {
        std::mt19937_64 rng(0x88ull * (trial + 1));
        std::uniform_real_distribution<double> sc(0.1, 10.0);
        GeneratorConfig gc;
        gc.r = 3 + static_cast<int>(rng() % 3);
        gc.pieces = 1 + static_cast<int>(rng() % 4);
        gc.seed = 7000 + static_cast<std::uint64_t>(trial);
        MonotoneSpline x = generate(gc);
        std::vector<int> orders = trial % 2 == 0
                                      ? std::vector<int>{0, 1, gc.r}
                                      : std::vector<int>{0, 1, gc.r - 1};
        OrderSpec spec(gc.r, orders);
        std::vector<double> norms = measure_norms(x, spec);
        Verdict v0 = decide(spec, NormTargets(norms));
        if (!v0.admissible || !v0.witness) {
            ++failures;
            return;
        }
        const double alpha = sc(rng), lambda = sc(rng);
        std::vector<double> scaled(norms.size());
        for (std::size_t i = 0; i < norms.size(); ++i)
            scaled[i] = alpha * std::pow(lambda, orders[i]) * norms[i];
        Verdict v = decide(spec, NormTargets(scaled));
        if (!v.admissible || v.type != v0.type || !v.witness) {
            ++failures;
            return;
        }
        AlternatingSpline expected = rescale(*v0.witness, ScaleTransform(alpha, lambda));
        if (v.witness->knot_count() != expected.knot_count() ||
            !rel_close(v.witness->l, expected.l, 1e-8) ||
            !rel_close(v.witness->constant, expected.constant, 1e-8)) {
            ++failures;
            return;
        }
        for (int j = 0; j < expected.knot_count(); ++j)
            if (!rel_close(v.witness->knots[j], expected.knots[j], 1e-8)) {
                ++failures;
                return;
            }
        } catch (const std::exception&) {
            ++failures;
        }
    });
    c.require(failures.load() == 0,
              std::to_string(failures.load()) + " of 100 scaled instances disagreed");
    return c;
}

}  // namespace

int main() {
    using clock_type = std::chrono::steady_clock;
    int failed = 0;
    Check (*criteria[])() = {criterion1, criterion2, criterion3, criterion4,
                             criterion5, criterion6, criterion7, criterion8};
    for (int i = 0; i < 8; ++i) {
        const auto t0 = clock_type::now();
        Check c;
        try {
            c = criteria[i]();
        } catch (const std::exception& e) {
            c.ok = false;
            c.detail = std::string("exception: ") + e.what();
        }
        const double dt = std::chrono::duration<double>(clock_type::now() - t0).count();
        if (c.ok) {
            std::printf("criterion %d: PASS (%.2f s)\n", i + 1, dt);
        } else {
            std::printf("criterion %d: FAIL (%.2f s) %s\n", i + 1, dt, c.detail.c_str());
            ++failed;
        }
        std::fflush(stdout);
    }
    return failed;
}
