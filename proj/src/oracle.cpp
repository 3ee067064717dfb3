#include "rmono/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "rmono/parallel.hpp"

namespace rmono {

namespace {

// splitmix64; used to derive independent per-trial seeds.
std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
    std::uint64_t s = seed ^ (0xd1b54a32d192ed03ULL * (trial + 1));
    return splitmix64(s);
}

}  // namespace

void GeneratorConfig::validate() const {
    if (r < 1 || r > 12) throw std::invalid_argument("GeneratorConfig: r must lie in [1, 12]");
    if (pieces < 0 || pieces > 10)
        throw std::invalid_argument("GeneratorConfig: pieces must lie in [0, 10]");
    if (!(knot_range.first > 0.0) || !(knot_range.second > knot_range.first))
        throw std::invalid_argument("GeneratorConfig: knot_range must be a nonempty positive interval");
    if (!(coefficient_range.first > 0.0) ||
        !(coefficient_range.second > coefficient_range.first))
        throw std::invalid_argument(
            "GeneratorConfig: coefficient_range must be a nonempty positive interval");
}

MonotoneSpline generate(const GeneratorConfig& config) {
    config.validate();
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> knot(config.knot_range.first, config.knot_range.second);
    std::uniform_real_distribution<double> coef(config.coefficient_range.first,
                                                config.coefficient_range.second);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // Distinct knots, sorted decreasing, with a minimum relative separation
    // so every polynomial piece is resolvable.
    std::vector<double> knots;
    const double min_sep = 1e-3 * (config.knot_range.second - config.knot_range.first);
    int guard = 0;
    while (static_cast<int>(knots.size()) < config.pieces && guard++ < 10000) {
        const double b = knot(rng);
        bool ok = true;
        for (double e : knots)
            if (std::abs(e - b) < min_sep) ok = false;
        if (ok) knots.push_back(b);
    }
    std::sort(knots.begin(), knots.end(), std::greater<>());

    // Positive prefix sums, differenced into coefficients: every prefix sum
    // of the result is one of the draws, so r-monotonicity holds by
    // construction.
    std::vector<std::pair<double, double>> terms;
    double prev = 0.0;
    for (std::size_t j = 0; j < knots.size(); ++j) {
        const double p = coef(rng);
        terms.emplace_back(knots[j], p - prev);
        prev = p;
    }

    const double constant = unit(rng) < 0.5 ? coef(rng) : 0.0;
    return MonotoneSpline(config.r, std::move(terms), constant);
}

namespace {

template <class Spline>
double sup_on_grid(const Spline& x, int k, double lo, long n, const std::vector<double>& extra) {
    double m = 0.0;
    for (long i = 0; i < n; ++i) {
        const double t = lo * (1.0 - static_cast<double>(i) / (n - 1));
        m = std::max(m, std::abs(x.eval_derivative(k, t)));
    }
    for (double t : extra) m = std::max(m, std::abs(x.eval_derivative(k, t)));
    return m;
}

template <class Spline>
double numeric_sup_norm_impl(const Spline& x, int k, double top_knot,
                             const std::vector<double>& knot_points, int max_doublings) {
    if (k < 0 || k > x.r) throw std::invalid_argument("numeric_sup_norm: k outside [0, r]");
    const double lo = -(top_knot + 1.0);
    long n = 1025;
    double prev = sup_on_grid(x, k, lo, n, knot_points);
    for (int d = 0; d < max_doublings; ++d) {
        n = 2 * (n - 1) + 1;
        const double cur = sup_on_grid(x, k, lo, n, knot_points);
        if (std::abs(cur - prev) <= 1e-9 * std::max(std::abs(cur), std::abs(prev))) return cur;
        prev = cur;
    }
    throw numerical_failure("numeric_sup_norm: refinement did not converge", k);
}

}  // namespace

double numeric_sup_norm(const MonotoneSpline& x, int k, int max_doublings) {
    std::vector<double> pts;
    for (const auto& term : x.terms) pts.push_back(-term.first);
    return numeric_sup_norm_impl(x, k, x.largest_knot(), pts, max_doublings);
}

double numeric_sup_norm(const AlternatingSpline& s, int k, int max_doublings) {
    std::vector<double> pts;
    for (double a : s.knots) pts.push_back(-a);
    return numeric_sup_norm_impl(s, k, s.knots.empty() ? 0.0 : s.knots.front(), pts,
                                 max_doublings);
}

std::string SuiteReport::summary() const {
    std::ostringstream os;
    os << "trials: " << trials << "\nfailures: " << failures
       << "\nworst binding margin: " << worst_margin << "\n";
    for (const auto& f : failure_list) {
        os << "  trial " << f.trial << " seed " << f.seed << " r " << f.r << " orders [";
        for (std::size_t i = 0; i < f.orders.size(); ++i)
            os << (i ? "," : "") << f.orders[i];
        os << "] norms [";
        for (std::size_t i = 0; i < f.norms.size(); ++i) os << (i ? "," : "") << f.norms[i];
        os << "] stage: " << f.stage << "\n";
    }
    return os.str();
}

SuiteReport comparison_suite(int trials, int max_r, int max_d, std::uint64_t seed, bool parallel) {
    if (trials < 1) throw std::invalid_argument("comparison_suite: trials must be >= 1");
    if (max_r < 2 || max_r > 12) throw std::invalid_argument("comparison_suite: max_r in [2, 12]");
    if (max_d < 2) throw std::invalid_argument("comparison_suite: max_d must be >= 2");

    std::vector<TrialFailure> slots(trials);
    std::vector<double> margins(trials, 0.0);

    parallel_for(
        trials,
        [&](std::int64_t trial) {
            const std::uint64_t ts = trial_seed(seed, static_cast<std::uint64_t>(trial));
            std::mt19937_64 rng(ts);
            TrialFailure fail;
            fail.trial = static_cast<int>(trial);
            fail.seed = ts;

            try {
                GeneratorConfig gc;
                gc.r = 2 + static_cast<int>(rng() % (max_r - 1));
                gc.pieces = 1 + static_cast<int>(rng() % 6);
                std::uint64_t derive = fail.seed;
                gc.seed = splitmix64(derive);
                MonotoneSpline x = generate(gc);

                const int d_cap = std::min(max_d, gc.r + 1);
                const int d = 2 + static_cast<int>(rng() % (d_cap - 1));
                std::vector<int> all(gc.r + 1);
                for (int i = 0; i <= gc.r; ++i) all[i] = i;
                std::shuffle(all.begin(), all.end(), rng);
                std::vector<int> orders(all.begin(), all.begin() + d);
                std::sort(orders.begin(), orders.end());
                // Alternate between the two regimes: highest order equal to r
                // on even trials, strictly below r on odd ones.
                if (trial % 2 == 0) {
                    orders.back() = gc.r;
                } else if (orders.back() == gc.r) {
                    for (int v = gc.r - 1; v >= 0; --v)
                        if (std::find(orders.begin(), orders.end(), v) == orders.end()) {
                            orders.back() = v;
                            break;
                        }
                    std::sort(orders.begin(), orders.end());
                }

                OrderSpec spec(gc.r, orders);
                std::vector<double> norms = measure_norms(x, spec);
                fail.r = gc.r;
                fail.orders = orders;
                fail.norms = norms;

                Verdict v = decide(spec, NormTargets(norms));
                if (!v.admissible) {
                    fail.stage = "decide returned inadmissible on measured norms";
                    slots[trial] = fail;
                    return;
                }
                margins[trial] = v.margins.empty() ? 0.0 : v.margins[0];

                ExtremalReport rep = extremal_check_all(x, v, spec);
                if (!rep.ok) {
                    for (const auto& e : rep.entries)
                        if (!e.pass)
                            fail.stage = "extremal sign check failed at order " +
                                         std::to_string(e.order);
                    slots[trial] = fail;
                    return;
                }

                if (v.type == SplineType::Type2 && orders[0] > 0 && v.witness) {
                    const double xw = x.norm(orders[0]);
                    const double ww = v.witness->norm(orders[0]);
                    if (xw > ww * (1.0 + 1e-6)) {
                        fail.stage = "Type2 witness below x at the lowest order with k1 > 0";
                        slots[trial] = fail;
                        return;
                    }
                }

                // Flip test: push the lowest target well below its stage
                // bound.  Skipped for d = 2 where every pair is admissible.
                if (d >= 3) {
                    const double bound = norms[0] - v.margins[0];
                    if (bound > 0.0) {
                        std::vector<double> low = norms;
                        low[0] = bound / 10.0;
                        Verdict flipped = decide(spec, NormTargets(low));
                        if (flipped.admissible) {
                            fail.stage = "perturbation below the stage bound stayed admissible";
                            slots[trial] = fail;
                            return;
                        }
                    }
                }
            } catch (const std::exception& e) {
                fail.stage = std::string("exception: ") + e.what();
                slots[trial] = fail;
                return;
            }
            fail.trial = -1;  // success marker
            slots[trial] = fail;
        },
        parallel);

    SuiteReport report;
    report.trials = trials;
    report.worst_margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < trials; ++i) {
        if (slots[i].trial >= 0) {
            ++report.failures;
            report.failure_list.push_back(slots[i]);
        } else {
            report.worst_margin = std::min(report.worst_margin, margins[i]);
        }
    }
    if (!std::isfinite(report.worst_margin)) report.worst_margin = 0.0;
    return report;
}

}  // namespace rmono
