// Compares the serial reference path against the OpenMP path on the two
// embarrassingly parallel workloads: property-suite trials and boundary scans.
#include <chrono>
#include <cstdio>
#include <vector>

#include "rmono/io.hpp"
#include "rmono/oracle.hpp"
#include "rmono/parallel.hpp"

using namespace rmono;
using clock_type = std::chrono::steady_clock;

static double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

static double run_suite(int trials, bool parallel) {
    const auto t0 = clock_type::now();
    SuiteReport rep = comparison_suite(trials, 5, 4, /*seed=*/42, parallel);
    const double dt = seconds_since(t0);
    if (rep.failures != 0) std::printf("  warning: %d suite failures\n", rep.failures);
    return dt;
}

static double run_scan(int steps, bool parallel) {
    OrderSpec spec(3, {0, 1, 2, 3});
    const auto t0 = clock_type::now();
    std::vector<char> out(steps);
    parallel_for(
        steps,
        [&](std::int64_t i) {
            const double m0 = 0.05 + 0.5 * static_cast<double>(i) / (steps - 1);
            Verdict v = decide(spec, NormTargets({m0, 0.6, 1.0, 1.0}));
            out[i] = v.admissible ? 1 : 0;
        },
        parallel);
    return seconds_since(t0);
}

int main() {
    std::printf("threads available: %d\n", max_threads());

    const int trials = 400;
    std::printf("property suite, %d trials\n", trials);
    const double ts = run_suite(trials, false);
    std::printf("  serial:   %8.3f s\n", ts);
    const double tp = run_suite(trials, true);
    std::printf("  parallel: %8.3f s  (speedup %.2fx)\n", tp, ts / tp);

    const int steps = 2000;
    std::printf("boundary scan, %d rows\n", steps);
    const double ss = run_scan(steps, false);
    std::printf("  serial:   %8.3f s\n", ss);
    const double sp = run_scan(steps, true);
    std::printf("  parallel: %8.3f s  (speedup %.2fx)\n", sp, ss / sp);
    return 0;
}
