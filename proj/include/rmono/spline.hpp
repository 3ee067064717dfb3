#ifndef RMONO_SPLINE_HPP
#define RMONO_SPLINE_HPP

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace rmono {

// Exact integer factorial, converted to double.  Orders above 30 are
// rejected project-wide to stay clear of precision cliffs.
double factorial(int n);

inline constexpr int kMaxOrder = 30;

/// Derivative-order selection: r plus strictly increasing orders k_1 < ... < k_d
/// within [0, r], d >= 2.
struct OrderSpec {
    int r;
    std::vector<int> orders;

    OrderSpec(int r_, std::vector<int> orders_);

    int dim() const { return static_cast<int>(orders.size()); }
    bool highest_is_r() const { return orders.back() == r; }
};

/// Positive norm targets aligned with an OrderSpec.
struct NormTargets {
    std::vector<double> values;

    explicit NormTargets(std::vector<double> values_);
};

/// Amplitude/dilation action x -> alpha * x(lambda * t).
/// Multiplies the k-th derivative norm by alpha * lambda^k.
struct ScaleTransform {
    double alpha = 1.0;
    double lambda = 1.0;

    ScaleTransform() = default;
    ScaleTransform(double a, double la);
    ScaleTransform inverse() const { return ScaleTransform(1.0 / alpha, 1.0 / lambda); }
};

/// Spline of order r on the negative half-line with alternating +-l/r!
/// coefficients at knots -a_1 < ... < -a_s < 0, plus a constant C >= 0:
///
///   phi(t) = C + (l/r!) * sum_j (-1)^{j+1} (t + a_j)_+^r
///
/// Knots are stored as the magnitudes a_1 > a_2 > ... > a_s > 0.
struct AlternatingSpline {
    int r;
    double l;
    std::vector<double> knots;  // strictly decreasing, positive
    double constant = 0.0;

    AlternatingSpline(int r_, double l_, std::vector<double> knots_, double constant_ = 0.0);

    int knot_count() const { return static_cast<int>(knots.size()); }

    // k-th derivative at t <= 0; right-continuous at knots for k = r.
    double eval_derivative(int k, double t) const;

    // Closed-form uniform norm of the k-th derivative.
    double norm(int k) const;
};

/// General r-monotone truncated-power combination
///   x(t) = C + sum_j c_j (t + b_j)_+^r / r!
/// with b_1 > ... > b_m > 0 and every coefficient prefix sum >= 0.
struct MonotoneSpline {
    int r;
    std::vector<std::pair<double, double>> terms;  // (knot magnitude b_j, coefficient c_j)
    double constant = 0.0;

    MonotoneSpline(int r_, std::vector<std::pair<double, double>> terms_, double constant_ = 0.0);

    double eval_derivative(int k, double t) const;

    // sup |x^(k)|: value at 0 for k < r, maximal coefficient prefix sum for k = r.
    double norm(int k) const;

    double largest_knot() const { return terms.empty() ? 0.0 : terms.front().first; }
};

std::vector<double> closed_form_norms(const AlternatingSpline& s, const OrderSpec& spec);
std::vector<double> measure_norms(const MonotoneSpline& x, const OrderSpec& spec);

AlternatingSpline rescale(const AlternatingSpline& s, const ScaleTransform& t);
MonotoneSpline rescale(const MonotoneSpline& x, const ScaleTransform& t);

/// Reinterpret an alternating spline as the equivalent MonotoneSpline
/// (coefficients (-1)^{j+1} l).
MonotoneSpline as_monotone(const AlternatingSpline& s);

struct MonotonicityReport {
    bool ok = true;
    int level = -1;       // derivative order of the first violation
    double at = 0.0;      // grid point of the first violation
    double value = 0.0;   // offending (negative) value
};

MonotonicityReport validate_r_monotone(const MonotoneSpline& x, int grid_size = 10001);
MonotonicityReport validate_r_monotone(const AlternatingSpline& s, int grid_size = 10001);

}  // namespace rmono

#endif
