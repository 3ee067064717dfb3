#include "rmono/spline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace rmono {

double factorial(int n) {
    if (n < 0 || n > kMaxOrder)
        throw std::invalid_argument("factorial: order out of supported range [0, 30]");
    unsigned __int128 f = 1;
    for (int i = 2; i <= n; ++i) f *= static_cast<unsigned>(i);
    return static_cast<double>(f);
}

namespace {

void check_order(int r) {
    if (r < 1 || r > kMaxOrder)
        throw std::invalid_argument("spline order r must be in [1, 30]");
}

// (u)_+^n with the right-continuous convention at u = 0 for n = 0.
double trunc_pow(double u, int n) {
    if (n == 0) return u >= 0.0 ? 1.0 : 0.0;
    return u > 0.0 ? std::pow(u, n) : 0.0;
}

}  // namespace

OrderSpec::OrderSpec(int r_, std::vector<int> orders_) : r(r_), orders(std::move(orders_)) {
    check_order(r);
    if (orders.size() < 2) throw std::invalid_argument("OrderSpec: need at least two orders");
    for (std::size_t i = 0; i < orders.size(); ++i) {
        if (orders[i] < 0 || orders[i] > r)
            throw std::invalid_argument("OrderSpec: order outside [0, r]");
        if (i > 0 && orders[i] <= orders[i - 1])
            throw std::invalid_argument("OrderSpec: orders must be strictly increasing");
    }
}

NormTargets::NormTargets(std::vector<double> values_) : values(std::move(values_)) {
    for (double v : values)
        if (!(v > 0.0)) throw std::invalid_argument("NormTargets: values must be strictly positive");
}

ScaleTransform::ScaleTransform(double a, double la) : alpha(a), lambda(la) {
    if (!(alpha > 0.0) || !(lambda > 0.0))
        throw std::invalid_argument("ScaleTransform: factors must be positive");
}

AlternatingSpline::AlternatingSpline(int r_, double l_, std::vector<double> knots_, double constant_)
    : r(r_), l(l_), knots(std::move(knots_)), constant(constant_) {
    check_order(r);
    if (!(l > 0.0)) throw std::invalid_argument("AlternatingSpline: l must be positive");
    if (constant < 0.0) throw std::invalid_argument("AlternatingSpline: constant must be >= 0");
    for (std::size_t j = 0; j < knots.size(); ++j) {
        if (!(knots[j] > 0.0)) throw std::invalid_argument("AlternatingSpline: knots must be positive");
        if (j > 0 && !(knots[j] < knots[j - 1]))
            throw std::invalid_argument("AlternatingSpline: knots must be strictly decreasing");
    }
}

double AlternatingSpline::eval_derivative(int k, double t) const {
    if (k < 0 || k > r) throw std::invalid_argument("eval_derivative: k outside [0, r]");
    if (k == r) {
        double sign_sum = 0.0;
        for (std::size_t j = 0; j < knots.size(); ++j)
            if (t + knots[j] >= 0.0) sign_sum += (j % 2 == 0) ? 1.0 : -1.0;
        return l * sign_sum;
    }
    double acc = (k == 0) ? constant : 0.0;
    const double scale = l / factorial(r - k);
    for (std::size_t j = 0; j < knots.size(); ++j) {
        const double term = scale * trunc_pow(t + knots[j], r - k);
        acc += (j % 2 == 0) ? term : -term;
    }
    return acc;
}

double AlternatingSpline::norm(int k) const {
    if (k < 0 || k > r) throw std::invalid_argument("norm: k outside [0, r]");
    if (k == r) return knots.empty() ? 0.0 : l;
    double acc = 0.0;
    for (std::size_t j = 0; j < knots.size(); ++j) {
        const double term = std::pow(knots[j], r - k);
        acc += (j % 2 == 0) ? term : -term;
    }
    double value = l / factorial(r - k) * acc;
    if (k == 0) value += constant;
    return value;
}

MonotoneSpline::MonotoneSpline(int r_, std::vector<std::pair<double, double>> terms_, double constant_)
    : r(r_), terms(std::move(terms_)), constant(constant_) {
    check_order(r);
    if (constant < 0.0) throw std::invalid_argument("MonotoneSpline: constant must be >= 0");
    for (std::size_t j = 0; j < terms.size(); ++j) {
        if (!(terms[j].first > 0.0))
            throw std::invalid_argument("MonotoneSpline: knot magnitudes must be positive");
        if (j > 0 && !(terms[j].first < terms[j - 1].first))
            throw std::invalid_argument("MonotoneSpline: knots must be strictly decreasing");
    }
}

double MonotoneSpline::eval_derivative(int k, double t) const {
    if (k < 0 || k > r) throw std::invalid_argument("eval_derivative: k outside [0, r]");
    if (k == r) {
        double acc = 0.0;
        for (const auto& [b, c] : terms)
            if (t + b >= 0.0) acc += c;
        return acc;
    }
    double acc = (k == 0) ? constant : 0.0;
    const double scale = 1.0 / factorial(r - k);
    for (const auto& [b, c] : terms) acc += c * scale * trunc_pow(t + b, r - k);
    return acc;
}

double MonotoneSpline::norm(int k) const {
    if (k < 0 || k > r) throw std::invalid_argument("norm: k outside [0, r]");
    if (k < r) return eval_derivative(k, 0.0);
    double prefix = 0.0, best = 0.0;
    for (const auto& [b, c] : terms) {
        prefix += c;
        best = std::max(best, prefix);
    }
    return best;
}

std::vector<double> closed_form_norms(const AlternatingSpline& s, const OrderSpec& spec) {
    if (spec.r != s.r) throw std::invalid_argument("closed_form_norms: order mismatch");
    std::vector<double> out;
    out.reserve(spec.orders.size());
    for (int k : spec.orders) out.push_back(s.norm(k));
    return out;
}

std::vector<double> measure_norms(const MonotoneSpline& x, const OrderSpec& spec) {
    if (spec.r != x.r) throw std::invalid_argument("measure_norms: order mismatch");
    std::vector<double> out;
    out.reserve(spec.orders.size());
    for (int k : spec.orders) out.push_back(x.norm(k));
    return out;
}

AlternatingSpline rescale(const AlternatingSpline& s, const ScaleTransform& t) {
    std::vector<double> knots = s.knots;
    for (double& a : knots) a /= t.lambda;
    return AlternatingSpline(s.r, s.l * t.alpha * std::pow(t.lambda, s.r), std::move(knots),
                             s.constant * t.alpha);
}

MonotoneSpline rescale(const MonotoneSpline& x, const ScaleTransform& t) {
    std::vector<std::pair<double, double>> terms = x.terms;
    const double cf = t.alpha * std::pow(t.lambda, x.r);
    for (auto& [b, c] : terms) {
        b /= t.lambda;
        c *= cf;
    }
    return MonotoneSpline(x.r, std::move(terms), x.constant * t.alpha);
}

MonotoneSpline as_monotone(const AlternatingSpline& s) {
    std::vector<std::pair<double, double>> terms;
    terms.reserve(s.knots.size());
    for (std::size_t j = 0; j < s.knots.size(); ++j)
        terms.emplace_back(s.knots[j], (j % 2 == 0) ? s.l : -s.l);
    return MonotoneSpline(s.r, std::move(terms), s.constant);
}

namespace {

MonotonicityReport scan_grid(const MonotoneSpline& x, int grid_size) {
    if (grid_size < 2) throw std::invalid_argument("validate_r_monotone: grid_size must be >= 2");
    MonotonicityReport rep;
    const double left = -(x.largest_knot() + 1.0);
    const double tol = 1e-12 * std::max(1.0, std::abs(x.norm(0)));
    for (int k = 0; k <= x.r; ++k) {
        for (int i = 0; i < grid_size; ++i) {
            const double t = left + (0.0 - left) * i / (grid_size - 1);
            const double v = x.eval_derivative(k, t);
            if (v < -tol) {
                rep.ok = false;
                rep.level = k;
                rep.at = t;
                rep.value = v;
                return rep;
            }
        }
    }
    return rep;
}

}  // namespace

MonotonicityReport validate_r_monotone(const MonotoneSpline& x, int grid_size) {
    return scan_grid(x, grid_size);
}

MonotonicityReport validate_r_monotone(const AlternatingSpline& s, int grid_size) {
    return scan_grid(as_monotone(s), grid_size);
}

}  // namespace rmono
