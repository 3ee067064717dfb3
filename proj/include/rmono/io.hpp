#ifndef RMONO_IO_HPP
#define RMONO_IO_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "rmono/admissibility.hpp"
#include "rmono/spline.hpp"

namespace rmono {

/// Problem instance as parsed from a document or inline flags.
struct ProblemDocument {
    int r = 0;
    std::vector<int> orders;
    std::vector<double> norms;
    DecisionConfig config;
};

nlohmann::json to_json(const AlternatingSpline& s);
AlternatingSpline spline_from_json(const nlohmann::json& j);

/// Either an alternating spline ({r, l, knots, constant}) or a general
/// truncated-power combination ({r, terms, constant}).
MonotoneSpline monotone_from_json(const nlohmann::json& j);
nlohmann::json to_json(const MonotoneSpline& x);

nlohmann::json to_json(const Verdict& v);
Verdict verdict_from_json(const nlohmann::json& j);

ProblemDocument problem_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ProblemDocument& p);

/// Parse with a field-precise error message on violations.
ProblemDocument parse_problem(const std::string& text);

}  // namespace rmono

#endif
