#include "rmono/io.hpp"

#include <utility>

namespace rmono {

using nlohmann::json;

namespace {

const json& require(const json& j, const char* field) {
    if (!j.is_object()) throw std::invalid_argument("expected an object");
    auto it = j.find(field);
    if (it == j.end())
        throw std::invalid_argument(std::string("missing field '") + field + "'");
    return *it;
}

double as_number(const json& j, const char* field) {
    if (!j.is_number())
        throw std::invalid_argument(std::string("field '") + field + "' must be a number");
    return j.get<double>();
}

int as_int(const json& j, const char* field) {
    if (!j.is_number_integer())
        throw std::invalid_argument(std::string("field '") + field + "' must be an integer");
    return j.get<int>();
}

std::vector<double> as_numbers(const json& j, const char* field) {
    if (!j.is_array())
        throw std::invalid_argument(std::string("field '") + field + "' must be an array");
    std::vector<double> out;
    for (const auto& e : j) out.push_back(as_number(e, field));
    return out;
}

std::vector<int> as_ints(const json& j, const char* field) {
    if (!j.is_array())
        throw std::invalid_argument(std::string("field '") + field + "' must be an array");
    std::vector<int> out;
    for (const auto& e : j) out.push_back(as_int(e, field));
    return out;
}

}  // namespace

json to_json(const AlternatingSpline& s) {
    return json{{"r", s.r}, {"l", s.l}, {"knots", s.knots}, {"constant", s.constant}};
}

AlternatingSpline spline_from_json(const json& j) {
    const int r = as_int(require(j, "r"), "r");
    const double l = as_number(require(j, "l"), "l");
    std::vector<double> knots = as_numbers(require(j, "knots"), "knots");
    double constant = 0.0;
    if (j.contains("constant")) constant = as_number(j.at("constant"), "constant");
    try {
        return AlternatingSpline(r, l, std::move(knots), constant);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("spline document: ") + e.what());
    }
}

json to_json(const MonotoneSpline& x) {
    json terms = json::array();
    for (const auto& t : x.terms) terms.push_back(json::array({t.first, t.second}));
    return json{{"r", x.r}, {"terms", terms}, {"constant", x.constant}};
}

MonotoneSpline monotone_from_json(const json& j) {
    if (j.contains("terms")) {
        const int r = as_int(require(j, "r"), "r");
        const json& jt = j.at("terms");
        if (!jt.is_array()) throw std::invalid_argument("field 'terms' must be an array");
        std::vector<std::pair<double, double>> terms;
        for (const auto& e : jt) {
            if (!e.is_array() || e.size() != 2)
                throw std::invalid_argument("field 'terms' entries must be [knot, coefficient]");
            terms.emplace_back(as_number(e[0], "terms"), as_number(e[1], "terms"));
        }
        double constant = 0.0;
        if (j.contains("constant")) constant = as_number(j.at("constant"), "constant");
        try {
            return MonotoneSpline(r, std::move(terms), constant);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(std::string("spline document: ") + e.what());
        }
    }
    return as_monotone(spline_from_json(j));
}

json to_json(const Verdict& v) {
    json j{{"admissible", v.admissible},
           {"type", to_string(v.type)},
           {"binding_stage", v.binding_stage},
           {"margins", v.margins},
           {"certainty", to_string(v.certainty)}};
    if (v.witness) j["witness"] = to_json(*v.witness);
    return j;
}

Verdict verdict_from_json(const json& j) {
    Verdict v;
    const json& adm = require(j, "admissible");
    if (!adm.is_boolean())
        throw std::invalid_argument("field 'admissible' must be a boolean");
    v.admissible = adm.get<bool>();
    const json& jt = require(j, "type");
    if (!jt.is_string()) throw std::invalid_argument("field 'type' must be a string");
    const std::string t = jt.get<std::string>();
    if (t == "Type1")
        v.type = SplineType::Type1;
    else if (t == "Type2")
        v.type = SplineType::Type2;
    else if (t == "Type3")
        v.type = SplineType::Type3;
    else if (t == "none")
        v.type = SplineType::None;
    else
        throw std::invalid_argument("field 'type': unknown value '" + t + "'");
    v.binding_stage = as_int(require(j, "binding_stage"), "binding_stage");
    v.margins = as_numbers(require(j, "margins"), "margins");
    const json& jc = require(j, "certainty");
    if (!jc.is_string()) throw std::invalid_argument("field 'certainty' must be a string");
    v.certainty = jc.get<std::string>() == "certain" ? Certainty::Certain
                                                     : Certainty::BoundaryAtTolerance;
    if (j.contains("witness")) v.witness = spline_from_json(j.at("witness"));
    return v;
}

ProblemDocument problem_from_json(const json& j) {
    ProblemDocument p;
    p.r = as_int(require(j, "r"), "r");
    p.orders = as_ints(require(j, "orders"), "orders");
    p.norms = as_numbers(require(j, "norms"), "norms");
    if (j.contains("tolerance"))
        p.config.equality_tolerance = as_number(j.at("tolerance"), "tolerance");
    if (j.contains("limit_factor"))
        p.config.limit_factor = as_number(j.at("limit_factor"), "limit_factor");
    if (j.contains("limit_max_stages"))
        p.config.limit_max_stages = as_int(j.at("limit_max_stages"), "limit_max_stages");

    // Surface invariant violations with the offending field named.
    for (std::size_t i = 1; i < p.orders.size(); ++i)
        if (p.orders[i] <= p.orders[i - 1])
            throw std::invalid_argument("field 'orders': must be strictly increasing");
    if (!p.orders.empty() && (p.orders.front() < 0 || p.orders.back() > p.r))
        throw std::invalid_argument("field 'orders': must lie in [0, r]");
    if (p.orders.size() < 2)
        throw std::invalid_argument("field 'orders': need at least two orders");
    if (p.norms.size() != p.orders.size())
        throw std::invalid_argument("field 'norms': must match 'orders' in length");
    for (double m : p.norms)
        if (!(m > 0.0)) throw std::invalid_argument("field 'norms': values must be positive");
    try {
        p.config.validate();
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("field 'tolerance': ") + e.what());
    }
    return p;
}

json to_json(const ProblemDocument& p) {
    return json{{"r", p.r},
                {"orders", p.orders},
                {"norms", p.norms},
                {"tolerance", p.config.equality_tolerance},
                {"limit_factor", p.config.limit_factor},
                {"limit_max_stages", p.config.limit_max_stages}};
}

ProblemDocument parse_problem(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("problem document: ") + e.what());
    }
    return problem_from_json(j);
}

}  // namespace rmono
