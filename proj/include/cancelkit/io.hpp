#pragma once

// Operator JSON: {"n","k","dim_v","dim_e","terms":[{"alpha":[...],"matrix":[["p/q",...],...]}]}
// with optional "name" and "params". Rationals travel as strings.

#include "cancelkit/operators.hpp"

#include "json.hpp"

#include <stdexcept>
#include <string>

namespace cancelkit {

/// Malformed operator input; carries a position when the JSON itself is broken.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
        : std::runtime_error(what), line_(line), column_(column) {}
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

inline nlohmann::ordered_json operator_to_json(const OperatorSpec& op) {
    nlohmann::ordered_json j;
    j["n"] = op.n;
    j["k"] = op.k;
    j["dim_v"] = op.dim_v;
    j["dim_e"] = op.dim_e;
    auto terms = nlohmann::ordered_json::array();
    for (const auto& [alpha, a] : op.terms) {
        nlohmann::ordered_json t;
        t["alpha"] = alpha;
        auto rows = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < a.rows(); ++i) {
            auto row = nlohmann::ordered_json::array();
            for (std::size_t c = 0; c < a.cols(); ++c) row.push_back(to_string(a(i, c)));
            rows.push_back(row);
        }
        t["matrix"] = rows;
        terms.push_back(t);
    }
    j["terms"] = terms;
    if (!op.name.empty()) j["name"] = op.name;
    if (!op.params.empty()) {
        nlohmann::ordered_json p = nlohmann::ordered_json::object();
        for (const auto& [key, v] : op.params) p[key] = to_string(v);
        j["params"] = p;
    }
    return j;
}

inline std::string emit_operator(const OperatorSpec& op) { return operator_to_json(op).dump(2) + "\n"; }

namespace io_detail {

inline void line_column(const std::string& text, std::size_t byte, std::size_t& line, std::size_t& column) {
    line = 1;
    column = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
}

inline Rational rational(const nlohmann::ordered_json& v, const std::string& where) {
    if (v.is_string()) {
        try {
            return parse_rational(v.get<std::string>());
        } catch (const std::exception& e) {
            throw InputError(where + ": " + e.what());
        }
    }
    if (v.is_number_integer()) return Rational(v.get<long>());
    throw InputError(where + ": rational entries must be \"p/q\" strings or integers");
}

inline long integer(const nlohmann::ordered_json& j, const char* key) {
    if (!j.contains(key)) throw InputError(std::string("missing field \"") + key + "\"");
    const auto& v = j.at(key);
    if (!v.is_number_integer()) throw InputError(std::string("field \"") + key + "\" must be an integer");
    return v.get<long>();
}

}  // namespace io_detail

inline OperatorSpec operator_from_json(const std::string& text) {
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 0, column = 0;
        io_detail::line_column(text, e.byte, line, column);
        throw InputError("malformed JSON at line " + std::to_string(line) + ", column " + std::to_string(column), line, column);
    }
    if (!j.is_object()) throw InputError("operator JSON must be an object");

    OperatorSpec op;
    const long n = io_detail::integer(j, "n"), k = io_detail::integer(j, "k");
    const long dv = io_detail::integer(j, "dim_v"), de = io_detail::integer(j, "dim_e");
    if (n < 1 || n > detail::kMaxVars) throw InputError("n must lie in 1.." + std::to_string(detail::kMaxVars));
    if (k < 0) throw InputError("k must be nonnegative");
    if (dv < 1 || de < 1) throw InputError("dim_v and dim_e must be positive");
    op.n = static_cast<int>(n);
    op.k = static_cast<int>(k);
    op.dim_v = static_cast<std::size_t>(dv);
    op.dim_e = static_cast<std::size_t>(de);
    if (j.contains("name")) {
        if (!j["name"].is_string()) throw InputError("field \"name\" must be a string");
        op.name = j["name"].get<std::string>();
    }
    if (j.contains("params")) {
        if (!j["params"].is_object()) throw InputError("field \"params\" must be an object");
        for (const auto& [key, v] : j["params"].items()) op.params.emplace_back(key, io_detail::rational(v, "param " + key));
    }
    if (!j.contains("terms") || !j["terms"].is_array()) throw InputError("missing array field \"terms\"");

    std::size_t index = 0;
    for (const auto& t : j["terms"]) {
        const std::string where = "term " + std::to_string(index++);
        if (!t.is_object() || !t.contains("alpha") || !t.contains("matrix")) throw InputError(where + ": needs \"alpha\" and \"matrix\"");
        MultiIndex alpha;
        if (!t["alpha"].is_array()) throw InputError(where + ": alpha must be an array of integers");
        for (const auto& e : t["alpha"]) {
            if (!e.is_number_integer() || e.get<long>() < 0) throw InputError(where + ": alpha entries must be nonnegative integers");
            alpha.push_back(static_cast<int>(e.get<long>()));
        }
        const std::string named = where + " alpha=" + OperatorSpec::index_string(alpha);
        if (static_cast<long>(alpha.size()) != n) throw InputError(named + ": length " + std::to_string(alpha.size()) + " differs from n");
        if (degree_of(alpha) != k)
            throw InputError(named + ": |alpha| = " + std::to_string(degree_of(alpha)) + " but k = " + std::to_string(k) +
                             " (operator must be homogeneous)");
        const auto& m = t["matrix"];
        if (!m.is_array() || m.size() != op.dim_e) throw InputError(named + ": matrix must have dim_e rows");
        RatMatrix a(op.dim_e, op.dim_v);
        for (std::size_t r = 0; r < op.dim_e; ++r) {
            if (!m[r].is_array() || m[r].size() != op.dim_v) throw InputError(named + ": matrix rows must have dim_v entries");
            for (std::size_t c = 0; c < op.dim_v; ++c)
                a(r, c) = io_detail::rational(m[r][c], named + " entry (" + std::to_string(r) + "," + std::to_string(c) + ")");
        }
        if (!op.terms.emplace(alpha, std::move(a)).second) throw InputError(named + ": duplicate multi-index");
    }
    if (op.terms.empty()) throw InputError("operator has no terms");
    try {
        op.validate(true);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    return op;
}

}  // namespace cancelkit
