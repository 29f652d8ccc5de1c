#include "jetgeo/specfile.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include "json.hpp"

namespace jetgeo {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw SpecError(path + ": " + msg);
}

void reject_unknown_keys(const json& obj, const std::string& path,
                         std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed)
            if (item.key() == key) {
                known = true;
                break;
            }
        if (!known) fail(path, "unknown key '" + item.key() + "'");
    }
}

const json& require(const json& obj, const std::string& path, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) fail(path, "missing required key '" + std::string(key) + "'");
    return *it;
}

double number_at(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

int integer_at(const json& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<int>();
}

/// Expression: a string in the library grammar, or a bare number.
Expr expr_at(const json& v, const std::string& path) {
    if (v.is_number()) return Expr::constant(v.get<double>());
    if (!v.is_string()) fail(path, "expected an expression string or number");
    try {
        return parse(v.get<std::string>());
    } catch (const ParseError& e) {
        fail(path, e.what());
    }
}

ExprVector expr_vector_at(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array of expressions");
    ExprVector out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(expr_at(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

ExprMatrix expr_matrix_at(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array of expression rows");
    ExprMatrix out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(expr_vector_at(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

Vector vector_at(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array of numbers");
    Vector out(static_cast<int>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i)
        out(static_cast<int>(i)) = number_at(v[i], path + "[" + std::to_string(i) + "]");
    return out;
}

SystemSpec parse_system(const json& sys, const std::string& path) {
    if (!sys.is_object()) fail(path, "expected an object");
    const json& kind_v = require(sys, path, "kind");
    if (!kind_v.is_string()) fail(path + ".kind", "expected a string");
    const std::string kind = kind_v.get<std::string>();

    SystemSpec out;
    if (kind == "generic") {
        reject_unknown_keys(sys, path, {"kind", "n", "X"});
        out = build_generic(expr_vector_at(require(sys, path, "X"), path + ".X"));
    } else if (kind == "linear") {
        reject_unknown_keys(sys, path, {"kind", "n", "A", "f"});
        ExprMatrix A = expr_matrix_at(require(sys, path, "A"), path + ".A");
        if (const auto it = sys.find("f"); it != sys.end())
            out = build_linear(std::move(A), expr_vector_at(*it, path + ".f"));
        else
            out = build_linear(std::move(A));
    } else if (kind == "sode") {
        reject_unknown_keys(sys, path, {"kind", "n", "order", "f"});
        const int order = integer_at(require(sys, path, "order"), path + ".order");
        out = build_sode(order, expr_at(require(sys, path, "f"), path + ".f"));
    } else if (kind == "nhlsode") {
        reject_unknown_keys(sys, path, {"kind", "n", "a", "b"});
        ExprVector a = expr_vector_at(require(sys, path, "a"), path + ".a");
        Expr b = Expr::constant(0.0);
        if (const auto it = sys.find("b"); it != sys.end()) b = expr_at(*it, path + ".b");
        out = build_nhlsode(std::move(a), std::move(b));
    } else {
        fail(path + ".kind",
             "unknown system kind '" + kind +
                 "' (expected generic, linear, sode, or nhlsode)");
    }

    if (const auto it = sys.find("n"); it != sys.end()) {
        const int n = integer_at(*it, path + ".n");
        if (n != out.n)
            fail(path + ".n", "declared dimension " + std::to_string(n) +
                                  " does not match the system's " + std::to_string(out.n));
    }
    return out;
}

MetricPair parse_metric(const json& v, const std::string& path, int n) {
    if (!v.is_object()) fail(path, "expected an object");
    reject_unknown_keys(v, path, {"h", "phi"});
    MetricPair euclid = MetricPair::euclidean(n);
    Expr h = euclid.h;
    ExprMatrix phi = euclid.phi;
    if (const auto it = v.find("h"); it != v.end()) h = expr_at(*it, path + ".h");
    if (const auto it = v.find("phi"); it != v.end())
        phi = expr_matrix_at(*it, path + ".phi");
    try {
        return MetricPair(std::move(h), std::move(phi));
    } catch (const MetricError& e) {
        fail(path, e.what());
    }
}

EvalPoint parse_point(const json& v, const std::string& path, int n) {
    if (!v.is_object()) fail(path, "expected an object");
    reject_unknown_keys(v, path, {"t", "x", "x1"});
    EvalPoint p;
    p.t = number_at(require(v, path, "t"), path + ".t");
    p.x = vector_at(require(v, path, "x"), path + ".x");
    if (p.x.size() != n)
        fail(path + ".x", "expected " + std::to_string(n) + " components");
    if (const auto it = v.find("x1"); it != v.end()) {
        p.x1 = vector_at(*it, path + ".x1");
        p.x1_given = true;
        if (p.x1.size() != n)
            fail(path + ".x1", "expected " + std::to_string(n) + " components");
    } else {
        p.x1 = Vector::Zero(n);
    }
    return p;
}

} // namespace

SpecDocument parse_spec(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw SpecError(std::string("spec JSON: ") + e.what());
    }
    if (!root.is_object()) throw SpecError("spec: top level must be an object");
    reject_unknown_keys(root, "spec",
                        {"system", "metric", "parameters", "points", "options"});

    SpecDocument doc;
    doc.system = parse_system(require(root, "spec", "system"), "system");

    if (const auto it = root.find("metric"); it != root.end())
        doc.metric = parse_metric(*it, "metric", doc.system.n);
    else
        doc.metric = MetricPair::euclidean(doc.system.n);
    if (doc.metric.n != doc.system.n)
        throw SpecError("metric: dimension " + std::to_string(doc.metric.n) +
                        " does not match the system's " + std::to_string(doc.system.n));

    if (const auto it = root.find("parameters"); it != root.end()) {
        if (!it->is_object()) throw SpecError("parameters: expected an object");
        for (const auto& item : it->items()) {
            if (is_variable_name(item.key()))
                throw SpecError("parameters: '" + item.key() +
                                "' is a coordinate, not a parameter");
            doc.parameters[item.key()] =
                number_at(item.value(), "parameters." + item.key());
        }
    }

    if (const auto it = root.find("points"); it != root.end()) {
        if (!it->is_array()) throw SpecError("points: expected an array");
        for (std::size_t i = 0; i < it->size(); ++i)
            doc.points.push_back(parse_point(
                (*it)[i], "points[" + std::to_string(i) + "]", doc.system.n));
    }

    if (const auto it = root.find("options"); it != root.end()) {
        if (!it->is_object()) throw SpecError("options: expected an object");
        reject_unknown_keys(*it, "options", {"symbolic", "tolerance"});
        if (const auto s = it->find("symbolic"); s != it->end()) {
            if (!s->is_boolean()) throw SpecError("options.symbolic: expected a boolean");
            doc.options.symbolic = s->get<bool>();
        }
        if (const auto tol = it->find("tolerance"); tol != it->end()) {
            doc.options.tolerance = number_at(*tol, "options.tolerance");
            if (doc.options.tolerance <= 0.0)
                throw SpecError("options.tolerance: must be positive");
            doc.options.tolerance_given = true;
        }
    }

    return doc;
}

SpecDocument load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot open spec file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_spec(buffer.str());
}

} // namespace jetgeo
