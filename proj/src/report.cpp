#include "jetgeo/report.hpp"

#include <charconv>
#include <cstdio>

#include "jetgeo/jetcore.hpp"

namespace jetgeo {

namespace {

void append_number(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

void append_string(std::string& out, const std::string& s) {
    out += '"';
    for (const char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    out += '"';
}

void append_vector(std::string& out, const Vector& v) {
    out += '[';
    for (int i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        append_number(out, v(i));
    }
    out += ']';
}

void append_matrix(std::string& out, const Matrix& m) {
    out += '[';
    for (int i = 0; i < m.rows(); ++i) {
        if (i) out += ", ";
        out += '[';
        for (int j = 0; j < m.cols(); ++j) {
            if (j) out += ", ";
            append_number(out, m(i, j));
        }
        out += ']';
    }
    out += ']';
}

void append_tensor3(std::string& out, const Tensor3& t) {
    out += '[';
    for (int i = 0; i < t.n; ++i) {
        if (i) out += ", ";
        out += '[';
        for (int j = 0; j < t.n; ++j) {
            if (j) out += ", ";
            out += '[';
            for (int k = 0; k < t.n; ++k) {
                if (k) out += ", ";
                append_number(out, t(i, j, k));
            }
            out += ']';
        }
        out += ']';
    }
    out += ']';
}

void append_tensor4(std::string& out, const Tensor4& t) {
    out += '[';
    for (int l = 0; l < t.n; ++l) {
        if (l) out += ", ";
        out += '[';
        for (int i = 0; i < t.n; ++i) {
            if (i) out += ", ";
            out += '[';
            for (int j = 0; j < t.n; ++j) {
                if (j) out += ", ";
                out += '[';
                for (int k = 0; k < t.n; ++k) {
                    if (k) out += ", ";
                    append_number(out, t(l, i, j, k));
                }
                out += ']';
            }
            out += ']';
        }
        out += ']';
    }
    out += ']';
}

void append_matrix_list(std::string& out, const std::vector<Matrix>& ms) {
    out += '[';
    for (std::size_t k = 0; k < ms.size(); ++k) {
        if (k) out += ", ";
        append_matrix(out, ms[k]);
    }
    out += ']';
}

void append_expr_matrix(std::string& out, const ExprMatrix& m) {
    out += '[';
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (i) out += ", ";
        out += '[';
        for (std::size_t j = 0; j < m[i].size(); ++j) {
            if (j) out += ", ";
            append_string(out, m[i][j].str());
        }
        out += ']';
    }
    out += ']';
}

const char* kind_name(SystemKind kind) {
    switch (kind) {
        case SystemKind::Linear: return "linear";
        case SystemKind::Sode: return "sode";
        case SystemKind::Nhlsode: return "nhlsode";
        case SystemKind::Generic: break;
    }
    return "generic";
}

} // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string render_report(const SpecDocument& doc) {
    const JetGeometry geo(doc.system, doc.metric, doc.parameters);
    const int n = doc.system.n;

    std::string out;
    out += "{\n";

    out += "  \"system\": {\"kind\": ";
    append_string(out, kind_name(doc.system.kind));
    out += ", \"n\": " + std::to_string(n) + ", \"X\": [";
    for (int i = 0; i < n; ++i) {
        if (i) out += ", ";
        append_string(out, doc.system.X[i].str());
    }
    out += "]},\n";

    out += "  \"metric\": {\"euclidean\": ";
    out += doc.metric.is_euclidean() ? "true" : "false";
    out += ", \"h\": ";
    append_string(out, doc.metric.h.str());
    out += ", \"phi\": [";
    for (int i = 0; i < n; ++i) {
        if (i) out += ", ";
        out += '[';
        for (int j = 0; j < n; ++j) {
            if (j) out += ", ";
            append_string(out, doc.metric.phi[i][j].str());
        }
        out += ']';
    }
    out += "]},\n";

    out += "  \"parameters\": {";
    bool first = true;
    for (const auto& [name, value] : doc.parameters) {
        if (!first) out += ", ";
        first = false;
        append_string(out, name);
        out += ": ";
        append_number(out, value);
    }
    out += "},\n";

    out += "  \"points\": [";
    for (std::size_t idx = 0; idx < doc.points.size(); ++idx) {
        const EvalPoint& ep = doc.points[idx];
        const JetPoint p{ep.t, ep.x, ep.x1};
        const GeometryReport r = geo.full_report(p);

        out += idx ? ",\n    {\n" : "\n    {\n";
        out += "      \"point\": {\"t\": ";
        append_number(out, ep.t);
        out += ", \"x\": ";
        append_vector(out, ep.x);
        out += ", \"x1\": ";
        append_vector(out, ep.x1);
        out += "},\n";

        out += "      \"M\": ";
        append_vector(out, r.M);
        out += ",\n      \"N\": ";
        append_matrix(out, r.N);
        out += ",\n      \"cartan\": {\"temporal\": ";
        append_number(out, r.cartan.temporal);
        out += ", \"temporal_mixed\": ";
        append_number(out, r.cartan.temporal_mixed);
        out += ", \"spatial\": ";
        append_tensor3(out, r.cartan.spatial);
        out += ", \"vertical\": ";
        append_number(out, r.cartan.vertical);
        out += "},\n      \"R_temporal\": ";
        append_matrix(out, r.R_temporal);
        out += ",\n      \"R_spatial\": ";
        append_matrix_list(out, r.R_spatial);
        out += ",\n      \"curvature\": ";
        append_tensor4(out, r.curvature);
        out += ",\n      \"F\": ";
        append_matrix(out, r.F);
        out += ",\n      \"maxwell_residual_1\": ";
        append_matrix(out, r.maxwell_residual_1);
        out += ",\n      \"maxwell_residual_2\": ";
        append_tensor3(out, r.maxwell_residual_2);
        out += ",\n      \"eym\": ";
        append_number(out, r.eym);
        out += "\n    }";
    }
    out += doc.points.empty() ? "]" : "\n  ]";

    if (doc.options.symbolic) {
        out += ",\n  \"symbolic\": {\"N\": ";
        append_expr_matrix(out, geo.nonlinear_connection_exprs());
        out += ", \"F\": ";
        append_expr_matrix(out, geo.em_form_exprs());
        out += "}";
    }

    out += "\n}\n";
    return out;
}

GridSpec parse_grid(const std::string& text, int n) {
    std::vector<GridAxis> parsed;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find(';', start);
        if (end == std::string::npos) end = text.size();
        const std::string part = text.substr(start, end - start);
        if (part.empty())
            throw SpecError("grid: empty axis in '" + text + "'");

        const auto eq = part.find('=');
        if (eq == std::string::npos)
            throw SpecError("grid axis '" + part + "': expected name=lo:hi:count");
        GridAxis axis;
        axis.name = part.substr(0, eq);
        const std::string range = part.substr(eq + 1);
        const auto c1 = range.find(':');
        const auto c2 = c1 == std::string::npos ? std::string::npos
                                                : range.find(':', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw SpecError("grid axis '" + part + "': expected name=lo:hi:count");

        const auto parse_num = [&part](const std::string& token, double& value) {
            const char* first = token.data();
            const char* last = first + token.size();
            const auto [ptr, ec] = std::from_chars(first, last, value);
            if (ec != std::errc{} || ptr != last)
                throw SpecError("grid axis '" + part + "': bad number '" + token + "'");
        };
        double count_value = 0.0;
        parse_num(range.substr(0, c1), axis.lo);
        parse_num(range.substr(c1 + 1, c2 - c1 - 1), axis.hi);
        parse_num(range.substr(c2 + 1), count_value);
        axis.count = static_cast<int>(count_value);
        if (axis.count < 1 || axis.count != count_value)
            throw SpecError("grid axis '" + part + "': count must be a positive integer");
        if (axis.count == 1 && axis.lo != axis.hi)
            throw SpecError("grid axis '" + part + "': single-point axis needs lo == hi");
        if (axis.count > 1 && !(axis.hi > axis.lo))
            throw SpecError("grid axis '" + part + "': needs hi > lo");
        parsed.push_back(axis);

        if (end == text.size()) break;
        start = end + 1;
    }

    // canonical order t, x1..xn, each exactly once
    GridSpec grid;
    for (int i = 0; i <= n; ++i) {
        const std::string name = i == 0 ? "t" : spatial_var(i);
        bool found = false;
        for (const auto& axis : parsed) {
            if (axis.name != name) continue;
            if (found) throw SpecError("grid: axis '" + name + "' given twice");
            grid.axes.push_back(axis);
            found = true;
        }
        if (!found) throw SpecError("grid: missing axis '" + name + "'");
    }
    if (parsed.size() != grid.axes.size())
        throw SpecError("grid: unexpected axis (allowed: t, x1..x" + std::to_string(n) +
                        ")");
    return grid;
}

std::string render_ym_map(const SpecDocument& doc, const GridSpec& grid) {
    const JetGeometry geo(doc.system, doc.metric, doc.parameters);
    const int n = doc.system.n;

    std::string out = "t";
    for (int i = 1; i <= n; ++i) out += "," + spatial_var(i);
    out += ",eym\n";

    const auto axis_value = [](const GridAxis& a, int j) {
        if (a.count == 1) return a.lo;
        return a.lo + j * (a.hi - a.lo) / (a.count - 1);
    };

    // odometer over the axes, t outermost, xn innermost
    std::vector<int> index(n + 1, 0);
    const Vector fiber = Vector::Zero(n);
    while (true) {
        JetPoint p;
        p.t = axis_value(grid.axes[0], index[0]);
        p.x = Vector(n);
        for (int i = 0; i < n; ++i) p.x(i) = axis_value(grid.axes[i + 1], index[i + 1]);
        p.x1 = fiber;

        const double eym = yang_mills_energy(geo.em_form(p));
        append_number(out, p.t);
        for (int i = 0; i < n; ++i) {
            out += ',';
            append_number(out, p.x(i));
        }
        out += ',';
        append_number(out, eym);
        out += '\n';

        int pos = n;
        while (pos >= 0 && ++index[pos] == grid.axes[pos].count) {
            index[pos] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
    return out;
}

bool metric_curvature_is_flat(const MetricPair& metric) {
    const ExprTensor4 curv = curvature_tensor_expr(spatial_christoffel_expr(metric.phi));
    for (const auto& block : curv)
        for (const auto& plane : block)
            for (const auto& row : plane)
                for (const Expr& e : row)
                    if (!e.is_constant(0.0)) return false;
    return true;
}

} // namespace jetgeo
