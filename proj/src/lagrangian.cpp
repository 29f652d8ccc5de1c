#include "jetgeo/lagrangian.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <utility>

namespace jetgeo {

namespace {

constexpr double kUniformTol = 1e-12;

Bindings bindings_at(const Bindings& params, double t, const Vector& x,
                     const Vector* x1 = nullptr) {
    Bindings b = params;
    b["t"] = t;
    for (int i = 0; i < x.size(); ++i) b[spatial_var(i + 1)] = x(i);
    if (x1)
        for (int i = 0; i < x1->size(); ++i) b[fiber_var(i + 1)] = (*x1)(i);
    return b;
}

void check_dimensions(const SystemSpec& sys, const MetricPair& metric, int curve_n) {
    if (metric.n != sys.n)
        throw SpecError("metric dimension " + std::to_string(metric.n) +
                        " does not match system dimension " + std::to_string(sys.n));
    if (curve_n != sys.n)
        throw SpecError("curve dimension " + std::to_string(curve_n) +
                        " does not match system dimension " + std::to_string(sys.n));
}

Vector eval_field(const SystemSpec& sys, double t, const Vector& x,
                  const Bindings& params) {
    const Bindings b = bindings_at(params, t, x);
    Vector out(sys.n);
    for (int i = 0; i < sys.n; ++i) out(i) = sys.X[i].eval(b);
    return out;
}

/// Least-squares Lagrangian as one expression over (t, x, x1).
Expr jls_expr(const SystemSpec& sys, const MetricPair& metric) {
    ExprVector r(sys.n);
    for (int j = 0; j < sys.n; ++j)
        r[j] = Expr::symbol(fiber_var(j + 1)) - sys.X[j];
    Expr sum;
    for (int a = 0; a < sys.n; ++a)
        for (int b = 0; b < sys.n; ++b)
            sum = sum + metric.phi[a][b] * r[a] * r[b];
    return (Expr::constant(1.0) / metric.h) * sum;
}

} // namespace

Curve::Curve(std::vector<double> times, std::vector<Vector> states,
             std::optional<std::vector<Vector>> velocities)
    : t_(std::move(times)), x_(std::move(states)) {
    if (t_.size() != x_.size())
        throw CurveError("curve has " + std::to_string(t_.size()) + " times but " +
                         std::to_string(x_.size()) + " states");
    if (t_.size() < 5)
        throw CurveError("curve needs at least 5 samples, got " +
                         std::to_string(t_.size()));
    const auto m = t_.size();
    const double dt = t_[1] - t_[0];
    for (std::size_t k = 0; k + 1 < m; ++k) {
        if (!(t_[k + 1] > t_[k]))
            throw CurveError("curve times must be strictly increasing (sample " +
                             std::to_string(k + 1) + ")");
        if (std::abs((t_[k + 1] - t_[k]) - dt) > kUniformTol)
            throw CurveError("curve times are not uniformly spaced (sample " +
                             std::to_string(k + 1) + ")");
    }
    const auto n = x_.front().size();
    if (n < 1) throw CurveError("curve states must be non-empty vectors");
    for (const auto& xk : x_)
        if (xk.size() != n)
            throw CurveError("curve states have inconsistent dimensions");

    if (velocities) {
        v_ = std::move(*velocities);
        explicit_v_ = true;
        if (v_.size() != m)
            throw CurveError("curve has " + std::to_string(m) + " samples but " +
                             std::to_string(v_.size()) + " velocities");
        for (const auto& vk : v_)
            if (vk.size() != n)
                throw CurveError("curve velocities have inconsistent dimensions");
        return;
    }

    // Central differences inside, second-order one-sided at the ends.
    v_.resize(m);
    v_.front() = (-3.0 * x_[0] + 4.0 * x_[1] - x_[2]) / (2.0 * dt);
    for (std::size_t k = 1; k + 1 < m; ++k) v_[k] = (x_[k + 1] - x_[k - 1]) / (2.0 * dt);
    v_.back() = (3.0 * x_[m - 1] - 4.0 * x_[m - 2] + x_[m - 3]) / (2.0 * dt);
}

double jls_value(const SystemSpec& sys, const MetricPair& metric, const JetPoint& p,
                 const Bindings& params) {
    if (p.x.size() != sys.n || p.x1.size() != sys.n)
        throw SpecError("jet point dimension does not match the system (n = " +
                        std::to_string(sys.n) + ")");
    if (metric.n != sys.n)
        throw SpecError("metric dimension " + std::to_string(metric.n) +
                        " does not match system dimension " + std::to_string(sys.n));
    require_positive_definite(metric, p.t, p.x, params);

    const Bindings b = bindings_at(params, p.t, p.x);
    const double h = metric.h.eval(b);
    const Matrix phi = eval_phi(metric.phi, p.x, params);
    Vector r = p.x1;
    for (int i = 0; i < sys.n; ++i) r(i) -= sys.X[i].eval(b);
    return r.dot(phi * r) / h;
}

double energy_action(const SystemSpec& sys, const MetricPair& metric, const Curve& c,
                     const Bindings& params) {
    check_dimensions(sys, metric, c.dimension());
    const int m = c.samples();
    const double dt = c.step();
    double total = 0.0;
    for (int k = 0; k < m; ++k) {
        const JetPoint p{c.times()[k], c.states()[k], c.velocities()[k]};
        const double value = jls_value(sys, metric, p, params);
        const double root_h = std::sqrt(metric.h.eval(bindings_at(params, p.t, p.x)));
        const double w = (k == 0 || k == m - 1) ? 0.5 : 1.0;
        total += w * value * root_h;
    }
    return total * dt;
}

std::vector<double> el_residual(const SystemSpec& sys, const MetricPair& metric,
                                const Curve& c, int i, const Bindings& params) {
    check_dimensions(sys, metric, c.dimension());
    if (i < 1 || i > sys.n)
        throw SpecError("coordinate index " + std::to_string(i) +
                        " out of range 1.." + std::to_string(sys.n));

    const Expr jls = jls_expr(sys, metric);
    const Expr dx = jls.diff(spatial_var(i));
    const Expr dv = jls.diff(fiber_var(i));

    const int m = c.samples();
    std::vector<double> p_term(m), q_term(m);
    for (int k = 0; k < m; ++k) {
        const Bindings b =
            bindings_at(params, c.times()[k], c.states()[k], &c.velocities()[k]);
        p_term[k] = dx.eval(b);
        q_term[k] = dv.eval(b);
    }

    // d/dt of dJLS/dx1^i along the curve, interior samples only.  The
    // two boundary-adjacent samples use second-order one-sided stencils
    // so that only interior values of the partial enter; a centered
    // stencil there would difference against the end samples, whose
    // reconstructed velocities carry a different truncation constant,
    // and the residual would degrade to first order in the step.
    const double dt = c.step();
    std::vector<double> out(m - 2);
    for (int k = 1; k + 1 < m; ++k) {
        double dq;
        if (k == 1)
            dq = (-3.0 * q_term[1] + 4.0 * q_term[2] - q_term[3]) / (2.0 * dt);
        else if (k == m - 2)
            dq = (3.0 * q_term[m - 2] - 4.0 * q_term[m - 3] + q_term[m - 4]) / (2.0 * dt);
        else
            dq = (q_term[k + 1] - q_term[k - 1]) / (2.0 * dt);
        out[k - 1] = p_term[k] - dq;
    }
    return out;
}

Curve integrate(const SystemSpec& sys, const Vector& x0, double t0, double t1,
                int steps, const Bindings& params) {
    if (steps < 4)
        throw CurveError("integration needs at least 4 steps, got " +
                         std::to_string(steps));
    if (!(t1 > t0)) throw CurveError("integration interval must have t1 > t0");
    if (x0.size() != sys.n)
        throw SpecError("initial state dimension does not match the system (n = " +
                        std::to_string(sys.n) + ")");

    const double dt = (t1 - t0) / steps;
    std::vector<double> times(steps + 1);
    std::vector<Vector> states(steps + 1);
    times[0] = t0;
    states[0] = x0;
    for (int k = 0; k < steps; ++k) {
        const double t = t0 + k * dt;
        const Vector& x = states[k];
        const Vector k1 = eval_field(sys, t, x, params);
        const Vector k2 = eval_field(sys, t + 0.5 * dt, x + 0.5 * dt * k1, params);
        const Vector k3 = eval_field(sys, t + 0.5 * dt, x + 0.5 * dt * k2, params);
        const Vector k4 = eval_field(sys, t + dt, x + dt * k3, params);
        states[k + 1] = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        times[k + 1] = t0 + (k + 1) * dt;
    }
    return Curve(std::move(times), std::move(states));
}

namespace {

void append_double(std::string& line, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    line += buf;
}

double parse_double(const std::string& token, std::size_t line_no) {
    double v = 0.0;
    const char* first = token.data();
    const char* last = first + token.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last)
        throw CurveError("curve CSV line " + std::to_string(line_no) +
                         ": bad number '" + token + "'");
    return v;
}

std::vector<std::string> split_csv(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

} // namespace

void write_curve_csv(const Curve& c, std::ostream& out) {
    std::string header = "t";
    for (int i = 1; i <= c.dimension(); ++i) header += "," + spatial_var(i);
    out << header << '\n';
    for (int k = 0; k < c.samples(); ++k) {
        std::string line;
        append_double(line, c.times()[k]);
        for (int i = 0; i < c.dimension(); ++i) {
            line += ',';
            append_double(line, c.states()[k](i));
        }
        out << line << '\n';
    }
}

void write_curve_csv(const Curve& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw CurveError("cannot open '" + path + "' for writing");
    write_curve_csv(c, out);
    out.flush();
    if (!out) throw CurveError("failed writing curve CSV to '" + path + "'");
}

Curve read_curve_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw CurveError("curve CSV is empty");
    const auto header = split_csv(line);
    if (header.empty() || header[0] != "t")
        throw CurveError("curve CSV header must start with 't'");
    const int n = static_cast<int>(header.size()) - 1;
    if (n < 1) throw CurveError("curve CSV header has no coordinate columns");
    for (int i = 1; i <= n; ++i)
        if (header[i] != spatial_var(i))
            throw CurveError("curve CSV header column " + std::to_string(i + 1) +
                             " must be '" + spatial_var(i) + "'");

    std::vector<double> times;
    std::vector<Vector> states;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv(line);
        if (static_cast<int>(fields.size()) != n + 1)
            throw CurveError("curve CSV line " + std::to_string(line_no) + " has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(n + 1));
        times.push_back(parse_double(fields[0], line_no));
        Vector x(n);
        for (int i = 0; i < n; ++i) x(i) = parse_double(fields[i + 1], line_no);
        states.push_back(std::move(x));
    }
    return Curve(std::move(times), std::move(states));
}

Curve read_curve_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CurveError("cannot open '" + path + "' for reading");
    return read_curve_csv(in);
}

} // namespace jetgeo
