#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "jetgeo/errors.hpp"
#include "jetgeo/expr.hpp"
#include "jetgeo/jetcore.hpp"
#include "jetgeo/metric.hpp"
#include "jetgeo/systems.hpp"
#include "jetgeo/tensors.hpp"

namespace jetgeo {

/// Raised on curve invariant violations: too few samples, non-uniform or
/// non-increasing times, inconsistent state dimensions.
class CurveError : public Error {
public:
    using Error::Error;
};

/// Uniformly sampled curve t_0..t_m -> x(t) in R^n.
///
/// Invariants: m >= 4, strictly increasing times, uniform step within
/// 1e-12.  Velocities may be supplied; otherwise they are reconstructed
/// by central differences (second-order one-sided stencils at the ends).
class Curve {
public:
    Curve(std::vector<double> times, std::vector<Vector> states,
          std::optional<std::vector<Vector>> velocities = std::nullopt);

    int samples() const { return static_cast<int>(t_.size()); }
    int dimension() const { return static_cast<int>(x_.front().size()); }
    double step() const { return t_[1] - t_[0]; }

    const std::vector<double>& times() const { return t_; }
    const std::vector<Vector>& states() const { return x_; }
    const std::vector<Vector>& velocities() const { return v_; }

    /// True when velocities were supplied rather than reconstructed.
    bool has_explicit_velocities() const { return explicit_v_; }

private:
    std::vector<double> t_;
    std::vector<Vector> x_;
    std::vector<Vector> v_;
    bool explicit_v_ = false;
};

/// Least-squares Lagrangian of the system under the metric pair:
///   (1/h) phi_ij [x1^i - X^i][x1^j - X^j]  at p.
/// Nonnegative; zero exactly when x1 = X(t, x).  Throws MetricError when
/// the metric fails at p.
double jls_value(const SystemSpec& sys, const MetricPair& metric, const JetPoint& p,
                 const Bindings& params = {});

/// Energy action of the curve: trapezoidal quadrature of
/// jls_value * sqrt(h) over the samples, using the curve's velocities.
double energy_action(const SystemSpec& sys, const MetricPair& metric, const Curve& c,
                     const Bindings& params = {});

/// Euler-Lagrange residual d[JLS]/dx^i - d/dt(d[JLS]/dx1^i) along the
/// curve, for the 1-based coordinate index i.  Both partials are taken
/// symbolically; the outer d/dt is differenced along the curve (central
/// inside, second-order one-sided at the two boundary-adjacent samples),
/// so only the interior samples t_1..t_{m-1} are covered.
std::vector<double> el_residual(const SystemSpec& sys, const MetricPair& metric,
                                const Curve& c, int i, const Bindings& params = {});

/// Classical fixed-step RK4 trajectory of dx/dt = X(t, x) from x0 over
/// [t0, t1].  steps >= 4 so the result satisfies the curve invariants.
Curve integrate(const SystemSpec& sys, const Vector& x0, double t0, double t1,
                int steps, const Bindings& params = {});

/// CSV interchange, header "t,x1,..,xn", one row per sample.
/// Velocities are not serialized; reading reconstructs them.
void write_curve_csv(const Curve& c, std::ostream& out);
void write_curve_csv(const Curve& c, const std::string& path);
Curve read_curve_csv(std::istream& in);
Curve read_curve_csv(const std::string& path);

} // namespace jetgeo
