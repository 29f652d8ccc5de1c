#pragma once

#include <string>
#include <vector>

#include "jetgeo/expr.hpp"
#include "jetgeo/metric.hpp"
#include "jetgeo/systems.hpp"
#include "jetgeo/tensors.hpp"

namespace jetgeo {

/// One evaluation point from a spec file.  A missing fiber defaults to
/// zero; x1_given records whether the user supplied it.
struct EvalPoint {
    double t = 0.0;
    Vector x;
    Vector x1;
    bool x1_given = false;
};

struct SpecOptions {
    bool symbolic = false;
    double tolerance = 0.0;
    bool tolerance_given = false;
};

/// Parsed spec document: exactly one system and one metric pair, plus
/// parameter bindings, evaluation points, and output options.
struct SpecDocument {
    SystemSpec system;
    MetricPair metric = MetricPair::euclidean(2);
    Bindings parameters;
    std::vector<EvalPoint> points;
    SpecOptions options;
};

/// Parse a spec document from JSON text.  Strict: unknown keys are
/// rejected at every level, shapes and dimensions must be consistent,
/// and a missing metric defaults to the Euclidean pair.  Expressions
/// are JSON strings in the library grammar; bare numbers are accepted
/// as constants.  Throws SpecError (with the offending key path) on
/// structural problems, including embedded expression syntax errors.
SpecDocument parse_spec(const std::string& json_text);

/// Load and parse a spec file.  Throws SpecError when the file cannot
/// be read.
SpecDocument load_spec(const std::string& path);

} // namespace jetgeo
