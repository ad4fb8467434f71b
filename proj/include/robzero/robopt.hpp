#pragma once

#include <optional>
#include <vector>

#include "robzero/field.hpp"
#include "robzero/filtration.hpp"

namespace robzero {

// Lower bounds on the uncertainty-optimality curve OPT(r): rows of the
// obstruction system are ordered by objective value, columns cut at r, and
// the bound at r is the objective level of the lowest surviving entry of the
// reduced right-hand side.
struct OptCurve {
    struct Point {
        double r = 0.0;
        double lower = 0.0;
        std::optional<double> upper;
    };
    std::vector<Point> points;
    bool terminated = false;   // the obstruction died before r_max
    double termination_r = 0.0;
};

struct OptOptions {
    FiltrationMode mode = FiltrationMode::simplexwise;
    ThresholdMode threshold = ThresholdMode::empirical;
    bool emit_upper = true; // honored only when dim X <= n
};

OptCurve opt_curve(const SampledField& field, const ObjectiveField& objective, double r_max,
                   const OptOptions& opts = {});

void write_curve_csv(const OptCurve& curve, const std::string& path);

} // namespace robzero
