#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "robzero/cochain.hpp"
#include "robzero/cup.hpp"
#include "robzero/ez.hpp"
#include "robzero/filtration.hpp"
#include "robzero/reduction.hpp"

namespace robzero {

enum class Depth { primary, secondary };

// A persistence level: either a concrete filtration level, "below r0" (the
// obstruction was never present), or inconclusive (n = 3 off the cube).
struct Persistence {
    enum class Kind { level, below_r0, inconclusive } kind = Kind::below_r0;
    double value = 0.0;
    std::int32_t rank = -1;

    static Persistence level(double v, std::int32_t r) { return {Kind::level, v, r}; }
    static Persistence below() { return {}; }
    static Persistence inconclusive(double v, std::int32_t r) { return {Kind::inconclusive, v, r}; }
    bool is_level() const { return kind == Kind::level; }
};

struct Diagnostics {
    std::int64_t columns_total = 0;
    std::int64_t columns_admitted = 0;
    std::int64_t secondary_columns_admitted = 0;
    std::int64_t generators = 0;
    double ms_filtration = 0.0;
    double ms_primary = 0.0;
    double ms_secondary = 0.0;
    bool used_bignum = false;
};

struct ObstructionResult {
    double r0 = 0.0;
    Persistence r1;
    Persistence r2;
    bool secondary_ran = false;
    // Raw level above which the approximation extends to the deepest skeleton
    // tested; empty when the obstruction survives the whole filtration.
    std::optional<double> extendable_above;
    Cochain extension; // x in Omega(A_{r1+}) when computed
    bool has_extension = false;
    Diagnostics diag;
};

struct RobustnessReport {
    FiltrationMode mode = FiltrationMode::cubical;
    ThresholdMode threshold = ThresholdMode::empirical;
    Depth depth = Depth::secondary;
    bool heuristic = false;

    double r0 = 0.0;
    Persistence r1;
    Persistence r2;

    bool zero_guaranteed = false;
    std::optional<double> lower_bound;
    std::optional<double> upper_bound;
    bool upper_capped = false;
    std::optional<double> nonexistence_robustness;

    Diagnostics diag;
};

struct PipelineOptions {
    FiltrationMode mode = FiltrationMode::cubical;
    ThresholdMode threshold = ThresholdMode::empirical;
    Depth depth = Depth::secondary;
    bool need_extension = false; // keep x even when no secondary stage runs
};

// Pullback y of the characteristic cocycle of the fixed top sphere simplex
// under f', evaluated on one (n-1)-simplex (structural orientation); zero on
// degenerate images and outside the complex at r0.
class Pullback {
public:
    Pullback(const Filtration& filt);
    long long ybar(const Simplex& s) const;       // zero extension of y
    long long delta_ybar(const Simplex& s) const; // its coboundary, local evaluation
    bool cell_can_carry(VertexId cell_base) const;

private:
    const Filtration* filt_;
    std::int32_t r0_rank_;
};

ObstructionResult obstruction_pipeline(const SampledField& field, const PipelineOptions& opts,
                                       Diagnostics* diag_out = nullptr);

// Full Section-3 style report: bounds from the last persistent level.
RobustnessReport robustness_report(const SampledField& field, const PipelineOptions& opts);

} // namespace robzero
