#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "robzero/field.hpp"
#include "robzero/grid.hpp"
#include "robzero/sphere.hpp"

namespace robzero {

enum class FiltrationMode { simplexwise, cubical };
enum class ThresholdMode { alpha, empirical };

// Vertex approximation f': dominant signed axis of f(v) (Def 2.3 style
// tie-breaks: smallest component index, then +).  rank < 0 means undefined.
struct VertexApprox {
    std::vector<std::int16_t> rank;
    int n = 0;

    bool defined(VertexId v) const { return rank[static_cast<std::size_t>(v)] >= 0; }
    int at(VertexId v) const { return rank[static_cast<std::size_t>(v)]; }
};

VertexApprox vertex_approximation(const SampledField& field);

// All filtration bookkeeping for one field: distinct magnitude levels with
// integer ranks, per-vertex ranks, per-cell minima for the cubical
// filtration A_r-square, the starting threshold r0, and the f'-compatible
// vertex order.
class Filtration {
public:
    Filtration(const SampledField& field, const SimplicialComplex& cx, FiltrationMode mode,
               ThresholdMode threshold);

    const SampledField& field() const { return *field_; }
    const SimplicialComplex& complex() const { return *cx_; }
    FiltrationMode mode() const { return mode_; }
    ThresholdMode threshold_mode() const { return tmode_; }

    int level_count() const { return static_cast<int>(level_display_.size()); }
    double level_value(std::int32_t rank) const { return level_display_[rank]; }
    std::int32_t top_rank() const { return static_cast<std::int32_t>(level_display_.size()) - 1; }

    std::int32_t vertex_rank(VertexId v) const { return vertex_rank_[static_cast<std::size_t>(v)]; }

    // Simplexwise value of Eq (1): min over vertices.
    std::int32_t simplex_rank(const Simplex& s) const;
    // Cubical value: max over enclosing full cells of the cell minimum, so a
    // face lies in A_r-square iff its rank is >= the rank of r.
    std::int32_t cubical_rank(const CubeFace& f) const;
    std::int32_t cubical_rank(const Simplex& s) const;
    std::int32_t cell_rank(VertexId cell_base) const { return cell_rank_[static_cast<std::size_t>(cell_base)]; }

    // Value rank used for matrix columns in the active mode.
    std::int32_t column_rank(const Simplex& s) const {
        return mode_ == FiltrationMode::cubical ? cubical_rank(s) : simplex_rank(s);
    }

    // Membership of a simplex in the complex A at a level rank (mode-aware).
    bool in_complex_at(const Simplex& s, std::int32_t rank) const {
        return (mode_ == FiltrationMode::cubical ? cubical_rank(s) : simplex_rank(s)) >= rank;
    }

    const VertexApprox& approx() const { return approx_; }

    // r0: the first usable level.  In alpha mode this is alpha * n^(1/p)
    // itself with r0_rank the first level at or above it; in empirical mode
    // the smallest level whose complex carries a simplicial f'.
    double r0() const { return r0_display_; }
    std::int32_t r0_rank() const { return r0_rank_; }
    bool heuristic() const { return heuristic_; }

    // f'-compatible total vertex order: rank of f'(v) for vertices of A_{r0},
    // sentinel-last otherwise, ties by vertex id.
    std::uint64_t compat_key(VertexId v) const {
        std::int16_t r = approx_.rank[static_cast<std::size_t>(v)];
        std::uint64_t hi = (r >= 0 && vertex_rank(v) >= r0_rank_) ? static_cast<std::uint64_t>(r) : 0xffffULL;
        return (hi << 48) | static_cast<std::uint64_t>(v);
    }

private:
    const SampledField* field_;
    const SimplicialComplex* cx_;
    FiltrationMode mode_;
    ThresholdMode tmode_;
    std::vector<double> level_display_;
    std::vector<std::int32_t> vertex_rank_;
    std::vector<std::int32_t> cell_rank_;
    VertexApprox approx_;
    std::int32_t first_alpha_rank_ = -1;
    std::int32_t r0_rank_ = -1;
    double r0_display_ = 0.0;
    bool heuristic_ = false;
};

} // namespace robzero
