#include "robzero/filtration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace robzero {

VertexApprox vertex_approximation(const SampledField& field) {
    VertexApprox a;
    a.n = field.n;
    const std::int64_t vn = field.grid.vertex_count();
    a.rank.assign(static_cast<std::size_t>(vn), -1);
    for (VertexId v = 0; v < vn; ++v) {
        const double* f = field.at(v);
        int best = 0;
        double mag = std::fabs(f[0]);
        for (int j = 1; j < field.n; ++j) {
            double m = std::fabs(f[j]);
            if (m > mag) { // ties keep the smallest component index
                mag = m;
                best = j;
            }
        }
        if (mag == 0.0) continue; // f(v) = 0, no direction
        int sign = f[best] < 0.0 ? -1 : +1; // sign tie at 0 cannot happen, +0 picks +
        a.rank[static_cast<std::size_t>(v)] = static_cast<std::int16_t>(SpherePolytope::rank(best, sign));
    }
    return a;
}

Filtration::Filtration(const SampledField& field, const SimplicialComplex& cx, FiltrationMode mode,
                       ThresholdMode threshold)
    : field_(&field), cx_(&cx), mode_(mode), tmode_(threshold) {
    const std::int64_t vn = field.grid.vertex_count();

    // Distinct magnitudes, ascending, with per-vertex ranks.
    std::vector<Mag> mags(static_cast<std::size_t>(vn));
    for (VertexId v = 0; v < vn; ++v) mags[static_cast<std::size_t>(v)] = field.magnitude(v);
    std::vector<std::int64_t> order(static_cast<std::size_t>(vn));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
        return mags[static_cast<std::size_t>(a)] < mags[static_cast<std::size_t>(b)];
    });
    vertex_rank_.assign(static_cast<std::size_t>(vn), 0);
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i > 0 && !(mags[static_cast<std::size_t>(order[i - 1])] == mags[static_cast<std::size_t>(order[i])]))
            level_display_.push_back(mags[static_cast<std::size_t>(order[i - 1])].display());
        vertex_rank_[static_cast<std::size_t>(order[i])] = static_cast<std::int32_t>(level_display_.size());
    }
    level_display_.push_back(mags[static_cast<std::size_t>(order.back())].display());

    // First rank at or above alpha * n^(1/p).
    Mag thresh = Mag::threshold(field.alpha, field.n, field.p);
    first_alpha_rank_ = level_count();
    for (std::int64_t i = 0; i < vn; ++i) {
        const Mag& m = mags[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
        if (thresh <= m) {
            first_alpha_rank_ = vertex_rank_[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
            break;
        }
    }

    // Cell minima for the cubical filtration.
    if (mode_ == FiltrationMode::cubical) {
        const GridDomain& g = field.grid;
        cell_rank_.assign(static_cast<std::size_t>(vn), -1);
        const AxesMask full = static_cast<AxesMask>((1u << g.dim()) - 1);
        g.for_each_base(full, [&](VertexId base, const MultiIndex& mi) {
            std::int32_t mn = std::numeric_limits<std::int32_t>::max();
            for (AxesMask t = full;; t = static_cast<AxesMask>((t - 1) & full)) {
                MultiIndex corner = mi;
                g.shift_up(corner, t);
                mn = std::min(mn, vertex_rank_[static_cast<std::size_t>(g.vertex_id(corner))]);
                if (t == 0) break;
            }
            cell_rank_[static_cast<std::size_t>(base)] = mn;
        });
    }

    approx_ = vertex_approximation(field);

    // Largest rank of an edge whose endpoints map to an antipodal pair, in
    // the moded filtration; r0 must exceed it.
    std::int32_t worst_bad = -1;
    cx.for_each_simplex(1, [&](const Simplex& e) {
        VertexId vs[kMaxDim + 1];
        cx.vertices(e, vs);
        std::int16_t r1 = approx_.rank[static_cast<std::size_t>(vs[0])];
        std::int16_t r2 = approx_.rank[static_cast<std::size_t>(vs[1])];
        if (r1 < 0 || r2 < 0 || !SpherePolytope::antipodal(r1, r2)) return;
        std::int32_t val = (mode_ == FiltrationMode::cubical) ? cubical_rank(e) : simplex_rank(e);
        worst_bad = std::max(worst_bad, val);
    });

    std::int32_t first_positive = level_display_.empty() ? level_count() : 0;
    if (!level_display_.empty() && level_display_[0] == 0.0) first_positive = 1;

    if (tmode_ == ThresholdMode::alpha) {
        if (first_alpha_rank_ >= level_count())
            throw TooCoarse("input too coarse: no vertex magnitude reaches alpha * n^(1/p)");
        r0_rank_ = first_alpha_rank_;
        r0_display_ = field.alpha * std::pow(static_cast<double>(field.n),
                                             field.p == Norm::l1 ? 1.0 : (field.p == Norm::l2 ? 0.5 : 0.0));
        if (worst_bad >= r0_rank_)
            throw InputError("vertex approximation is not simplicial at the alpha threshold; "
                             "the declared Lipschitz constant is inconsistent with the samples");
        heuristic_ = false;
    } else {
        std::int32_t r = std::max(first_positive, worst_bad + 1);
        if (r >= level_count())
            throw TooCoarse("input too coarse: no filtration level carries a simplicial vertex approximation");
        r0_rank_ = r;
        // Reported r0 is the smallest real threshold above which f' is
        // simplicial, i.e. the largest antipodal-edge value; the complex in
        // use starts at the next data level.
        if (worst_bad >= 0 && level_display_[static_cast<std::size_t>(worst_bad)] > 0.0)
            r0_display_ = level_display_[static_cast<std::size_t>(worst_bad)];
        else
            r0_display_ = level_display_[static_cast<std::size_t>(r)];
        heuristic_ = r0_rank_ < first_alpha_rank_;
    }
}

std::int32_t Filtration::simplex_rank(const Simplex& s) const {
    MultiIndex mi = field_->grid.vertex_index(s.base);
    const GridDomain& g = field_->grid;
    std::int32_t mn = vertex_rank_[static_cast<std::size_t>(s.base)];
    for (int i = 0; i < s.dim; ++i) {
        g.shift_up(mi, s.step(i));
        mn = std::min(mn, vertex_rank_[static_cast<std::size_t>(g.vertex_id(mi))]);
    }
    return mn;
}

std::int32_t Filtration::cubical_rank(const CubeFace& f) const {
    // Eq. (1) applied to the cube itself: min over the face's own vertices.
    const GridDomain& g = field_->grid;
    MultiIndex mi = g.vertex_index(f.base);
    std::int32_t mn = vertex_rank_[static_cast<std::size_t>(f.base)];
    for (AxesMask t = f.axes; t; t = static_cast<AxesMask>((t - 1) & f.axes)) {
        MultiIndex c = mi;
        g.shift_up(c, t);
        mn = std::min(mn, vertex_rank_[static_cast<std::size_t>(g.vertex_id(c))]);
    }
    return mn;
}

std::int32_t Filtration::cubical_rank(const Simplex& s) const {
    // value of the smallest enclosing cube face
    return cubical_rank(CubeFace{s.base, s.extent()});
}

} // namespace robzero
