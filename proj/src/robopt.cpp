#include "robzero/robopt.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "robzero/assembly.hpp"
#include "robzero/obstruction.hpp"

namespace robzero {

namespace {

void check_grids(const GridDomain& a, const GridDomain& b) {
    bool ok = a.dim() == b.dim() && a.topology() == b.topology();
    for (int j = 0; ok && j < a.dim(); ++j) ok = a.resolution(j) == b.resolution(j);
    if (!ok) throw InputError("objective grid does not match the field grid");
}

template <class R>
OptCurve run_curve(const SampledField& field, const ObjectiveField& objective, double r_max,
                   const OptOptions& opts) {
    SimplicialComplex cx(field.grid);
    Filtration filt(field, cx, opts.mode, opts.threshold);
    if (r_max < filt.r0())
        throw InputError("r-max is below the initial filtration level");

    // Objective ranks.
    std::vector<double> ovals(objective.values.begin(), objective.values.end());
    std::sort(ovals.begin(), ovals.end());
    ovals.erase(std::unique(ovals.begin(), ovals.end()), ovals.end());
    auto o_rank = [&](double v) {
        return static_cast<std::int64_t>(std::lower_bound(ovals.begin(), ovals.end(), v) - ovals.begin());
    };

    const int n = field.n;
    const bool cubical = opts.mode == FiltrationMode::cubical;

    // Row keys for n-cells: (o-filtration rank << 24) | dense sequence, so the
    // lowest nonzero row is the one with the largest objective value.
    std::unordered_map<Row, Row> remap;
    std::int64_t seq = 0;
    if (cubical) {
        cx.for_each_face(n, [&](const CubeFace& f) {
            std::vector<VertexId> vs;
            cx.face_vertices(f, vs);
            double mn = objective.at(vs[0]);
            for (VertexId v : vs) mn = std::min(mn, objective.at(v));
            remap.emplace(face_row(f), (o_rank(mn) << 24) | seq++);
        });
    } else {
        cx.for_each_simplex(n, [&](const Simplex& s) {
            VertexId vs[kMaxDim + 1];
            cx.vertices(s, vs);
            double mn = objective.at(vs[0]);
            for (int i = 1; i <= s.dim; ++i) mn = std::min(mn, objective.at(vs[i]));
            remap.emplace(simplex_sort_id(cx, s), (o_rank(mn) << 24) | seq++);
        });
    }
    if (seq >= (1 << 24))
        throw InputError("optimization row space exceeds the packed index range");
    auto row_map = [&](Row key) { return remap.at(key); };

    Pullback pb(filt);
    EzOps ez(cx);
    auto rhs = primary_rhs(filt, pb, ez, row_map);

    // Columns up to r_max.
    std::int32_t cutoff = filt.top_rank();
    while (cutoff >= 0 && filt.level_value(cutoff) > r_max) --cutoff;
    ColumnTable cols = build_table(filt, n - 1);
    TableSource source(cols, cx, cutoff, row_map);

    OptCurve curve;
    ReducedPrefix<R> prefix(false);
    SparseVec<R> a_m, a_b;
    for (auto [row, c] : rhs) {
        auto v = R::from_int(c);
        if (!R::is_zero(v)) a_m.emplace(row, v);
    }

    auto bound_now = [&]() -> double {
        return ovals[static_cast<std::size_t>(a_m.rbegin()->first >> 24)];
    };

    if (a_m.empty()) {
        curve.terminated = true;
        curve.termination_r = filt.r0();
        return curve;
    }

    std::int32_t cur_rank = -1;
    auto flush = [&](std::int32_t rank) {
        OptCurve::Point p;
        p.r = filt.level_value(rank);
        p.lower = bound_now();
        curve.points.push_back(p);
    };
    while (true) {
        auto col = source.next();
        if (!col) break;
        if (cur_rank >= 0 && col->value_rank != cur_rank) flush(cur_rank);
        cur_rank = col->value_rank;
        SparseVec<R> m, b;
        for (auto [row, c] : col->entries) {
            auto v = R::from_int(c);
            if (!R::is_zero(v)) m.emplace(row, v);
        }
        prefix.reduce(m, b, false);
        if (!m.empty()) prefix.admit(std::move(m), std::move(b));
        prefix.reduce(a_m, a_b, true);
        if (a_m.empty()) {
            curve.terminated = true;
            curve.termination_r = filt.level_value(cur_rank);
            return curve;
        }
    }
    if (cur_rank >= 0) flush(cur_rank);

    // Upper companion: the reduction at level s certifies an upper bound at
    // radius s + alpha within the objective's Lipschitz constant.
    if (opts.emit_upper && field.grid.dim() <= n) {
        for (auto& p : curve.points) {
            double s = p.r - field.alpha;
            const OptCurve::Point* best = nullptr;
            for (const auto& q : curve.points) {
                if (q.r <= s) best = &q;
                else break;
            }
            if (best != nullptr) p.upper = best->lower + objective.alpha;
        }
    }
    return curve;
}

} // namespace

OptCurve opt_curve(const SampledField& field, const ObjectiveField& objective, double r_max,
                   const OptOptions& opts) {
    check_grids(field.grid, objective.grid);
    try {
        return run_curve<RingI64>(field, objective, r_max, opts);
    } catch (const ArithmeticOverflow&) {
        return run_curve<RingMpz>(field, objective, r_max, opts);
    }
}

void write_curve_csv(const OptCurve& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError(path + ": cannot open for writing");
    bool with_upper = false;
    for (const auto& p : curve.points) with_upper |= p.upper.has_value();
    out << (with_upper ? "r,opt_lower,opt_upper\n" : "r,opt_lower\n");
    char buf[96];
    for (const auto& p : curve.points) {
        if (with_upper && p.upper) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.r, p.lower, *p.upper);
        } else if (with_upper) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,\n", p.r, p.lower);
        } else {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.r, p.lower);
        }
        out << buf;
    }
    if (curve.terminated) {
        std::snprintf(buf, sizeof buf, "# curve terminates: no robust zero for r >= %.17g\n",
                      curve.termination_r);
        out << buf;
    }
}

} // namespace robzero
