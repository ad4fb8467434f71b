#include "robzero/grid.hpp"

#include <algorithm>

namespace robzero {

GridDomain::GridDomain(int m, std::vector<int> resolutions, Topology topology)
    : m_(m), topo_(topology) {
    if (m < 1 || m > kMaxDim) throw InputError("domain dimension must be in 1.." + std::to_string(kMaxDim));
    if (static_cast<int>(resolutions.size()) != m) throw InputError("resolution count does not match dimension");
    vcount_ = 1;
    for (int j = 0; j < m; ++j) {
        int g = resolutions[j];
        if (topology == Topology::cube && g < 2) throw InputError("cube grid needs at least 2 vertices per axis");
        if (topology == Topology::torus && g < 3)
            throw InputError("torus grid needs at least 3 vertices per axis to avoid degenerate identifications");
        g_[j] = g;
        vcount_ *= g;
    }
}

void GridDomain::for_each_base(AxesMask extent, const std::function<void(VertexId, const MultiIndex&)>& fn) const {
    MultiIndex mi;
    std::array<int, kMaxDim> limit{};
    for (int j = 0; j < m_; ++j) {
        int span = (extent >> j & 1) ? 1 : 0;
        limit[j] = (topo_ == Topology::torus) ? g_[j] : g_[j] - span;
        if (limit[j] <= 0) return;
    }
    while (true) {
        fn(vertex_id(mi), mi);
        int j = m_ - 1;
        while (j >= 0) {
            if (++mi.c[j] < limit[j]) break;
            mi.c[j] = 0;
            --j;
        }
        if (j < 0) break;
    }
}

SimplicialComplex::SimplicialComplex(const GridDomain& grid) : grid_(&grid) {
    shape_cache_.resize(grid.dim() + 1);
}

void SimplicialComplex::build_shapes(int k) const {
    const int m = grid_->dim();
    std::vector<std::uint64_t> out;
    // Sequences of k pairwise-disjoint nonempty axis subsets, lexicographic in
    // the packed representation.
    std::uint64_t packed = 0;
    AxesMask full = static_cast<AxesMask>((1u << m) - 1);
    std::function<void(int, AxesMask)> rec = [&](int i, AxesMask used) {
        if (i == k) {
            out.push_back(packed);
            return;
        }
        AxesMask avail = static_cast<AxesMask>(full & ~used);
        for (AxesMask s = avail; s; s = static_cast<AxesMask>((s - 1) & avail)) {
            packed |= std::uint64_t(s) << (8 * i);
            rec(i + 1, static_cast<AxesMask>(used | s));
            packed &= ~(0xffULL << (8 * i));
        }
    };
    rec(0, 0);
    std::sort(out.begin(), out.end());
    shape_cache_[k] = std::move(out);
}

const std::vector<std::uint64_t>& SimplicialComplex::shapes(int k) const {
    if (k < 0 || k > grid_->dim()) throw InputError("simplex dimension out of range");
    if (shape_cache_[k].empty() && k > 0) build_shapes(k);
    if (k == 0 && shape_cache_[0].empty()) shape_cache_[0] = {0};
    return shape_cache_[k];
}

static AxesMask packed_extent(std::uint64_t steps, int k) {
    AxesMask e = 0;
    for (int i = 0; i < k; ++i) e |= static_cast<AxesMask>(steps >> (8 * i) & 0xff);
    return e;
}

std::int64_t SimplicialComplex::count_simplices(int k) const {
    std::int64_t n = 0;
    for (std::uint64_t sh : shapes(k)) n += grid_->base_count(packed_extent(sh, k));
    return n;
}

void SimplicialComplex::for_each_simplex(int k, const std::function<void(const Simplex&)>& fn) const {
    for (std::uint64_t sh : shapes(k)) {
        AxesMask e = packed_extent(sh, k);
        grid_->for_each_base(e, [&](VertexId v, const MultiIndex&) {
            fn(Simplex{v, sh, k});
        });
    }
}

void SimplicialComplex::vertices(const Simplex& s, VertexId out[kMaxDim + 1]) const {
    MultiIndex mi = grid_->vertex_index(s.base);
    out[0] = s.base;
    for (int i = 0; i < s.dim; ++i) {
        grid_->shift_up(mi, s.step(i));
        out[i + 1] = grid_->vertex_id(mi);
    }
}

Simplex SimplicialComplex::face(const Simplex& s, int i) const {
    Simplex r;
    r.dim = s.dim - 1;
    if (i == 0) {
        MultiIndex mi = grid_->vertex_index(s.base);
        grid_->shift_up(mi, s.step(0));
        r.base = grid_->vertex_id(mi);
        r.steps = s.steps >> 8;
    } else if (i == s.dim) {
        r.base = s.base;
        r.steps = s.steps & ((1ULL << (8 * (s.dim - 1))) - 1);
    } else {
        r.base = s.base;
        std::uint64_t low = s.steps & ((1ULL << (8 * (i - 1))) - 1);
        std::uint64_t merged = (s.steps >> (8 * (i - 1)) & 0xff) | (s.steps >> (8 * i) & 0xff);
        std::uint64_t high = (i + 1 < kMaxDim) ? (s.steps >> (8 * (i + 1))) << (8 * i) : 0;
        r.steps = low | (merged << (8 * (i - 1))) | high;
    }
    return r;
}

void SimplicialComplex::cofaces(const Simplex& s, const std::function<void(const Simplex&, int sign)>& fn) const {
    const int m = grid_->dim();
    const AxesMask full = static_cast<AxesMask>((1u << m) - 1);
    const AxesMask ext = s.extent();
    const AxesMask avail = static_cast<AxesMask>(full & ~ext);
    const int k = s.dim;

    // Prepend a vertex below the base.
    for (AxesMask t = avail; t; t = static_cast<AxesMask>((t - 1) & avail)) {
        MultiIndex mi = grid_->vertex_index(s.base);
        if (!grid_->shift_down(mi, t)) continue;
        Simplex c;
        c.base = grid_->vertex_id(mi);
        c.steps = (s.steps << 8) | t;
        c.dim = k + 1;
        fn(c, +1);
    }
    // Append a vertex above the top.
    {
        MultiIndex top = grid_->vertex_index(s.base);
        bool ok = true;
        for (int i = 0; i < k && ok; ++i) ok = grid_->shift_up(top, s.step(i));
        if (ok) {
            int sign = (k & 1) ? +1 : -1; // (-1)^(k+1)
            for (AxesMask t = avail; t; t = static_cast<AxesMask>((t - 1) & avail)) {
                MultiIndex probe = top;
                if (!grid_->shift_up(probe, t)) continue;
                Simplex c;
                c.base = s.base;
                c.steps = s.steps | (std::uint64_t(t) << (8 * k));
                c.dim = k + 1;
                fn(c, sign);
            }
        }
    }
    // Split one step into two; the inserted vertex sits at chain position i+1.
    for (int i = 0; i < k; ++i) {
        AxesMask si = s.step(i);
        if (__builtin_popcount(si) < 2) continue;
        int sign = ((i + 1) & 1) ? -1 : +1;
        for (AxesMask t = static_cast<AxesMask>((si - 1) & si); t; t = static_cast<AxesMask>((t - 1) & si)) {
            // t runs over proper nonempty submasks of si.
            Simplex c;
            c.base = s.base;
            std::uint64_t low = (i == 0) ? 0 : (s.steps & ((1ULL << (8 * i)) - 1));
            std::uint64_t high = (i + 2 < kMaxDim) ? (s.steps >> (8 * (i + 1))) << (8 * (i + 2)) : 0;
            c.steps = low | (std::uint64_t(t) << (8 * i)) |
                      (std::uint64_t(si & ~t) << (8 * (i + 1))) | high;
            c.dim = k + 1;
            fn(c, sign);
        }
    }
}

std::vector<AxesMask> SimplicialComplex::axis_combinations(int k) const {
    const int m = grid_->dim();
    std::vector<AxesMask> out;
    for (AxesMask a = 0; a < (1u << m); ++a)
        if (__builtin_popcount(a) == k) out.push_back(a);
    return out;
}

std::int64_t SimplicialComplex::count_faces(int k) const {
    std::int64_t n = 0;
    for (AxesMask a : axis_combinations(k)) n += grid_->base_count(a);
    return n;
}

void SimplicialComplex::for_each_face(int k, const std::function<void(const CubeFace&)>& fn) const {
    for (AxesMask a : axis_combinations(k)) {
        grid_->for_each_base(a, [&](VertexId v, const MultiIndex&) {
            fn(CubeFace{v, a});
        });
    }
}

void SimplicialComplex::face_vertices(const CubeFace& f, std::vector<VertexId>& out) const {
    out.clear();
    AxesMask a = f.axes;
    std::vector<AxesMask> subs;
    for (AxesMask t = a;; t = static_cast<AxesMask>((t - 1) & a)) {
        subs.push_back(t);
        if (t == 0) break;
    }
    for (AxesMask t : subs) {
        MultiIndex mi = grid_->vertex_index(f.base);
        if (grid_->shift_up(mi, t)) out.push_back(grid_->vertex_id(mi));
    }
}

void SimplicialComplex::face_cofaces(const CubeFace& f, const std::function<void(const CubeFace&, int sign)>& fn) const {
    const int m = grid_->dim();
    for (int a = 0; a < m; ++a) {
        if (f.axes >> a & 1) continue;
        AxesMask axes = static_cast<AxesMask>(f.axes | (1u << a));
        int t = 0; // position of axis a among sorted axes of the coface
        for (int j = 0; j < a; ++j)
            if (axes >> j & 1) ++t;
        int leib = (t & 1) ? -1 : +1; // (-1)^(t) for the t-th tensor slot (0-based)
        // Bottom face: coface base equals f.base, f is the low end on axis a.
        {
            MultiIndex mi = grid_->vertex_index(f.base);
            if (grid_->valid_base(mi, axes)) fn(CubeFace{f.base, axes}, -leib);
        }
        // Top face: coface base one step down on axis a.
        {
            MultiIndex mi = grid_->vertex_index(f.base);
            if (grid_->shift_down(mi, static_cast<AxesMask>(1u << a))) {
                if (grid_->valid_base(mi, axes)) fn(CubeFace{grid_->vertex_id(mi), axes}, leib);
            }
        }
    }
}

void SimplicialComplex::cells_containing(const CubeFace& f, const std::function<void(VertexId)>& fn) const {
    const int m = grid_->dim();
    const AxesMask full = static_cast<AxesMask>((1u << m) - 1);
    const AxesMask rest = static_cast<AxesMask>(full & ~f.axes);
    for (AxesMask t = rest;; t = static_cast<AxesMask>((t - 1) & rest)) {
        MultiIndex mi = grid_->vertex_index(f.base);
        bool ok = (t == 0) ? true : grid_->shift_down(mi, t);
        if (ok) {
            if (grid_->valid_base(mi, full)) fn(grid_->vertex_id(mi));
        }
        if (t == 0) break;
    }
}

void SimplicialComplex::cells_containing(const Simplex& s, const std::function<void(VertexId)>& fn) const {
    cells_containing(CubeFace{s.base, s.extent()}, fn);
}

std::int64_t simplex_sort_id(const SimplicialComplex& cx, const Simplex& s) {
    const auto& sh = cx.shapes(s.dim);
    auto it = std::lower_bound(sh.begin(), sh.end(), s.steps);
    std::int64_t shape_idx = it - sh.begin();
    return shape_idx * cx.grid().vertex_count() + s.base;
}

std::int64_t face_sort_id(const GridDomain& g, const CubeFace& f) {
    return (static_cast<std::int64_t>(f.axes) << 40) | f.base;
}

} // namespace robzero
