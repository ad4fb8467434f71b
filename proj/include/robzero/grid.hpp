#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "robzero/common.hpp"

namespace robzero {

enum class Topology { cube, torus };

struct MultiIndex {
    std::array<std::int32_t, kMaxDim> c{};
};

// Regular grid of vertices on [-1,1]^m (cube) or the m-torus, with the
// implicit Freudenthal triangulation of its cell structure.  Vertex ids are
// row-major with the last axis fastest.
class GridDomain {
public:
    GridDomain(int m, std::vector<int> resolutions, Topology topology);

    int dim() const { return m_; }
    Topology topology() const { return topo_; }
    int resolution(int axis) const { return g_[axis]; }
    std::int64_t vertex_count() const { return vcount_; }

    VertexId vertex_id(const MultiIndex& mi) const {
        std::int64_t id = 0;
        for (int j = 0; j < m_; ++j) id = id * g_[j] + mi.c[j];
        return id;
    }
    MultiIndex vertex_index(VertexId id) const {
        MultiIndex mi;
        for (int j = m_ - 1; j >= 0; --j) {
            mi.c[j] = static_cast<std::int32_t>(id % g_[j]);
            id /= g_[j];
        }
        return mi;
    }

    // Embedding of vertex coordinates into [-1,1] per axis (grid points are
    // equidistant; the torus reuses the same parameter for generators).
    double coordinate(int axis, std::int32_t i) const {
        if (topo_ == Topology::cube) return -1.0 + 2.0 * i / (g_[axis] - 1);
        return -1.0 + 2.0 * i / g_[axis];
    }

    // Shift a multi-index by +1 on the axes in `mask`.  Returns false when the
    // shift leaves a bounded grid.
    bool shift_up(MultiIndex& mi, AxesMask mask) const {
        for (int j = 0; j < m_; ++j) {
            if (!(mask >> j & 1)) continue;
            if (mi.c[j] + 1 >= g_[j]) {
                if (topo_ == Topology::cube) return false;
                mi.c[j] = 0;
            } else {
                ++mi.c[j];
            }
        }
        return true;
    }
    bool shift_down(MultiIndex& mi, AxesMask mask) const {
        for (int j = 0; j < m_; ++j) {
            if (!(mask >> j & 1)) continue;
            if (mi.c[j] == 0) {
                if (topo_ == Topology::cube) return false;
                mi.c[j] = g_[j] - 1;
            } else {
                --mi.c[j];
            }
        }
        return true;
    }

    // Valid base corners for a cell face spanning `extent`: on a cube the
    // spanned axes must not touch the upper boundary.
    bool valid_base(const MultiIndex& mi, AxesMask extent) const {
        if (topo_ == Topology::torus) return true;
        for (int j = 0; j < m_; ++j)
            if ((extent >> j & 1) && mi.c[j] + 1 >= g_[j]) return false;
        return true;
    }

    std::int64_t base_count(AxesMask extent) const {
        std::int64_t n = 1;
        for (int j = 0; j < m_; ++j) {
            int span = (extent >> j & 1) ? 1 : 0;
            n *= (topo_ == Topology::torus) ? g_[j] : g_[j] - span;
        }
        return n;
    }

    void for_each_base(AxesMask extent, const std::function<void(VertexId, const MultiIndex&)>& fn) const;

private:
    int m_;
    std::array<int, kMaxDim> g_{};
    Topology topo_;
    std::int64_t vcount_;
};

// A k-simplex of the Freudenthal triangulation: a monotone chain
// base < base+S1 < base+S1+S2 < ... inside one grid cell.  The step masks are
// pairwise disjoint and nonzero; they are packed 8 bits apiece.
struct Simplex {
    VertexId base = 0;
    std::uint64_t steps = 0;
    std::int32_t dim = 0;

    AxesMask step(int i) const { return static_cast<AxesMask>(steps >> (8 * i) & 0xff); }
    void set_step(int i, AxesMask s) {
        steps = (steps & ~(0xffULL << (8 * i))) | (std::uint64_t(s & 0xff) << (8 * i));
    }
    AxesMask extent() const {
        AxesMask e = 0;
        for (int i = 0; i < dim; ++i) e |= step(i);
        return e;
    }
    bool operator==(const Simplex& o) const { return base == o.base && steps == o.steps && dim == o.dim; }
};

struct SimplexHash {
    std::size_t operator()(const Simplex& s) const {
        std::size_t h = std::hash<std::int64_t>()(s.base);
        h = hash_combine(h, std::hash<std::uint64_t>()(s.steps));
        return h;
    }
};

// An axis-aligned face of the cubical cell structure: base corner plus the
// set of spanned axes.
struct CubeFace {
    VertexId base = 0;
    AxesMask axes = 0;

    bool operator==(const CubeFace& o) const { return base == o.base && axes == o.axes; }
};

struct CubeFaceHash {
    std::size_t operator()(const CubeFace& f) const {
        return hash_combine(std::hash<std::int64_t>()(f.base), f.axes);
    }
};

// Freudenthal triangulation of a grid domain: simplex enumeration, faces,
// cofaces, and the dual statements for cubical faces.
class SimplicialComplex {
public:
    explicit SimplicialComplex(const GridDomain& grid);

    const GridDomain& grid() const { return *grid_; }

    // All step-mask sequences for dimension k (shapes shared by every cell).
    const std::vector<std::uint64_t>& shapes(int k) const;

    std::int64_t count_simplices(int k) const;
    void for_each_simplex(int k, const std::function<void(const Simplex&)>& fn) const;

    void vertices(const Simplex& s, VertexId out[kMaxDim + 1]) const;

    // face_i: delete vertex i from the chain.
    Simplex face(const Simplex& s, int i) const;

    // Cofaces with the sign of the position at which the extra vertex enters;
    // this realizes delta of the characteristic cochain of `s`.
    void cofaces(const Simplex& s, const std::function<void(const Simplex&, int sign)>& fn) const;

    // Cubical faces.
    std::int64_t count_faces(int k) const;
    void for_each_face(int k, const std::function<void(const CubeFace&)>& fn) const;
    void face_vertices(const CubeFace& f, std::vector<VertexId>& out) const;
    void face_cofaces(const CubeFace& f, const std::function<void(const CubeFace&, int sign)>& fn) const;

    // Full cells containing a cubical face / a simplex.
    void cells_containing(const CubeFace& f, const std::function<void(VertexId)>& fn) const;
    void cells_containing(const Simplex& s, const std::function<void(VertexId)>& fn) const;

    std::vector<AxesMask> axis_combinations(int k) const;

private:
    const GridDomain* grid_;
    mutable std::vector<std::vector<std::uint64_t>> shape_cache_;
    void build_shapes(int k) const;
};

// Deterministic enumeration index used for filtration tie-breaking.
std::int64_t simplex_sort_id(const SimplicialComplex& cx, const Simplex& s);
std::int64_t face_sort_id(const GridDomain& g, const CubeFace& f);

} // namespace robzero
