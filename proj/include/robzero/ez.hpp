#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "robzero/cochain.hpp"
#include "robzero/grid.hpp"

namespace robzero {

// Simplex of one grid cell in local coordinates: base offset within the cell
// plus packed steps.  Offsets and steps are disjoint 0/1 masks.
struct LocalSimplex {
    AxesMask off = 0;
    std::uint64_t steps = 0;
    std::int32_t dim = 0;

    AxesMask step(int i) const { return static_cast<AxesMask>(steps >> (8 * i) & 0xff); }
    bool operator<(const LocalSimplex& o) const {
        if (off != o.off) return off < o.off;
        if (steps != o.steps) return steps < o.steps;
        return dim < o.dim;
    }
};

using LocalChain = std::map<LocalSimplex, long long>;

struct LocalFace {
    AxesMask off = 0;  // base offset of the cubical face within the cell
    AxesMask axes = 0; // spanned axes
    bool operator<(const LocalFace& o) const {
        return off != o.off ? off < o.off : axes < o.axes;
    }
};

// Eilenberg-Zilber machinery between the simplicial cochains of the
// Freudenthal triangulation and the cubical (tensor product) cochains.
// Chain-level conventions: AW is the sign-free front/back splitting into
// consecutive axis blocks, EML the shuffle with the permutation sign, and the
// homotopy H is built degreewise from AW and EML by coning inside each cell
// toward its minimal vertex, so AW o EML = id and the homotopy identity hold
// by construction.  The cochain maps below are their transposes.
class EzOps {
public:
    explicit EzOps(const SimplicialComplex& cx) : cx_(&cx) {}

    const SimplicialComplex& complex() const { return *cx_; }

    // Chain-level AW of a local simplex: cubical faces, all coefficients +1.
    void aw_chain(const LocalSimplex& s, const std::function<void(const LocalFace&)>& fn) const;
    // Chain-level shuffle of a local cubical face: simplices with sgn(pi).
    void eml_chain(const LocalFace& f, const std::function<void(const LocalSimplex&, int sign)>& fn) const;
    // Chain homotopy H with dH + Hd = EML o AW - id, memoized per step shape.
    const LocalChain& homotopy(const LocalSimplex& s) const;

    // Cochain-level evaluations (transposes of the above).
    template <class CubEval>
    long long aw_eval(const CubEval& phi, const Simplex& s) const {
        long long acc = 0;
        aw_chain(local_of(s), [&](const LocalFace& lf) {
            acc = checked_add(acc, phi(global_face(s.base, lf)));
        });
        return acc;
    }
    template <class SimpEval>
    long long eml_eval(const SimpEval& psi, const CubeFace& f) const {
        long long acc = 0;
        eml_chain(LocalFace{0, f.axes}, [&](const LocalSimplex& ls, int sign) {
            acc = checked_add(acc, checked_mul(sign, psi(global_simplex(f.base, ls))));
        });
        return acc;
    }
    template <class SimpEval>
    long long shi_eval(const SimpEval& psi, const Simplex& s) const {
        long long acc = 0;
        for (const auto& [ls, c] : homotopy(local_of(s)))
            acc = checked_add(acc, checked_mul(c, psi(global_simplex(s.base, ls))));
        return acc;
    }

    // Materialized cochain maps (small inputs; used by tests and the lift).
    Cochain aw(const CubicalCochain& c) const;
    CubicalCochain eml(const Cochain& c) const;
    Cochain shi(const Cochain& c) const;

    LocalSimplex local_of(const Simplex& s) const { return LocalSimplex{0, s.steps, s.dim}; }
    Simplex global_simplex(VertexId cell_base, const LocalSimplex& ls) const {
        MultiIndex mi = cx_->grid().vertex_index(cell_base);
        cx_->grid().shift_up(mi, ls.off);
        return Simplex{cx_->grid().vertex_id(mi), ls.steps, ls.dim};
    }
    CubeFace global_face(VertexId cell_base, const LocalFace& lf) const {
        MultiIndex mi = cx_->grid().vertex_index(cell_base);
        cx_->grid().shift_up(mi, lf.off);
        return CubeFace{cx_->grid().vertex_id(mi), lf.axes};
    }

private:
    LocalChain build_homotopy(const LocalSimplex& s) const;
    void local_boundary(const LocalSimplex& s, const std::function<void(const LocalSimplex&, int sign)>& fn) const;
    static LocalChain cone(const LocalChain& c);

    const SimplicialComplex* cx_;
    mutable std::map<std::pair<std::uint64_t, std::int32_t>, LocalChain> h_memo_;
};

} // namespace robzero
