#pragma once

#include <unordered_map>

#include "robzero/grid.hpp"

namespace robzero {

enum class Ring { integers, z2 };

// Sparse simplicial cochain.  Coefficients are checked 64-bit integers; the
// Z2 variant keeps them reduced to {0,1}.  Simplices are stored in the
// structural (chain) orientation of the Freudenthal triangulation.
struct Cochain {
    int dim = 0;
    Ring ring = Ring::integers;
    std::unordered_map<Simplex, long long, SimplexHash> entries;

    long long at(const Simplex& s) const {
        auto it = entries.find(s);
        return it == entries.end() ? 0 : it->second;
    }
    void add(const Simplex& s, long long c) {
        if (c == 0) return;
        auto [it, fresh] = entries.emplace(s, 0);
        it->second = checked_add(it->second, c);
        if (ring == Ring::z2) it->second &= 1;
        if (it->second == 0) entries.erase(it);
    }
    bool is_zero() const { return entries.empty(); }
};

// Sparse cubical cochain on the tensor-product cell structure.
struct CubicalCochain {
    int dim = 0;
    Ring ring = Ring::integers;
    std::unordered_map<CubeFace, long long, CubeFaceHash> entries;

    long long at(const CubeFace& f) const {
        auto it = entries.find(f);
        return it == entries.end() ? 0 : it->second;
    }
    void add(const CubeFace& f, long long c) {
        if (c == 0) return;
        auto [it, fresh] = entries.emplace(f, 0);
        it->second = checked_add(it->second, c);
        if (ring == Ring::z2) it->second &= 1;
        if (it->second == 0) entries.erase(it);
    }
    bool is_zero() const { return entries.empty(); }
};

// Alternating-sign coboundary over the structural vertex order; signs are
// immaterial mod 2 so one implementation serves both rings.
Cochain coboundary(const Cochain& c, const SimplicialComplex& cx);
CubicalCochain coboundary(const CubicalCochain& c, const SimplicialComplex& cx);

Cochain mod2(const Cochain& c);

} // namespace robzero
