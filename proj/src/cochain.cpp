#include "robzero/cochain.hpp"

namespace robzero {

Cochain coboundary(const Cochain& c, const SimplicialComplex& cx) {
    if (c.dim >= cx.grid().dim())
        throw InputError("coboundary would exceed the complex dimension");
    Cochain out;
    out.dim = c.dim + 1;
    out.ring = c.ring;
    for (const auto& [s, v] : c.entries) {
        cx.cofaces(s, [&](const Simplex& t, int sign) {
            out.add(t, checked_mul(v, sign));
        });
    }
    return out;
}

CubicalCochain coboundary(const CubicalCochain& c, const SimplicialComplex& cx) {
    if (c.dim >= cx.grid().dim())
        throw InputError("coboundary would exceed the complex dimension");
    CubicalCochain out;
    out.dim = c.dim + 1;
    out.ring = c.ring;
    for (const auto& [f, v] : c.entries) {
        cx.face_cofaces(f, [&](const CubeFace& g, int sign) {
            out.add(g, checked_mul(v, sign));
        });
    }
    return out;
}

Cochain mod2(const Cochain& c) {
    Cochain out;
    out.dim = c.dim;
    out.ring = Ring::z2;
    for (const auto& [s, v] : c.entries) out.add(s, v & 1);
    return out;
}

} // namespace robzero
