#include "doctest.h"

#include "robzero/ez.hpp"
#include "robzero/gen.hpp"

using namespace robzero;

namespace {

Cochain random_simp(const SimplicialComplex& cx, int k, CounterRng& rng, int density = 5) {
    Cochain c;
    c.dim = k;
    cx.for_each_simplex(k, [&](const Simplex& s) {
        if (rng.next_u64() % density == 0)
            c.add(s, static_cast<long long>(rng.next_u64() % 7) - 3);
    });
    return c;
}

CubicalCochain random_cub(const SimplicialComplex& cx, int k, CounterRng& rng, int density = 3) {
    CubicalCochain c;
    c.dim = k;
    cx.for_each_face(k, [&](const CubeFace& f) {
        if (rng.next_u64() % density == 0)
            c.add(f, static_cast<long long>(rng.next_u64() % 7) - 3);
    });
    return c;
}

bool cochain_eq(const Cochain& a, const Cochain& b) {
    if (a.entries.size() != b.entries.size()) return false;
    for (auto& [s, v] : a.entries)
        if (b.at(s) != v) return false;
    return true;
}

bool cubical_eq(const CubicalCochain& a, const CubicalCochain& b) {
    if (a.entries.size() != b.entries.size()) return false;
    for (auto& [f, v] : a.entries)
        if (b.at(f) != v) return false;
    return true;
}

Cochain sub(const Cochain& a, const Cochain& b) {
    Cochain r = a;
    for (auto& [s, v] : b.entries) r.add(s, -v);
    return r;
}

void check_identities(const GridDomain& g, CounterRng& rng, int reps) {
    SimplicialComplex cx(g);
    EzOps ez(cx);
    const int m = g.dim();
    for (int rep = 0; rep < reps; ++rep) {
        for (int k = 0; k <= m; ++k) {
            // EML o AW = id on cubical cochains
            CubicalCochain q = random_cub(cx, k, rng);
            CHECK(cubical_eq(ez.eml(ez.aw(q)), q));

            // naturality with the differentials
            if (k < m) {
                CubicalCochain dq = coboundary(q, cx);
                CHECK(cochain_eq(ez.aw(dq), coboundary(ez.aw(q), cx)));
            }
            Cochain c = random_simp(cx, k, rng);
            if (k < m) {
                CHECK(cubical_eq(ez.eml(coboundary(c, cx)), coboundary(ez.eml(c), cx)));
            }

            // AW o EML - id = delta o SHI + SHI o delta
            Cochain lhs = sub(ez.aw(ez.eml(c)), c);
            Cochain rhs;
            rhs.dim = k;
            if (k > 0) rhs = coboundary(ez.shi(c), cx);
            if (k < m) {
                Cochain t = ez.shi(coboundary(c, cx));
                for (auto& [s, v] : t.entries) rhs.add(s, v);
            }
            CHECK(cochain_eq(lhs, rhs));
        }
    }
}

} // namespace

TEST_CASE("eilenberg-zilber identities on interval products") {
    CounterRng rng(2024);
    check_identities(GridDomain(1, {4}, Topology::cube), rng, 4);
    check_identities(GridDomain(2, {3, 3}, Topology::cube), rng, 6);
    check_identities(GridDomain(2, {3, 4}, Topology::torus), rng, 4);
    check_identities(GridDomain(3, {3, 3, 3}, Topology::cube), rng, 5);
    check_identities(GridDomain(3, {3, 3, 3}, Topology::torus), rng, 3);
    check_identities(GridDomain(4, {2, 2, 2, 2}, Topology::cube), rng, 2);
}

TEST_CASE("aw preserves vertex cochains") {
    GridDomain g(2, {3, 3}, Topology::cube);
    SimplicialComplex cx(g);
    EzOps ez(cx);
    CounterRng rng(5);
    CubicalCochain q = random_cub(cx, 0, rng);
    Cochain a = ez.aw(q);
    for (auto& [f, v] : q.entries) {
        CHECK(a.at(Simplex{f.base, 0, 0}) == v);
    }
    CubicalCochain zero;
    zero.dim = 1;
    CHECK(ez.aw(zero).is_zero());
    Cochain zs;
    zs.dim = 1;
    CHECK(ez.eml(zs).is_zero());
    CHECK(ez.shi(zs).is_zero());
}

TEST_CASE("cubical column counts are smaller than simplicial ones") {
    for (int m = 2; m <= 4; ++m) {
        GridDomain g(m, std::vector<int>(m, 4), Topology::cube);
        SimplicialComplex cx(g);
        for (int k = 1; k < m; ++k) CHECK(cx.count_faces(k) < cx.count_simplices(k));
    }
}
