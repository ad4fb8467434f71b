#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "robzero/cochain.hpp"
#include "robzero/grid.hpp"

namespace robzero {

// Cut patterns for the cup-i product of two p-cochains: the ordered vertex
// list of a (2p-i)-simplex is split into i+2 overlapping consecutive blocks;
// the first factor sees the even blocks, the second the odd ones.  Patterns
// are index lists into the sorted vertex list.
struct CupPattern {
    std::vector<std::array<std::uint8_t, kMaxDim + 2>> u_idx;
    std::vector<std::array<std::uint8_t, kMaxDim + 2>> v_idx;
    int u_len = 0, v_len = 0;
    int count() const { return static_cast<int>(u_idx.size()); }
};

const CupPattern& cup_pattern(int p, int q, int i);

// Sub-simplex of s spanned by the given chain positions (ascending).
Simplex subsimplex(const SimplicialComplex& cx, const Simplex& s, const std::uint8_t* pos, int count);

// Parity of the permutation sorting the chain vertices of s by the given
// total-order keys; +1 or -1.  Keys must be pairwise distinct.
int order_twist(const std::uint64_t* keys, int count);

// Generic cup-i product over the vertex order given by `key`.  Inputs and
// output are stored in the structural orientation; over Z2 orientation twists
// vanish, over the integers (only i = 0 is required there) the twists are
// applied.  Only simplices reachable from the supports are produced.
Cochain cup_i(const Cochain& u, const Cochain& v, int i, const SimplicialComplex& cx,
              const std::function<std::uint64_t(VertexId)>& key);

// v(x) on one (n+1)-simplex: the cup-(n-3) square of x mod 2 (n > 3) or the
// integral cup square (n = 3), over the compatible vertex order.
template <class Eval, class Key>
long long cup_square_value(const SimplicialComplex& cx, const Simplex& s, int n, const Eval& x,
                           const Key& key, bool integral) {
    const int sdim = s.dim; // n + 1
    const int cnt = sdim + 1;
    VertexId vs[kMaxDim + 1];
    cx.vertices(s, vs);
    std::uint64_t keys[kMaxDim + 1];
    for (int i = 0; i < cnt; ++i) keys[i] = key(vs[i]);
    // argsort by compatible key
    std::uint8_t ord[kMaxDim + 1];
    for (int i = 0; i < cnt; ++i) ord[i] = static_cast<std::uint8_t>(i);
    for (int i = 1; i < cnt; ++i)
        for (int j = i; j > 0 && keys[ord[j]] < keys[ord[j - 1]]; --j) std::swap(ord[j], ord[j - 1]);

    const CupPattern& pat = cup_pattern(n - 1, n - 1, n - 3);
    long long acc = 0;
    std::uint8_t su[kMaxDim + 2], sv[kMaxDim + 2];
    for (int t = 0; t < pat.count(); ++t) {
        for (int a = 0; a < pat.u_len; ++a) su[a] = ord[pat.u_idx[t][a]];
        for (int a = 0; a < pat.v_len; ++a) sv[a] = ord[pat.v_idx[t][a]];
        std::sort(su, su + pat.u_len);
        std::sort(sv, sv + pat.v_len);
        Simplex fu = subsimplex(cx, s, su, pat.u_len);
        Simplex fv = subsimplex(cx, s, sv, pat.v_len);
        long long xu = x(fu);
        if (xu == 0) continue;
        long long xv = x(fv);
        if (xv == 0) continue;
        long long term = checked_mul(xu, xv);
        if (integral) {
            std::uint64_t ku[kMaxDim + 1], kv[kMaxDim + 1];
            for (int a = 0; a < pat.u_len; ++a) ku[a] = keys[su[a]];
            for (int a = 0; a < pat.v_len; ++a) kv[a] = keys[sv[a]];
            term = checked_mul(term, order_twist(ku, pat.u_len));
            term = checked_mul(term, order_twist(kv, pat.v_len));
        }
        acc = checked_add(acc, term);
    }
    if (integral) acc = checked_mul(acc, order_twist(keys, cnt));
    return integral ? acc : (acc & 1);
}

} // namespace robzero
