#include "robzero/cup.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <tuple>

namespace robzero {

namespace {

// Enumerate the overlapping block decompositions: cuts 0 <= c_1 < ... < c_{i+1} <= n
// splitting [0..n] into blocks B_0..B_{i+1} that overlap at the cuts; the
// first factor reads the union of even blocks, the second the odd ones.
CupPattern build_pattern(int p, int q, int i) {
    CupPattern pat;
    pat.u_len = p + 1;
    pat.v_len = q + 1;
    const int n = p + q - i; // simplex dimension
    const int cuts = i + 1;
    std::vector<int> c(cuts);
    std::function<void(int, int)> rec = [&](int t, int lo) {
        if (t == cuts) {
            std::array<std::uint8_t, kMaxDim + 2> u{}, v{};
            int ui = 0, vi = 0;
            int prev = 0;
            bool ok = true;
            for (int b = 0; b <= cuts && ok; ++b) {
                int hi = (b == cuts) ? n : c[b];
                for (int pos = prev; pos <= hi; ++pos) {
                    if (b % 2 == 0) {
                        if (ui > p) { ok = false; break; }
                        u[ui++] = static_cast<std::uint8_t>(pos);
                    } else {
                        if (vi > q) { ok = false; break; }
                        v[vi++] = static_cast<std::uint8_t>(pos);
                    }
                }
                prev = hi;
            }
            if (ok && ui == p + 1 && vi == q + 1) {
                pat.u_idx.push_back(u);
                pat.v_idx.push_back(v);
            }
            return;
        }
        for (int x = lo; x <= n; ++x) {
            c[t] = x;
            rec(t + 1, x + 1);
        }
    };
    if (cuts <= 0) throw InputError("cup_i needs i >= 0");
    rec(0, 0);
    return pat;
}

} // namespace

const CupPattern& cup_pattern(int p, int q, int i) {
    static std::map<std::tuple<int, int, int>, CupPattern> cache;
    auto key = std::make_tuple(p, q, i);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, build_pattern(p, q, i)).first;
    return it->second;
}

Simplex subsimplex(const SimplicialComplex& cx, const Simplex& s, const std::uint8_t* pos, int count) {
    Simplex r;
    r.dim = count - 1;
    if (pos[0] == 0) {
        r.base = s.base;
    } else {
        MultiIndex mi = cx.grid().vertex_index(s.base);
        AxesMask acc = 0;
        for (int i = 0; i < pos[0]; ++i) acc |= s.step(i);
        cx.grid().shift_up(mi, acc);
        r.base = cx.grid().vertex_id(mi);
    }
    for (int t = 1; t < count; ++t) {
        AxesMask acc = 0;
        for (int i = pos[t - 1]; i < pos[t]; ++i) acc |= s.step(i);
        r.set_step(t - 1, acc);
    }
    return r;
}

int order_twist(const std::uint64_t* keys, int count) {
    int inv = 0;
    for (int i = 0; i < count; ++i)
        for (int j = i + 1; j < count; ++j)
            if (keys[i] > keys[j]) ++inv;
    return (inv & 1) ? -1 : +1;
}

Cochain cup_i(const Cochain& u, const Cochain& v, int i, const SimplicialComplex& cx,
              const std::function<std::uint64_t(VertexId)>& key) {
    if (u.dim != v.dim && i > 0) throw InputError("cup_i expects equal-dimensional factors");
    const int p = u.dim, q = v.dim;
    const int rdim = p + q - i;
    if (i < 0 || rdim < 0 || rdim > cx.grid().dim()) throw InputError("cup_i dimension mismatch");
    const bool integral = u.ring == Ring::integers;

    Cochain out;
    out.dim = rdim;
    out.ring = u.ring;

    // Candidate result simplices live in cells touching both supports.
    std::set<VertexId> cells;
    for (const auto& [s, c] : u.entries)
        cx.cells_containing(s, [&](VertexId cell) { cells.insert(cell); });

    const CupPattern& pat = cup_pattern(p, q, i);
    auto ueval = [&](const Simplex& s) { return u.at(s); };
    auto veval = [&](const Simplex& s) { return v.at(s); };

    std::set<std::pair<std::int64_t, std::uint64_t>> seen;
    for (VertexId cell : cells) {
        for (std::uint64_t sh : cx.shapes(rdim)) {
            AxesMask ext = 0;
            Simplex probe{0, sh, rdim};
            for (int t = 0; t < rdim; ++t) ext |= probe.step(t);
            AxesMask rest = static_cast<AxesMask>(((1u << cx.grid().dim()) - 1) & ~ext);
            for (AxesMask off = rest;; off = static_cast<AxesMask>((off - 1) & rest)) {
                MultiIndex mi = cx.grid().vertex_index(cell);
                cx.grid().shift_up(mi, off);
                Simplex s{cx.grid().vertex_id(mi), sh, rdim};
                if (seen.insert({s.base, s.steps}).second) {
                    // evaluate the pattern sum over the compatible order
                    const int cnt = rdim + 1;
                    VertexId vs[kMaxDim + 1];
                    cx.vertices(s, vs);
                    std::uint64_t keys[kMaxDim + 1];
                    for (int a = 0; a < cnt; ++a) keys[a] = key(vs[a]);
                    std::uint8_t ord[kMaxDim + 1];
                    for (int a = 0; a < cnt; ++a) ord[a] = static_cast<std::uint8_t>(a);
                    for (int a = 1; a < cnt; ++a)
                        for (int b = a; b > 0 && keys[ord[b]] < keys[ord[b - 1]]; --b)
                            std::swap(ord[b], ord[b - 1]);
                    long long acc = 0;
                    std::uint8_t su[kMaxDim + 2], sv[kMaxDim + 2];
                    for (int t = 0; t < pat.count(); ++t) {
                        for (int a = 0; a < pat.u_len; ++a) su[a] = ord[pat.u_idx[t][a]];
                        for (int a = 0; a < pat.v_len; ++a) sv[a] = ord[pat.v_idx[t][a]];
                        std::sort(su, su + pat.u_len);
                        std::sort(sv, sv + pat.v_len);
                        long long xu = ueval(subsimplex(cx, s, su, pat.u_len));
                        if (xu == 0) continue;
                        long long xv = veval(subsimplex(cx, s, sv, pat.v_len));
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
                    out.add(s, integral ? acc : (acc & 1));
                }
                if (off == 0) break;
            }
        }
    }
    return out;
}

} // namespace robzero
