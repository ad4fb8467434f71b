#include "robzero/ez.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace robzero {

namespace {

int perm_sign(const std::array<int, kMaxDim>& axes, int k) {
    int inv = 0;
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            if (axes[i] > axes[j]) ++inv;
    return (inv & 1) ? -1 : +1;
}

} // namespace

void EzOps::aw_chain(const LocalSimplex& s, const std::function<void(const LocalFace&)>& fn) const {
    const int m = cx_->grid().dim();
    const int k = s.dim;
    // Assign to each axis j (in increasing order) a block of consecutive
    // chain steps of size 0 or 1; a block of size 1 at step t needs the axis
    // to move at step t.  Non-spanning axes contribute the coordinate at the
    // end of their block, spanning axes the coordinate before their step.
    struct Frame {
        int axis;
        int consumed;     // steps consumed before this axis
        AxesMask prefix;  // off + consumed steps
        AxesMask face_off;
        AxesMask face_axes;
    };
    std::function<void(int, int, AxesMask, AxesMask, AxesMask)> rec =
        [&](int axis, int consumed, AxesMask prefix, AxesMask off, AxesMask axes) {
            if (axis == m) {
                if (consumed == k) fn(LocalFace{off, axes});
                return;
            }
            AxesMask bit = static_cast<AxesMask>(1u << axis);
            // Size-0 block: axis contributes the vertex coordinate at `prefix`.
            rec(axis + 1, consumed, prefix, static_cast<AxesMask>(off | (prefix & bit)), axes);
            // Size-1 block: consume step `consumed`, which must move this axis.
            if (consumed < k && (s.step(consumed) & bit)) {
                AxesMask np = static_cast<AxesMask>(prefix | s.step(consumed));
                rec(axis + 1, consumed + 1, np, static_cast<AxesMask>(off | (prefix & bit)),
                    static_cast<AxesMask>(axes | bit));
            }
        };
    rec(0, 0, s.off, 0, 0);
}

void EzOps::eml_chain(const LocalFace& f, const std::function<void(const LocalSimplex&, int sign)>& fn) const {
    std::array<int, kMaxDim> axes{};
    int k = 0;
    for (int j = 0; j < cx_->grid().dim(); ++j)
        if (f.axes >> j & 1) axes[k++] = j;
    std::sort(axes.begin(), axes.begin() + k);
    do {
        LocalSimplex s;
        s.off = f.off;
        s.dim = k;
        for (int i = 0; i < k; ++i) s.steps |= std::uint64_t(1u << axes[i]) << (8 * i);
        fn(s, perm_sign(axes, k));
    } while (std::next_permutation(axes.begin(), axes.begin() + k));
}

void EzOps::local_boundary(const LocalSimplex& s,
                           const std::function<void(const LocalSimplex&, int sign)>& fn) const {
    const int k = s.dim;
    for (int i = 0; i <= k; ++i) {
        LocalSimplex r;
        r.dim = k - 1;
        if (i == 0) {
            r.off = static_cast<AxesMask>(s.off | s.step(0));
            r.steps = s.steps >> 8;
        } else if (i == k) {
            r.off = s.off;
            r.steps = s.steps & ((1ULL << (8 * (k - 1))) - 1);
        } else {
            r.off = s.off;
            std::uint64_t low = s.steps & ((1ULL << (8 * (i - 1))) - 1);
            std::uint64_t merged = (s.steps >> (8 * (i - 1)) & 0xff) | (s.steps >> (8 * i) & 0xff);
            std::uint64_t high = (i + 1 < kMaxDim) ? (s.steps >> (8 * (i + 1))) << (8 * i) : 0;
            r.steps = low | (merged << (8 * (i - 1))) | high;
        }
        fn(r, (i & 1) ? -1 : +1);
    }
}

LocalChain EzOps::cone(const LocalChain& c) {
    LocalChain out;
    for (const auto& [s, v] : c) {
        if (s.off == 0) continue; // cone point already first: degenerate
        LocalSimplex t;
        t.off = 0;
        t.steps = (s.steps << 8) | s.off;
        t.dim = s.dim + 1;
        out[t] += v;
        if (out[t] == 0) out.erase(t);
    }
    return out;
}

const LocalChain& EzOps::homotopy(const LocalSimplex& s) const {
    auto key = std::make_pair(s.steps, s.dim);
    auto it = h_memo_.find(key);
    if (it == h_memo_.end()) {
        LocalSimplex norm{0, s.steps, s.dim};
        it = h_memo_.emplace(key, build_homotopy(norm)).first;
    }
    return it->second;
}

LocalChain EzOps::build_homotopy(const LocalSimplex& s) const {
    // H(s) = cone( EML(AW(s)) - s - H(boundary s) ), with H = 0 on vertices.
    if (s.dim == 0) return {};
    LocalChain rhs;
    auto acc = [&](const LocalSimplex& t, long long v) {
        if (v == 0) return;
        auto [it, fresh] = rhs.emplace(t, 0);
        it->second = checked_add(it->second, v);
        if (it->second == 0) rhs.erase(it);
    };
    aw_chain(s, [&](const LocalFace& f) {
        eml_chain(f, [&](const LocalSimplex& t, int sign) { acc(t, sign); });
    });
    acc(s, -1);
    local_boundary(s, [&](const LocalSimplex& face, int sign) {
        // H of a face translates by the face's base offset.
        LocalSimplex shape{0, face.steps, face.dim};
        for (const auto& [t, v] : homotopy(shape)) {
            LocalSimplex shifted{static_cast<AxesMask>(t.off | face.off), t.steps, t.dim};
            acc(shifted, checked_mul(-sign, v));
        }
    });
    return cone(rhs);
}

Cochain EzOps::aw(const CubicalCochain& c) const {
    Cochain out;
    out.dim = c.dim;
    out.ring = c.ring;
    // Candidate simplices: dimension-matching simplices of every cell that
    // contains a support face.
    std::set<VertexId> cells;
    for (const auto& [f, v] : c.entries)
        cx_->cells_containing(f, [&](VertexId cell) { cells.insert(cell); });
    auto eval = [&](const CubeFace& f) { return c.at(f); };
    std::set<std::pair<std::int64_t, std::uint64_t>> seen;
    for (VertexId cell : cells) {
        for (std::uint64_t sh : cx_->shapes(c.dim)) {
            // all placements of the shape inside this cell
            AxesMask ext = 0;
            LocalSimplex ls{0, sh, c.dim};
            for (int i = 0; i < c.dim; ++i) ext |= ls.step(i);
            AxesMask rest = static_cast<AxesMask>(((1u << cx_->grid().dim()) - 1) & ~ext);
            for (AxesMask off = rest;; off = static_cast<AxesMask>((off - 1) & rest)) {
                Simplex s = global_simplex(cell, LocalSimplex{off, sh, c.dim});
                if (seen.insert({s.base, s.steps}).second) {
                    long long v = aw_eval(eval, s);
                    if (v != 0) out.add(s, v);
                }
                if (off == 0) break;
            }
        }
    }
    return out;
}

CubicalCochain EzOps::eml(const Cochain& c) const {
    CubicalCochain out;
    out.dim = c.dim;
    out.ring = c.ring;
    std::set<VertexId> cells;
    for (const auto& [s, v] : c.entries)
        cx_->cells_containing(s, [&](VertexId cell) { cells.insert(cell); });
    auto eval = [&](const Simplex& s) { return c.at(s); };
    std::set<std::pair<std::int64_t, AxesMask>> seen;
    const AxesMask full = static_cast<AxesMask>((1u << cx_->grid().dim()) - 1);
    for (VertexId cell : cells) {
        for (AxesMask axes : cx_->axis_combinations(c.dim)) {
            AxesMask rest = static_cast<AxesMask>(full & ~axes);
            for (AxesMask off = rest;; off = static_cast<AxesMask>((off - 1) & rest)) {
                CubeFace f = global_face(cell, LocalFace{off, axes});
                if (seen.insert({f.base, f.axes}).second) {
                    long long v = eml_eval(eval, f);
                    if (v != 0) out.add(f, v);
                }
                if (off == 0) break;
            }
        }
    }
    return out;
}

Cochain EzOps::shi(const Cochain& c) const {
    Cochain out;
    out.dim = c.dim - 1;
    out.ring = c.ring;
    if (c.dim == 0) return out;
    std::set<VertexId> cells;
    for (const auto& [s, v] : c.entries)
        cx_->cells_containing(s, [&](VertexId cell) { cells.insert(cell); });
    auto eval = [&](const Simplex& s) { return c.at(s); };
    std::set<std::pair<std::int64_t, std::uint64_t>> seen;
    for (VertexId cell : cells) {
        for (std::uint64_t sh : cx_->shapes(c.dim - 1)) {
            AxesMask ext = 0;
            LocalSimplex ls{0, sh, c.dim - 1};
            for (int i = 0; i < c.dim - 1; ++i) ext |= ls.step(i);
            AxesMask rest = static_cast<AxesMask>(((1u << cx_->grid().dim()) - 1) & ~ext);
            for (AxesMask off = rest;; off = static_cast<AxesMask>((off - 1) & rest)) {
                Simplex s = global_simplex(cell, LocalSimplex{off, sh, c.dim - 1});
                if (seen.insert({s.base, s.steps}).second) {
                    long long v = shi_eval(eval, s);
                    if (v != 0) out.add(s, v);
                }
                if (off == 0) break;
            }
        }
    }
    return out;
}

} // namespace robzero
