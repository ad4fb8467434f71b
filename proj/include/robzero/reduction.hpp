#pragma once

#include <algorithm>
#include <cstdint>
#include <gmpxx.h>
#include <map>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "robzero/common.hpp"

namespace robzero {

// Coefficient rings for the sparse column reduction.  RingI64 throws
// ArithmeticOverflow so a caller can rerun the computation over RingMpz;
// coefficient blowup is possible in principle but rare in practice.
struct RingI64 {
    using V = long long;
    static V from_int(int x) { return x; }
    static bool is_zero(const V& a) { return a == 0; }
    static V add(const V& a, const V& b) { return checked_add(a, b); }
    static V mul(const V& a, const V& b) { return checked_mul(a, b); }
    static V neg(const V& a) { return checked_sub(0, a); }
    static bool divides(const V& a, const V& b) { return a != 0 && b % a == 0; }
    static V div_exact(const V& a, const V& b) { return a / b; } // b | a
    static void gcdext(const V& p, const V& q, V& g, V& a, V& b) {
        // extended Euclid on int64 with overflow checks
        V old_r = p, r = q, old_s = 1, s = 0, old_t = 0, t = 1;
        while (r != 0) {
            V quot = old_r / r;
            V tmp = checked_sub(old_r, checked_mul(quot, r)); old_r = r; r = tmp;
            tmp = checked_sub(old_s, checked_mul(quot, s)); old_s = s; s = tmp;
            tmp = checked_sub(old_t, checked_mul(quot, t)); old_t = t; t = tmp;
        }
        g = old_r; a = old_s; b = old_t;
        if (g < 0) { g = neg(g); a = neg(a); b = neg(b); }
    }
    static bool is_unit_or_zero(const V&) { return false; }
};

struct RingMpz {
    using V = mpz_class;
    static V from_int(int x) { return V(x); }
    static bool is_zero(const V& a) { return sgn(a) == 0; }
    static V add(const V& a, const V& b) { return a + b; }
    static V mul(const V& a, const V& b) { return a * b; }
    static V neg(const V& a) { return -a; }
    static bool divides(const V& a, const V& b) {
        return sgn(a) != 0 && mpz_divisible_p(b.get_mpz_t(), a.get_mpz_t());
    }
    static V div_exact(const V& a, const V& b) {
        V q;
        mpz_divexact(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
        return q;
    }
    static void gcdext(const V& p, const V& q, V& g, V& a, V& b) {
        mpz_gcdext(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
    }
    static bool is_unit_or_zero(const V&) { return false; }
};

struct RingZ2 {
    using V = unsigned char;
    static V from_int(int x) { return static_cast<V>(x & 1); }
    static bool is_zero(const V& a) { return a == 0; }
    static V add(const V& a, const V& b) { return a ^ b; }
    static V mul(const V& a, const V& b) { return a & b; }
    static V neg(const V& a) { return a; }
    static bool divides(const V& a, const V&) { return a != 0; }
    static V div_exact(const V& a, const V&) { return a; }
    static void gcdext(const V&, const V&, V& g, V& a, V& b) { g = 1; a = 1; b = 0; }
    static bool is_unit_or_zero(const V&) { return true; }
};

// One column streamed into a reduction: filtration rank, a deterministic
// tie-break id, and the sparse entries with small integer coefficients.
struct StreamedColumn {
    std::int32_t value_rank = 0;
    std::int64_t sort_id = 0;
    bool is_generator_image = false;
    std::vector<std::pair<Row, int>> entries;
};

class ColumnSource {
public:
    virtual ~ColumnSource() = default;
    virtual std::optional<StreamedColumn> next() = 0;
};

template <class R>
using SparseVec = std::map<std::int64_t, typename R::V>;

template <class R>
struct StoredColumn {
    std::vector<std::pair<std::int64_t, typename R::V>> m;     // rows ascending; lowest = back
    std::vector<std::pair<std::int64_t, typename R::V>> basis; // admission indices ascending
};

template <class R>
void axpy(SparseVec<R>& dst, const typename R::V& c,
          const std::vector<std::pair<std::int64_t, typename R::V>>& src) {
    if (R::is_zero(c)) return;
    for (const auto& [k, v] : src) {
        auto it = dst.find(k);
        if (it == dst.end()) {
            dst.emplace(k, R::mul(c, v));
        } else {
            it->second = R::add(it->second, R::mul(c, v));
            if (R::is_zero(it->second)) dst.erase(it);
        }
    }
}

template <class R>
void scale(SparseVec<R>& dst, const typename R::V& d) {
    for (auto& [k, v] : dst) v = R::mul(d, v);
}

template <class R>
std::vector<std::pair<std::int64_t, typename R::V>> combine(
    const typename R::V& a, const std::vector<std::pair<std::int64_t, typename R::V>>& u,
    const typename R::V& b, const SparseVec<R>& w) {
    std::vector<std::pair<std::int64_t, typename R::V>> out;
    out.reserve(u.size() + w.size());
    auto iu = u.begin();
    auto iw = w.begin();
    while (iu != u.end() || iw != w.end()) {
        if (iw == w.end() || (iu != u.end() && iu->first < iw->first)) {
            auto v = R::mul(a, iu->second);
            if (!R::is_zero(v)) out.emplace_back(iu->first, std::move(v));
            ++iu;
        } else if (iu == u.end() || iw->first < iu->first) {
            auto v = R::mul(b, iw->second);
            if (!R::is_zero(v)) out.emplace_back(iw->first, std::move(v));
            ++iw;
        } else {
            auto v = R::add(R::mul(a, iu->second), R::mul(b, iw->second));
            if (!R::is_zero(v)) out.emplace_back(iu->first, std::move(v));
            ++iu;
            ++iw;
        }
    }
    return out;
}

// Reduced prefix R: admitted columns with pairwise distinct lowest rows.
// reduce() realizes reduce_column: it resolves collisions of the in-progress
// column against the prefix, rewriting the colliding column too in the
// non-divisible integer case.  With force_divisibility it aborts (returns
// true) at the first collision whose lowest values do not divide.
template <class R>
class ReducedPrefix {
public:
    explicit ReducedPrefix(bool track_basis) : track_basis_(track_basis) {}

    bool track_basis() const { return track_basis_; }
    std::size_t size() const { return cols_.size(); }
    const StoredColumn<R>& column(std::size_t i) const { return cols_[i]; }

    const StoredColumn<R>* owner_of(std::int64_t row) const {
        auto it = owner_.find(row);
        return it == owner_.end() ? nullptr : &cols_[it->second];
    }

    bool reduce(SparseVec<R>& mat, SparseVec<R>& basis, bool force_divisibility) {
        while (!mat.empty()) {
            const std::int64_t row = mat.rbegin()->first;
            auto it = owner_.find(row);
            if (it == owner_.end()) return false; // reduced: new lowest
            StoredColumn<R>& coll = cols_[it->second];
            const typename R::V& P = coll.m.back().second;
            const typename R::V& Q = mat.rbegin()->second;
            if (R::divides(P, Q)) {
                typename R::V q = R::neg(R::div_exact(Q, P));
                axpy<R>(mat, q, coll.m);
                if (track_basis_) axpy<R>(basis, q, coll.basis);
                continue;
            }
            if (force_divisibility) return true;
            typename R::V g, a, b;
            R::gcdext(P, Q, g, a, b);
            typename R::V c = R::neg(R::div_exact(Q, g));
            typename R::V d = R::div_exact(P, g);
            StoredColumn<R> fresh;
            fresh.m = combine<R>(a, coll.m, b, mat);
            if (track_basis_) fresh.basis = combine<R>(a, coll.basis, b, basis);
            scale<R>(mat, d);
            axpy<R>(mat, c, coll.m);
            if (track_basis_) {
                scale<R>(basis, d);
                axpy<R>(basis, c, coll.basis);
            }
            cols_[it->second] = std::move(fresh);
        }
        return false;
    }

    // Admit a reduced nonzero column and register its lowest row.
    void admit(SparseVec<R>&& mat, SparseVec<R>&& basis) {
        StoredColumn<R> col;
        col.m.assign(mat.begin(), mat.end());
        if (track_basis_) col.basis.assign(basis.begin(), basis.end());
        owner_.emplace(col.m.back().first, static_cast<std::int32_t>(cols_.size()));
        cols_.push_back(std::move(col));
    }

    void reserve(std::size_t n) {
        cols_.reserve(n);
        owner_.reserve(n);
    }

private:
    bool track_basis_;
    std::vector<StoredColumn<R>> cols_;
    std::unordered_map<std::int64_t, std::int32_t> owner_;
};

template <class R>
struct EarliestSolution {
    bool trivial = false;        // rhs was already zero, no column needed
    std::int32_t value_rank = 0; // filtration rank of the minimizing column l
    std::int64_t col_sort_id = 0;
    std::int64_t admitted = 0;
    std::vector<std::pair<std::int64_t, typename R::V>> x; // sort_id -> coefficient, Mx = a
};

struct EarliestOptions {
    bool need_solution = true;
    std::int64_t reserve_hint = 0;
};

// EARLIEST SOLUTION: stream columns in filtration order, keep the reduced
// prefix, and after every admission retry reducing the right-hand side with
// the divisibility guard; the first admission that empties it is minimal.
template <class R>
std::optional<EarliestSolution<R>> earliest_solution(ColumnSource& source,
                                                     const std::vector<std::pair<Row, int>>& rhs,
                                                     const EarliestOptions& opts = {}) {
    ReducedPrefix<R> prefix(opts.need_solution);
    if (opts.reserve_hint > 0) prefix.reserve(static_cast<std::size_t>(opts.reserve_hint));
    SparseVec<R> a_m, a_b;
    for (auto [row, c] : rhs) {
        auto v = R::from_int(c);
        if (!R::is_zero(v)) a_m.emplace(row, v);
    }

    std::vector<std::int32_t> ranks;
    std::vector<std::int64_t> sort_ids;
    std::int64_t admitted = 0;

    auto success = [&](void) {
        EarliestSolution<R> out;
        out.admitted = admitted;
        if (a_b.empty()) {
            out.trivial = admitted == 0;
            // solution supported on admitted columns; empty basis means x = 0
            if (!out.trivial && !opts.need_solution) {
                out.value_rank = ranks.empty() ? 0 : ranks.back();
                out.col_sort_id = sort_ids.empty() ? 0 : sort_ids.back();
            }
            return out;
        }
        std::int64_t last = a_b.rbegin()->first;
        out.value_rank = ranks[static_cast<std::size_t>(last)];
        out.col_sort_id = sort_ids[static_cast<std::size_t>(last)];
        out.x.reserve(a_b.size());
        for (const auto& [seq, v] : a_b)
            out.x.emplace_back(sort_ids[static_cast<std::size_t>(seq)], R::neg(v));
        return out;
    };

    if (a_m.empty()) {
        EarliestSolution<R> out;
        out.trivial = true;
        return out;
    }

    while (true) {
        auto col = source.next();
        if (!col) return std::nullopt;
        const std::int64_t seq = admitted++;
        ranks.push_back(col->value_rank);
        sort_ids.push_back(col->sort_id);

        SparseVec<R> m, b;
        for (auto [row, c] : col->entries) {
            auto v = R::from_int(c);
            if (!R::is_zero(v)) m.emplace(row, v);
        }
        if (opts.need_solution) b.emplace(seq, R::from_int(1));
        prefix.reduce(m, b, false);
        if (!m.empty()) prefix.admit(std::move(m), std::move(b));

        prefix.reduce(a_m, a_b, true);
        if (a_m.empty()) {
            // Without basis tracking the killing column is the last admitted.
            if (!opts.need_solution) {
                EarliestSolution<R> out;
                out.admitted = admitted;
                out.value_rank = col->value_rank;
                out.col_sort_id = col->sort_id;
                return out;
            }
            return success();
        }
    }
}

// Buffers one column so merge logic can peek at the next filtration rank.
class PeekableSource {
public:
    explicit PeekableSource(ColumnSource& src) : src_(&src) {}
    std::int32_t peek_rank() {
        fill();
        return buf_ ? buf_->value_rank : INT32_MAX;
    }
    bool done() {
        fill();
        return !buf_;
    }
    StreamedColumn take() {
        fill();
        StreamedColumn c = std::move(*buf_);
        buf_.reset();
        return c;
    }

private:
    void fill() {
        if (!buf_ && !exhausted_) {
            buf_ = src_->next();
            if (!buf_) exhausted_ = true;
        }
    }
    ColumnSource* src_;
    std::optional<StreamedColumn> buf_;
    bool exhausted_ = false;
};

// PERSISTENT GENERATORS: reduce the coboundary matrices M (degree n-1, with
// change of basis) and N (degree n-2, rows indexed by the position of the
// (n-1)-cells in M's column order) in filtration order.  A column of M that
// reduces to zero births a new relative cohomology generator unless the
// reduced N-column owning its row divides the basis coefficient.
// mu(i) is the number of births with value <= level i; it is nondecreasing by
// construction.  N-columns of a value are processed before M-columns of the
// same value, matching the refined filtration that removes one (n-1)-cell
// per step.
template <class R>
class PersistentGeneratorEngine {
public:
    struct Generator {
        std::int32_t value_rank = 0;
        std::int64_t sort_id = 0; // colid of the birth column
        std::vector<std::pair<std::int64_t, typename R::V>> cocycle; // colid -> coefficient
    };

    PersistentGeneratorEngine(ColumnSource& mcols, ColumnSource& ncols) : m_(mcols), n_(ncols) {}

    // Advances the interleaved reduction through all events with rank below
    // `rank_exclusive`, returning births as they appear.  Resumable.
    std::optional<Generator> next_below(std::int32_t rank_exclusive) {
        while (true) {
            std::int32_t vn = n_.peek_rank();
            std::int32_t vm = m_.peek_rank();
            if (std::min(vn, vm) >= rank_exclusive) return std::nullopt;
            if (vn <= vm) {
                StreamedColumn col = n_.take();
                SparseVec<R> m, b;
                for (auto [row, c] : col.entries) {
                    auto v = R::from_int(c);
                    if (!R::is_zero(v)) m.emplace(row, v);
                }
                rn_.reduce(m, b, false);
                if (!m.empty()) rn_.admit(std::move(m), std::move(b));
                continue;
            }
            StreamedColumn col = m_.take();
            const std::int64_t seq = mseq_++;
            sort_ids_.push_back(col.sort_id);
            SparseVec<R> m, b;
            for (auto [row, c] : col.entries) {
                auto v = R::from_int(c);
                if (!R::is_zero(v)) m.emplace(row, v);
            }
            b.emplace(seq, R::from_int(1));
            rm_.reduce(m, b, false);
            if (!m.empty()) {
                rm_.admit(std::move(m), std::move(b));
                continue;
            }
            auto self = b.find(seq);
            if (self == b.end() || R::is_zero(self->second))
                throw std::logic_error("generator basis lost its own column coefficient");
            const StoredColumn<R>* own = rn_.owner_of(seq);
            if (own && own->m.back().first == seq && R::divides(own->m.back().second, self->second))
                continue; // cohomologous to earlier generators, mu unchanged
            Generator g;
            g.value_rank = col.value_rank;
            g.sort_id = col.sort_id;
            g.cocycle.reserve(b.size());
            for (const auto& [s, v] : b) g.cocycle.emplace_back(sort_ids_[static_cast<std::size_t>(s)], v);
            ++births_;
            return g;
        }
    }

    std::int64_t births() const { return births_; }
    std::int64_t m_columns() const { return mseq_; }

private:
    PeekableSource m_, n_;
    ReducedPrefix<R> rm_{true};
    ReducedPrefix<R> rn_{false};
    std::vector<std::int64_t> sort_ids_;
    std::int64_t mseq_ = 0;
    std::int64_t births_ = 0;
};

} // namespace robzero
