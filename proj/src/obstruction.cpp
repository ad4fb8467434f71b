#include "robzero/obstruction.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <unordered_set>

#include "robzero/assembly.hpp"
#include "robzero/sphere.hpp"

namespace robzero {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

} // namespace

ColumnTable build_table(const Filtration& filt, int k) {
    const SimplicialComplex& cx = filt.complex();
    ColumnTable t;
    t.cubical = filt.mode() == FiltrationMode::cubical;
    if (t.cubical) {
        struct E {
            std::int32_t rank;
            CubeFace f;
        };
        std::vector<E> es;
        es.reserve(static_cast<std::size_t>(cx.count_faces(k)));
        cx.for_each_face(k, [&](const CubeFace& f) { es.push_back({filt.cubical_rank(f), f}); });
        std::sort(es.begin(), es.end(), [&](const E& a, const E& b) {
            if (a.rank != b.rank) return a.rank < b.rank;
            return face_sort_id(cx.grid(), a.f) < face_sort_id(cx.grid(), b.f);
        });
        t.faces.reserve(es.size());
        t.ranks.reserve(es.size());
        for (auto& e : es) {
            t.faces.push_back(e.f);
            t.ranks.push_back(e.rank);
        }
    } else {
        struct E {
            std::int32_t rank;
            std::int64_t id;
            Simplex s;
        };
        std::vector<E> es;
        es.reserve(static_cast<std::size_t>(cx.count_simplices(k)));
        cx.for_each_simplex(k, [&](const Simplex& s) {
            es.push_back({filt.simplex_rank(s), simplex_sort_id(cx, s), s});
        });
        std::sort(es.begin(), es.end(), [&](const E& a, const E& b) {
            if (a.rank != b.rank) return a.rank < b.rank;
            return a.id < b.id;
        });
        t.simplices.reserve(es.size());
        t.ranks.reserve(es.size());
        for (auto& e : es) {
            t.simplices.push_back(e.s);
            t.ranks.push_back(e.rank);
        }
    }
    return t;
}

std::optional<StreamedColumn> TableSource::next() {
    if (pos_ >= t_->size() || t_->ranks[pos_] > cutoff_) return std::nullopt;
    StreamedColumn col;
    col.value_rank = t_->ranks[pos_];
    col.sort_id = static_cast<std::int64_t>(pos_);
    if (t_->cubical) {
        cx_->face_cofaces(t_->faces[pos_], [&](const CubeFace& g, int sign) {
            col.entries.emplace_back(face_row(g), sign);
        });
    } else {
        cx_->cofaces(t_->simplices[pos_], [&](const Simplex& g, int sign) {
            col.entries.emplace_back(simplex_sort_id(*cx_, g), sign);
        });
    }
    if (row_map_)
        for (auto& e : col.entries) e.first = row_map_(e.first);
    std::sort(col.entries.begin(), col.entries.end());
    ++pos_;
    return col;
}

std::optional<StreamedColumn> GeneratorNSource::next() {
    if (pos_ >= t_->size()) return std::nullopt;
    StreamedColumn col;
    col.value_rank = t_->ranks[pos_];
    col.sort_id = static_cast<std::int64_t>(pos_);
    auto row_of = [&](std::int64_t key) -> std::int64_t {
        auto it = mpos_->find(key);
        return it == mpos_->end() ? -1 : it->second;
    };
    if (t_->cubical) {
        cx_->face_cofaces(t_->faces[pos_], [&](const CubeFace& g, int sign) {
            std::int64_t row = row_of(face_row(g));
            if (row >= 0) col.entries.emplace_back(row, sign);
        });
    } else {
        cx_->cofaces(t_->simplices[pos_], [&](const Simplex& g, int sign) {
            std::int64_t row = row_of(simplex_sort_id(*cx_, g));
            if (row >= 0) col.entries.emplace_back(row, sign);
        });
    }
    std::sort(col.entries.begin(), col.entries.end());
    ++pos_;
    return col;
}

// ---------------------------------------------------------------------------
// Pullback of the fixed generator cocycle of H^(n-1)(Sigma^(n-1)).

Pullback::Pullback(const Filtration& filt) : filt_(&filt), r0_rank_(filt.r0_rank()) {}

long long Pullback::ybar(const Simplex& s) const {
    if (!filt_->in_complex_at(s, r0_rank_)) return 0;
    const SimplicialComplex& cx = filt_->complex();
    const int cnt = s.dim + 1;
    VertexId vs[kMaxDim + 1];
    cx.vertices(s, vs);
    std::uint64_t keys[kMaxDim + 1];
    std::int16_t ranks[kMaxDim + 1];
    const VertexApprox& ap = filt_->approx();
    for (int i = 0; i < cnt; ++i) {
        keys[i] = filt_->compat_key(vs[i]);
        std::int16_t r = ap.rank[static_cast<std::size_t>(vs[i])];
        if (r < 0) return 0;
        ranks[i] = r;
    }
    std::uint8_t ord[kMaxDim + 1];
    for (int i = 0; i < cnt; ++i) ord[i] = static_cast<std::uint8_t>(i);
    for (int i = 1; i < cnt; ++i)
        for (int j = i; j > 0 && keys[ord[j]] < keys[ord[j - 1]]; --j) std::swap(ord[j], ord[j - 1]);
    // image must be exactly the ordered simplex [e_1, ..., e_n]
    for (int i = 0; i < cnt; ++i)
        if (ranks[ord[i]] != 2 * i) return 0;
    return order_twist(keys, cnt);
}

long long Pullback::delta_ybar(const Simplex& s) const {
    const SimplicialComplex& cx = filt_->complex();
    long long acc = 0;
    for (int i = 0; i <= s.dim; ++i) {
        long long v = ybar(cx.face(s, i));
        if (v != 0) acc = checked_add(acc, (i & 1) ? -v : v);
    }
    return acc;
}

bool Pullback::cell_can_carry(VertexId cell_base) const {
    const GridDomain& g = filt_->field().grid;
    const AxesMask full = static_cast<AxesMask>((1u << g.dim()) - 1);
    MultiIndex mi = g.vertex_index(cell_base);
    int cnt = 0;
    std::int32_t mn = INT32_MAX;
    for (AxesMask t = full;; t = static_cast<AxesMask>((t - 1) & full)) {
        MultiIndex c = mi;
        g.shift_up(c, t);
        std::int32_t r = filt_->vertex_rank(g.vertex_id(c));
        mn = std::min(mn, r);
        if (r >= r0_rank_) ++cnt;
        if (t == 0) break;
    }
    return mn < r0_rank_ && cnt >= filt_->field().n;
}

std::vector<std::pair<Row, int>> primary_rhs(const Filtration& filt, const Pullback& pb,
                                             const EzOps& ez, const std::function<Row(Row)>& row_map) {
    const SimplicialComplex& cx = filt.complex();
    const GridDomain& g = cx.grid();
    const int n = filt.field().n;
    const AxesMask full = static_cast<AxesMask>((1u << g.dim()) - 1);
    std::vector<std::pair<Row, int>> rhs;

    auto emit = [&](Row key, long long v) {
        if (v == 0) return;
        if (v < INT32_MIN || v > INT32_MAX) throw ArithmeticOverflow();
        rhs.emplace_back(row_map ? row_map(key) : key, static_cast<int>(v));
    };

    if (filt.mode() == FiltrationMode::cubical) {
        // EML is natural with delta, so EML(delta ybar) = delta_cub(EML ybar);
        // evaluating EML ybar once per facet avoids the m!-sized shuffle of
        // every n-face.
        auto yb = [&](const Simplex& s) { return pb.ybar(s); };
        std::unordered_map<CubeFace, long long, CubeFaceHash> emly;
        auto emly_at = [&](const CubeFace& facet) {
            auto it = emly.find(facet);
            if (it != emly.end()) return it->second;
            long long v = ez.eml_eval(yb, facet);
            emly.emplace(facet, v);
            return v;
        };
        auto rhs_at = [&](const CubeFace& f) {
            long long acc = 0;
            int t = 0;
            for (int a = 0; a < g.dim(); ++a) {
                if (!(f.axes >> a & 1)) continue;
                int leib = (t & 1) ? -1 : +1;
                ++t;
                AxesMask sub = static_cast<AxesMask>(f.axes & ~(1u << a));
                MultiIndex mi = g.vertex_index(f.base);
                acc = checked_sub(acc, checked_mul(leib, emly_at(CubeFace{f.base, sub})));
                g.shift_up(mi, static_cast<AxesMask>(1u << a));
                acc = checked_add(acc, checked_mul(leib, emly_at(CubeFace{g.vertex_id(mi), sub})));
            }
            return acc;
        };
        std::unordered_set<std::int64_t> done;
        g.for_each_base(full, [&](VertexId cell, const MultiIndex&) {
            if (!pb.cell_can_carry(cell)) return;
            for (AxesMask axes : cx.axis_combinations(n)) {
                AxesMask rest = static_cast<AxesMask>(full & ~axes);
                for (AxesMask off = rest;; off = static_cast<AxesMask>((off - 1) & rest)) {
                    CubeFace f = ez.global_face(cell, LocalFace{off, axes});
                    Row key = face_row(f);
                    if (done.insert(key).second) emit(key, rhs_at(f));
                    if (off == 0) break;
                }
            }
        });
    } else {
        std::unordered_set<std::int64_t> done;
        g.for_each_base(full, [&](VertexId cell, const MultiIndex&) {
            if (!pb.cell_can_carry(cell)) return;
            for (std::uint64_t sh : cx.shapes(n)) {
                Simplex probe{0, sh, n};
                AxesMask ext = probe.extent();
                AxesMask rest = static_cast<AxesMask>(full & ~ext);
                for (AxesMask off = rest;; off = static_cast<AxesMask>((off - 1) & rest)) {
                    Simplex s = ez.global_simplex(cell, LocalSimplex{off, sh, n});
                    std::int64_t key = simplex_sort_id(cx, s);
                    if (done.insert(key).second) emit(key, pb.delta_ybar(s));
                    if (off == 0) break;
                }
            }
        });
    }
    std::sort(rhs.begin(), rhs.end());
    return rhs;
}

namespace {

struct PrimaryRun {
    bool rhs_zero = false;
    bool found = false;
    std::int32_t raw_rank = -1;   // rank of the killing column
    std::int64_t admitted = 0;
    std::int64_t columns_total = 0;
    std::vector<std::pair<std::int64_t, long long>> solution; // table position -> coefficient
};

template <class R>
PrimaryRun run_primary(const Filtration& filt, const Pullback& pb, const EzOps& ez,
                       const ColumnTable& table, bool need_witness) {
    PrimaryRun out;
    out.columns_total = static_cast<std::int64_t>(table.size());
    auto rhs = primary_rhs(filt, pb, ez);
    if (rhs.empty()) {
        out.rhs_zero = true;
        return out;
    }
    TableSource source(table, filt.complex());
    EarliestOptions opts;
    opts.need_solution = need_witness;
    auto sol = earliest_solution<R>(source, rhs, opts);
    if (!sol) return out; // exhausted: obstruction never expressible (treated as top level)
    out.found = true;
    out.raw_rank = sol->value_rank;
    out.admitted = sol->admitted;
    if (need_witness) {
        out.solution.reserve(sol->x.size());
        for (auto& [pos, v] : sol->x) {
            if constexpr (std::is_same_v<R, RingMpz>) {
                if (!v.fits_slong_p()) throw InputError("witness coefficient exceeds 64 bits");
                out.solution.emplace_back(pos, static_cast<long long>(v.get_si()));
            } else {
                out.solution.emplace_back(pos, static_cast<long long>(v));
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Secondary stage.

// Evaluator for x = ybar - c (simplicial mode) or the EZ lift (cubical mode).
struct ExtensionEval {
    const Pullback* pb = nullptr;
    const EzOps* ez = nullptr;
    const Cochain* c_simp = nullptr;        // simplicial witness
    const CubicalCochain* c_cub = nullptr;  // cubical witness

    long long operator()(const Simplex& s) const {
        long long v = pb->ybar(s);
        if (c_simp != nullptr) v = checked_sub(v, c_simp->at(s));
        if (c_cub != nullptr) {
            v = checked_sub(v, ez->aw_eval([&](const CubeFace& f) { return c_cub->at(f); }, s));
            v = checked_add(v, ez->shi_eval([&](const Simplex& t) { return pb->delta_ybar(t); }, s));
        }
        return v;
    }
};

// Cells where the extension x can be nonzero.
struct ExtensionSupport {
    std::unordered_set<std::int64_t> witness_cells;
    const Filtration* filt = nullptr;
    const Pullback* pb = nullptr;
    int n = 0;

    bool touches(VertexId cell) const {
        if (witness_cells.count(cell)) return true;
        // ybar or SHI(delta ybar) can be nonzero only where enough vertices
        // clear the r0 threshold.
        const GridDomain& g = filt->field().grid;
        const AxesMask full = static_cast<AxesMask>((1u << g.dim()) - 1);
        MultiIndex mi = g.vertex_index(cell);
        int cnt = 0;
        for (AxesMask t = full;; t = static_cast<AxesMask>((t - 1) & full)) {
            MultiIndex c = mi;
            g.shift_up(c, t);
            if (filt->vertex_rank(g.vertex_id(c)) >= filt->r0_rank()) ++cnt;
            if (t == 0) break;
        }
        return cnt >= n;
    }
};

// v(x) restricted to one cell, memoized per (n-1)-simplex of that cell.
template <class XEval>
struct CellCupEvaluator {
    const Filtration* filt;
    const XEval* x;
    std::unordered_map<Simplex, long long, SimplexHash> memo;

    long long xval(const Simplex& s) {
        auto it = memo.find(s);
        if (it != memo.end()) return it->second;
        long long v = (*x)(s);
        memo.emplace(s, v);
        return v;
    }
};

// Assemble v(x) expressed over cubical (n+1)-faces (cubical mode) or
// (n+1)-simplices (simplicial mode).
template <class XEval>
std::vector<std::pair<Row, int>> secondary_rhs(const Filtration& filt, const EzOps& ez, const XEval& x,
                                               const ExtensionSupport& supp, std::int32_t vanish_rank,
                                               bool integral) {
    const SimplicialComplex& cx = filt.complex();
    const GridDomain& g = cx.grid();
    const int n = filt.field().n;
    const AxesMask full = static_cast<AxesMask>((1u << g.dim()) - 1);
    const bool cubical = filt.mode() == FiltrationMode::cubical;
    std::vector<std::pair<Row, int>> rhs;
    std::unordered_set<std::int64_t> done;
    auto key_fn = [&](VertexId v) { return filt.compat_key(v); };

    g.for_each_base(full, [&](VertexId cell, const MultiIndex&) {
        if (cubical && filt.cell_rank(cell) > vanish_rank) return; // v(x) vanishes on A at r1+
        if (!supp.touches(cell)) return;
        CellCupEvaluator<XEval> cup{&filt, &x, {}};
        auto vx = [&](const Simplex& s) {
            return cup_square_value(cx, s, n, [&](const Simplex& f) { return cup.xval(f); }, key_fn,
                                    integral);
        };
        if (cubical) {
            for (AxesMask axes : cx.axis_combinations(n + 1)) {
                AxesMask rest = static_cast<AxesMask>(full & ~axes);
                for (AxesMask off = rest;; off = static_cast<AxesMask>((off - 1) & rest)) {
                    CubeFace f = ez.global_face(cell, LocalFace{off, axes});
                    Row key = face_row(f);
                    if (done.insert(key).second) {
                        long long v = ez.eml_eval(vx, f);
                        if (!integral) v &= 1;
                        if (v != 0) {
                            if (v < INT32_MIN || v > INT32_MAX) throw ArithmeticOverflow();
                            rhs.emplace_back(key, static_cast<int>(v));
                        }
                    }
                    if (off == 0) break;
                }
            }
        } else {
            for (std::uint64_t sh : cx.shapes(n + 1)) {
                Simplex probe{0, sh, n + 1};
                AxesMask rest = static_cast<AxesMask>(full & ~probe.extent());
                for (AxesMask off = rest;; off = static_cast<AxesMask>((off - 1) & rest)) {
                    Simplex s = ez.global_simplex(cell, LocalSimplex{off, sh, n + 1});
                    std::int64_t key = simplex_sort_id(cx, s);
                    if (done.insert(key).second) {
                        long long v = vx(s);
                        if (v != 0) {
                            if (v < INT32_MIN || v > INT32_MAX) throw ArithmeticOverflow();
                            rhs.emplace_back(key, static_cast<int>(v));
                        }
                    }
                    if (off == 0) break;
                }
            }
        }
    });
    std::sort(rhs.begin(), rhs.end());
    return rhs;
}

// v(w) of a generator cocycle w (reduced mod 2), expressed over the
// (n+1)-cells; entries are 0/1.
std::vector<std::pair<Row, int>> generator_image(const Filtration& filt, const EzOps& ez,
                                                 const ColumnTable& table,
                                                 const std::vector<std::pair<std::int64_t, int>>& cocycle_mod2) {
    const SimplicialComplex& cx = filt.complex();
    const GridDomain& g = cx.grid();
    const int n = filt.field().n;
    const AxesMask full = static_cast<AxesMask>((1u << g.dim()) - 1);
    const bool cubical = filt.mode() == FiltrationMode::cubical;
    auto key_fn = [&](VertexId v) { return filt.compat_key(v); };

    // w as a lookup structure plus its support cells.
    std::unordered_map<CubeFace, long long, CubeFaceHash> wcub;
    std::unordered_map<Simplex, long long, SimplexHash> wsimp;
    std::unordered_set<std::int64_t> cells;
    for (auto [pos, c] : cocycle_mod2) {
        if (c == 0) continue;
        if (cubical) {
            const CubeFace& f = table.faces[static_cast<std::size_t>(pos)];
            wcub[f] = 1;
            cx.cells_containing(f, [&](VertexId cell) { cells.insert(cell); });
        } else {
            const Simplex& s = table.simplices[static_cast<std::size_t>(pos)];
            wsimp[s] = 1;
            cx.cells_containing(s, [&](VertexId cell) { cells.insert(cell); });
        }
    }

    std::vector<std::pair<Row, int>> out;
    std::unordered_set<std::int64_t> done;
    for (std::int64_t cell : cells) {
        // AW(w) restricted to this cell, memoized.
        CellCupEvaluator<std::function<long long(const Simplex&)>> cup{&filt, nullptr, {}};
        std::function<long long(const Simplex&)> aww;
        if (cubical) {
            aww = [&](const Simplex& s) {
                return ez.aw_eval([&](const CubeFace& f) {
                    auto it = wcub.find(f);
                    return it == wcub.end() ? 0LL : it->second;
                }, s) & 1;
            };
        } else {
            aww = [&](const Simplex& s) {
                auto it = wsimp.find(s);
                return it == wsimp.end() ? 0LL : (it->second & 1);
            };
        }
        cup.x = &aww;
        auto vw = [&](const Simplex& s) {
            return cup_square_value(cx, s, n, [&](const Simplex& f) { return cup.xval(f); }, key_fn,
                                    false);
        };
        if (cubical) {
            for (AxesMask axes : cx.axis_combinations(n + 1)) {
                AxesMask rest = static_cast<AxesMask>(full & ~axes);
                for (AxesMask off = rest;; off = static_cast<AxesMask>((off - 1) & rest)) {
                    CubeFace f = ez.global_face(cell, LocalFace{off, axes});
                    Row key = face_row(f);
                    if (done.insert(key).second) {
                        long long v = ez.eml_eval(vw, f) & 1;
                        if (v != 0) out.emplace_back(key, 1);
                    }
                    if (off == 0) break;
                }
            }
        } else {
            for (std::uint64_t sh : cx.shapes(n + 1)) {
                Simplex probe{0, sh, n + 1};
                AxesMask rest = static_cast<AxesMask>(full & ~probe.extent());
                for (AxesMask off = rest;; off = static_cast<AxesMask>((off - 1) & rest)) {
                    Simplex s = ez.global_simplex(cell, LocalSimplex{off, sh, n + 1});
                    std::int64_t key = simplex_sort_id(cx, s);
                    if (done.insert(key).second) {
                        long long v = vw(s) & 1;
                        if (v != 0) out.emplace_back(key, 1);
                    }
                    if (off == 0) break;
                }
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Merged secondary column stream: coboundaries of n-cells interleaved with
// generator images v(w), ordered by filtration value (cells first on ties).
template <class R>
class SecondarySource : public ColumnSource {
public:
    SecondarySource(const Filtration& filt, const EzOps& ez, const ColumnTable& ncells,
                    const ColumnTable& gen_table, PersistentGeneratorEngine<R>* engine,
                    std::int64_t* generator_count)
        : filt_(&filt), ez_(&ez), faces_(ncells, filt.complex()), peek_(faces_),
          gen_table_(&gen_table), engine_(engine), gen_count_(generator_count) {}

    std::optional<StreamedColumn> next() override {
        while (true) {
            if (!pending_.empty()) {
                StreamedColumn col = std::move(pending_.front());
                pending_.erase(pending_.begin());
                if (col.entries.empty()) continue; // v(w) = 0 contributes nothing
                return col;
            }
            std::int32_t vface = peek_.peek_rank();
            if (engine_ != nullptr) {
                auto g = engine_->next_below(vface == INT32_MAX ? INT32_MAX : vface);
                if (g) {
                    StreamedColumn col;
                    col.value_rank = g->value_rank;
                    col.sort_id = -(1 + *gen_count_); // negative ids mark generator columns
                    col.is_generator_image = true;
                    ++*gen_count_;
                    std::vector<std::pair<std::int64_t, int>> mod2;
                    mod2.reserve(g->cocycle.size());
                    for (auto& [pos, v] : g->cocycle) {
                        int parity;
                        if constexpr (std::is_same_v<R, RingMpz>) {
                            parity = mpz_odd_p(v.get_mpz_t()) ? 1 : 0;
                        } else {
                            parity = static_cast<int>(v & 1);
                        }
                        if (parity) mod2.emplace_back(pos, 1);
                    }
                    col.entries = generator_image(*filt_, *ez_, *gen_table_, mod2);
                    pending_.push_back(std::move(col));
                    continue;
                }
            }
            if (peek_.done()) return std::nullopt;
            return peek_.take();
        }
    }

private:
    const Filtration* filt_;
    const EzOps* ez_;
    TableSource faces_;
    PeekableSource peek_;
    const ColumnTable* gen_table_;
    PersistentGeneratorEngine<R>* engine_;
    std::int64_t* gen_count_;
    std::vector<StreamedColumn> pending_;
};

} // namespace

// ---------------------------------------------------------------------------

ObstructionResult obstruction_pipeline(const SampledField& field, const PipelineOptions& opts,
                                       Diagnostics* diag_out) {
    for (int attempt = 0; attempt < 2; ++attempt) {
        try {
            ObstructionResult res;
            if (attempt == 1) res.diag.used_bignum = true;
            SimplicialComplex cx(field.grid);
            auto t0 = Clock::now();
            Filtration filt(field, cx, opts.mode, opts.threshold);
            res.diag.ms_filtration = ms_since(t0);
            res.r0 = filt.r0();

            EzOps ez(cx);
            Pullback pb(filt);
            const int n = field.n;
            const int m = field.grid.dim();
            const bool cubical = opts.mode == FiltrationMode::cubical;
            const bool want_secondary =
                opts.depth == Depth::secondary && n >= 3 && m >= n + 1;
            const bool need_witness = want_secondary || opts.need_extension;

            ColumnTable cols = build_table(filt, n - 1);
            res.diag.columns_total = static_cast<std::int64_t>(cols.size());

            t0 = Clock::now();
            PrimaryRun prim;
            if (attempt == 0)
                prim = run_primary<RingI64>(filt, pb, ez, cols, need_witness);
            else
                prim = run_primary<RingMpz>(filt, pb, ez, cols, need_witness);
            res.diag.ms_primary = ms_since(t0);
            res.diag.columns_admitted = prim.admitted;

            std::int32_t r1_rank; // clamped at r0
            if (prim.rhs_zero) {
                res.r1 = Persistence::below();
                r1_rank = filt.r0_rank();
                res.extendable_above = filt.r0();
            } else if (!prim.found) {
                // never expressible: persists through the top of the filtration
                r1_rank = filt.top_rank();
                res.r1 = Persistence::level(filt.level_value(r1_rank), r1_rank);
                res.extendable_above = std::nullopt;
            } else if (prim.raw_rank <= filt.r0_rank()) {
                res.r1 = Persistence::level(filt.r0(), filt.r0_rank());
                r1_rank = filt.r0_rank();
                res.extendable_above = filt.level_value(prim.raw_rank);
            } else {
                res.r1 = Persistence::level(filt.level_value(prim.raw_rank), prim.raw_rank);
                r1_rank = prim.raw_rank;
                res.extendable_above = res.r1.value;
            }

            // Extension witness x.  In cubical mode the SHI correction is
            // part of the lift even when the witness cochain is empty.
            Cochain c_simp;
            CubicalCochain c_cub;
            ExtensionEval x{&pb, &ez, nullptr, nullptr};
            if (need_witness && (prim.found || prim.rhs_zero)) {
                if (cubical) {
                    c_cub.dim = n - 1;
                    for (auto& [pos, v] : prim.solution)
                        c_cub.add(cols.faces[static_cast<std::size_t>(pos)], v);
                    x.c_cub = &c_cub;
                } else {
                    c_simp.dim = n - 1;
                    for (auto& [pos, v] : prim.solution)
                        c_simp.add(cols.simplices[static_cast<std::size_t>(pos)], v);
                    x.c_simp = &c_simp;
                }
            }

            if (opts.need_extension && (prim.found || prim.rhs_zero)) {
                // materialize x on the support cells for callers/tests
                res.extension.dim = n - 1;
                std::unordered_set<std::int64_t> cells;
                const AxesMask full = static_cast<AxesMask>((1u << m) - 1);
                ExtensionSupport supp{{}, &filt, &pb, n};
                if (cubical)
                    for (auto& [f, v] : c_cub.entries)
                        cx.cells_containing(f, [&](VertexId cell) { cells.insert(cell); });
                else
                    for (auto& [s, v] : c_simp.entries)
                        cx.cells_containing(s, [&](VertexId cell) { cells.insert(cell); });
                field.grid.for_each_base(full, [&](VertexId cell, const MultiIndex&) {
                    if (!cells.count(cell) && !supp.touches(cell)) return;
                    for (std::uint64_t sh : cx.shapes(n - 1)) {
                        Simplex probe{0, sh, n - 1};
                        AxesMask rest = static_cast<AxesMask>(full & ~probe.extent());
                        for (AxesMask off = rest;; off = static_cast<AxesMask>((off - 1) & rest)) {
                            Simplex s = ez.global_simplex(cell, LocalSimplex{off, sh, n - 1});
                            long long v = x(s);
                            if (v != 0 && !res.extension.entries.count(s)) res.extension.add(s, v);
                            if (off == 0) break;
                        }
                    }
                });
                res.has_extension = true;
            }

            // Secondary stage.  Runs whenever an extension exists; the
            // rhs-zero case uses x = ybar itself.
            if (!want_secondary || !(prim.found || prim.rhs_zero)) {
                res.r2 = res.r1;
                if (diag_out) *diag_out = res.diag;
                return res;
            }
            res.secondary_ran = true;

            t0 = Clock::now();
            const bool cube_domain = field.grid.topology() == Topology::cube;
            ExtensionSupport supp{{}, &filt, &pb, n};
            if (cubical)
                for (auto& [f, v] : c_cub.entries)
                    cx.cells_containing(f, [&](VertexId cell) { supp.witness_cells.insert(cell); });
            else
                for (auto& [s, v] : c_simp.entries)
                    cx.cells_containing(s, [&](VertexId cell) { supp.witness_cells.insert(cell); });

            ColumnTable ncells = build_table(filt, n);

            auto run_z2 = [&]() -> std::optional<std::int32_t> {
                // n > 3: Z2 system with persistent generator images.
                auto rhs = secondary_rhs(filt, ez, x, supp, r1_rank, false);
                if (rhs.empty()) return std::nullopt; // already a coboundary at r1
                std::unordered_map<std::int64_t, std::int64_t> mpos;
                mpos.reserve(cols.size());
                for (std::size_t i = 0; i < cols.size(); ++i) {
                    std::int64_t key = cols.cubical ? face_row(cols.faces[i])
                                                    : simplex_sort_id(cx, cols.simplices[i]);
                    mpos.emplace(key, static_cast<std::int64_t>(i));
                }
                ColumnTable n2cells = build_table(filt, n - 2);
                TableSource msrc(cols, cx);
                GeneratorNSource nsrc(n2cells, cx, mpos);
                if (attempt == 0) {
                    PersistentGeneratorEngine<RingI64> engine(msrc, nsrc);
                    SecondarySource<RingI64> src(filt, ez, ncells, cols, &engine, &res.diag.generators);
                    EarliestOptions eo;
                    eo.need_solution = false;
                    auto sol = earliest_solution<RingZ2>(src, rhs, eo);
                    if (!sol) return INT32_MAX;
                    res.diag.secondary_columns_admitted = sol->admitted;
                    return sol->value_rank;
                }
                PersistentGeneratorEngine<RingMpz> engine(msrc, nsrc);
                SecondarySource<RingMpz> src(filt, ez, ncells, cols, &engine, &res.diag.generators);
                EarliestOptions eo;
                eo.need_solution = false;
                auto sol = earliest_solution<RingZ2>(src, rhs, eo);
                if (!sol) return INT32_MAX;
                res.diag.secondary_columns_admitted = sol->admitted;
                return sol->value_rank;
            };

            auto run_z_for = [&](const ExtensionEval& xe) -> std::optional<std::int32_t> {
                auto rhs = secondary_rhs(filt, ez, xe, supp, r1_rank, true);
                if (rhs.empty()) return std::nullopt;
                TableSource src(ncells, cx);
                EarliestOptions eo;
                eo.need_solution = false;
                if (attempt == 0) {
                    auto sol = earliest_solution<RingI64>(src, rhs, eo);
                    if (!sol) return INT32_MAX;
                    res.diag.secondary_columns_admitted = sol->admitted;
                    return sol->value_rank;
                }
                auto sol = earliest_solution<RingMpz>(src, rhs, eo);
                if (!sol) return INT32_MAX;
                res.diag.secondary_columns_admitted = sol->admitted;
                return sol->value_rank;
            };

            // raw: nullopt = v(x) already a coboundary at r1; INT32_MAX =
            // never dies; otherwise the killing column's rank.
            auto publish = [&](std::optional<std::int32_t> raw) {
                if (!raw) {
                    res.r2 = prim.rhs_zero ? Persistence::below() : res.r1;
                    return;
                }
                if (*raw == INT32_MAX) {
                    std::int32_t top = filt.top_rank();
                    res.r2 = Persistence::level(filt.level_value(top), top);
                    res.extendable_above = std::nullopt;
                    return;
                }
                if (*raw <= r1_rank) {
                    // the secondary adds nothing beyond the primary
                    res.r2 = prim.rhs_zero ? Persistence::below() : res.r1;
                } else {
                    res.r2 = Persistence::level(filt.level_value(*raw), *raw);
                }
                double ext = filt.level_value(*raw);
                if (res.extendable_above) ext = std::max(ext, *res.extendable_above);
                res.extendable_above = ext;
            };

            if (n > 3) {
                publish(run_z2());
            } else if (cube_domain) {
                // n = 3 on a cube: generators are irrelevant, solve over Z.
                publish(run_z_for(x));
            } else {
                // n = 3 off the cube: one extension is testable; certifying all
                // of Omega(A) is a quadratic Diophantine problem.
                auto raw = run_z_for(x);
                if (!raw) {
                    res.r2 = prim.rhs_zero ? Persistence::below() : res.r1;
                } else if (*raw == INT32_MAX) {
                    std::int32_t top = filt.top_rank();
                    res.r2 = Persistence::inconclusive(filt.level_value(top), top);
                    res.extendable_above = std::nullopt;
                } else if (*raw <= r1_rank) {
                    res.r2 = res.r1;
                    double ext = filt.level_value(*raw);
                    if (res.extendable_above) ext = std::max(ext, *res.extendable_above);
                    res.extendable_above = ext;
                } else {
                    res.r2 = Persistence::inconclusive(filt.level_value(*raw), *raw);
                    double ext = filt.level_value(*raw);
                    if (res.extendable_above) ext = std::max(ext, *res.extendable_above);
                    res.extendable_above = ext;
                }
            }
            res.diag.ms_secondary = ms_since(t0);
            if (diag_out) *diag_out = res.diag;
            return res;
        } catch (const ArithmeticOverflow&) {
            if (attempt == 1) throw;
        }
    }
    throw std::logic_error("unreachable");
}

RobustnessReport robustness_report(const SampledField& field, const PipelineOptions& opts) {
    RobustnessReport rep;
    rep.mode = opts.mode;
    rep.threshold = opts.threshold;
    rep.depth = opts.depth;

    SimplicialComplex cx(field.grid);
    Filtration filt(field, cx, opts.mode, opts.threshold);
    rep.heuristic = filt.heuristic();

    ObstructionResult res = obstruction_pipeline(field, opts, &rep.diag);
    rep.r0 = res.r0;
    rep.r1 = res.r1;
    rep.r2 = res.r2;

    const int n = field.n;
    const int m = field.grid.dim();
    const double alpha = field.alpha;
    const bool cubical = opts.mode == FiltrationMode::cubical;
    const double up_slack = cubical ? 3.0 * alpha : alpha;
    const double alpha_threshold =
        alpha * std::pow(static_cast<double>(n), field.p == Norm::l1 ? 1.0 : (field.p == Norm::l2 ? 0.5 : 0.0));

    // Final persistence used for the lower bound: the secondary when it ran
    // to a conclusion, otherwise the primary.
    const Persistence& last = (res.secondary_ran && res.r2.is_level()) ? res.r2 : res.r1;

    rep.zero_guaranteed = last.is_level() && last.value > rep.r0;
    if (rep.zero_guaranteed) {
        rep.lower_bound = last.value - alpha;
        if (last.value <= alpha_threshold) rep.heuristic = true;
    }

    // Upper bound: valid when extendability to the tested skeleton decides
    // extendability to all of X.
    const bool upper_valid = n < 3 || m <= n || (m <= n + 1 && res.secondary_ran);
    if (upper_valid) {
        double cap = field.max_magnitude() + alpha;
        double up;
        if (res.extendable_above) {
            up = *res.extendable_above + up_slack;
            if (*res.extendable_above < alpha_threshold) rep.heuristic = true;
        } else {
            up = cap; // obstruction survives every level
        }
        if (up >= cap) {
            up = cap;
            rep.upper_capped = true;
        }
        rep.upper_bound = up;
    }

    if (!rep.zero_guaranteed) {
        double mn = field.min_magnitude();
        if (mn > 0.0) rep.nonexistence_robustness = mn - alpha;
    }
    return rep;
}

} // namespace robzero
