#include "doctest.h"

#include <cmath>

#include "robzero/obstruction.hpp"
#include "support.hpp"

using namespace robzero;
using robzero::testing::dense_prefix;

namespace {

double round_to(double v, int decimals) {
    double s = std::pow(10.0, decimals);
    return std::round(v * s) / s;
}

} // namespace

TEST_CASE("pullback is a cocycle on the starting complex") {
    SampledField f = gen_quadratic(2, 10);
    SimplicialComplex cx(f.grid);
    for (FiltrationMode mode : {FiltrationMode::simplexwise, FiltrationMode::cubical}) {
        Filtration filt(f, cx, mode, ThresholdMode::empirical);
        Pullback pb(filt);
        cx.for_each_simplex(2, [&](const Simplex& s) {
            if (filt.in_complex_at(s, filt.r0_rank())) CHECK(pb.delta_ybar(s) == 0);
        });
    }
}

TEST_CASE("quadratic n=2: primary persistence matches the reported tables") {
    // g=20, alpha-threshold cubical run: r1 = 0.8643, bounds [0.443, 2.127]
    {
        SampledField f = gen_quadratic(2, 20);
        PipelineOptions opt;
        opt.mode = FiltrationMode::cubical;
        opt.threshold = ThresholdMode::alpha;
        RobustnessReport rep = robustness_report(f, opt);
        REQUIRE(rep.r1.is_level());
        CHECK(round_to(rep.r1.value, 4) == doctest::Approx(0.8643));
        CHECK(rep.zero_guaranteed);
        REQUIRE(rep.lower_bound.has_value());
        REQUIRE(rep.upper_bound.has_value());
        CHECK(round_to(*rep.lower_bound, 3) == doctest::Approx(0.443));
        CHECK(round_to(*rep.upper_bound, 3) == doctest::Approx(2.127));
    }
    // g=10, empirical threshold: r1 = 0.889
    {
        SampledField f = gen_quadratic(2, 10);
        PipelineOptions opt;
        opt.mode = FiltrationMode::cubical;
        opt.threshold = ThresholdMode::empirical;
        RobustnessReport rep = robustness_report(f, opt);
        REQUIRE(rep.r1.is_level());
        CHECK(round_to(rep.r1.value, 3) == doctest::Approx(0.889));
    }
}

TEST_CASE("quadratic n=3: no guarantee of zero, r1 = r0") {
    SampledField f = gen_quadratic(3, 20);
    PipelineOptions opt;
    opt.mode = FiltrationMode::cubical;
    opt.threshold = ThresholdMode::alpha;
    opt.depth = Depth::primary;
    RobustnessReport rep = robustness_report(f, opt);
    CHECK(!rep.zero_guaranteed);
    // the obstruction dies at or below the starting level
    if (rep.r1.is_level()) CHECK(rep.r1.value == doctest::Approx(rep.r0));
    else CHECK(rep.r1.kind == Persistence::Kind::below_r0);
}

TEST_CASE("constant field: obstruction absent, non-existence robustness reported") {
    GridDomain g(2, {5, 5}, Topology::cube);
    SampledField f{g, 2, {}, 0.125, Norm::linf};
    f.values.assign(static_cast<std::size_t>(g.vertex_count()) * 2, 0.0);
    for (VertexId v = 0; v < g.vertex_count(); ++v) f.values[static_cast<std::size_t>(v) * 2] = 1.0;
    PipelineOptions opt;
    opt.mode = FiltrationMode::simplexwise;
    opt.threshold = ThresholdMode::alpha;
    RobustnessReport rep = robustness_report(f, opt);
    CHECK(rep.r1.kind == Persistence::Kind::below_r0);
    CHECK(!rep.zero_guaranteed);
    REQUIRE(rep.nonexistence_robustness.has_value());
    CHECK(*rep.nonexistence_robustness == doctest::Approx(1.0 - 0.125));
}

TEST_CASE("simplicial and cubical persistences stay within the interleaving gap") {
    for (int g : {8, 11}) {
        SampledField f = gen_quadratic(2, g);
        PipelineOptions a;
        a.mode = FiltrationMode::simplexwise;
        a.threshold = ThresholdMode::empirical;
        PipelineOptions b = a;
        b.mode = FiltrationMode::cubical;
        ObstructionResult ra = obstruction_pipeline(f, a);
        ObstructionResult rb = obstruction_pipeline(f, b);
        REQUIRE(ra.r1.is_level());
        REQUIRE(rb.r1.is_level());
        CHECK(std::fabs(ra.r1.value - rb.r1.value) <= 2.0 * f.alpha + 1e-12);
    }
}

TEST_CASE("extension witness: global cocycle extending the pullback") {
    for (FiltrationMode mode : {FiltrationMode::simplexwise, FiltrationMode::cubical}) {
        SampledField f = gen_quadratic(2, 8);
        PipelineOptions opt;
        opt.mode = mode;
        opt.threshold = ThresholdMode::empirical;
        opt.need_extension = true;
        ObstructionResult res = obstruction_pipeline(f, opt);
        REQUIRE(res.has_extension);
        REQUIRE(res.r1.is_level());
        SimplicialComplex cx(f.grid);
        CHECK(coboundary(res.extension, cx).is_zero());
        // x agrees with the pullback on the complex just above r1
        Filtration filt(f, cx, mode, ThresholdMode::empirical);
        Pullback pb(filt);
        std::int32_t above = res.r1.rank + 1;
        int checked = 0;
        cx.for_each_simplex(1, [&](const Simplex& s) {
            if (!filt.in_complex_at(s, above)) return;
            CHECK(res.extension.at(s) == pb.ybar(s));
            ++checked;
        });
        CHECK(checked > 0);
    }
}

TEST_CASE("hopf n=3 g=10: secondary obstruction carries the certificate") {
    SampledField h = gen_hopf(3, 10);
    PipelineOptions opt;
    opt.mode = FiltrationMode::cubical;
    opt.threshold = ThresholdMode::empirical;
    opt.depth = Depth::secondary;
    RobustnessReport rep = robustness_report(h, opt);
    CHECK(round_to(rep.r0, 1) == doctest::Approx(0.1));
    REQUIRE(rep.r2.is_level());
    CHECK(round_to(rep.r2.value, 2) == doctest::Approx(0.79));
    // the primary alone dies strictly earlier
    REQUIRE(rep.r1.is_level());
    CHECK(rep.r1.value < rep.r2.value);
    CHECK(rep.zero_guaranteed);
}

TEST_CASE("steenrod square of the extension: closed and vanishing on A") {
    // n=3 landscape on a 5-grid: the Hopf field padded with an inert axis, so
    // v(x) has dimension 4 < dim X and its coboundary is a real statement.
    SampledField hopf = gen_hopf(3, 4);
    GridDomain g5(5, {4, 4, 4, 4, 3}, Topology::cube);
    SampledField f{g5, 3, {}, hopf.alpha, Norm::linf};
    f.values.resize(static_cast<std::size_t>(g5.vertex_count()) * 3);
    for (VertexId v = 0; v < g5.vertex_count(); ++v) {
        MultiIndex mi = g5.vertex_index(v);
        MultiIndex h4{};
        for (int j = 0; j < 4; ++j) h4.c[j] = mi.c[j];
        const double* src = hopf.at(hopf.grid.vertex_id(h4));
        for (int k = 0; k < 3; ++k) f.values[static_cast<std::size_t>(v) * 3 + k] = src[k];
    }

    PipelineOptions opt;
    opt.mode = FiltrationMode::simplexwise;
    opt.threshold = ThresholdMode::empirical;
    opt.depth = Depth::primary;
    opt.need_extension = true;
    ObstructionResult res = obstruction_pipeline(f, opt);
    REQUIRE(res.has_extension);
    SimplicialComplex cx(f.grid);
    Filtration filt(f, cx, FiltrationMode::simplexwise, ThresholdMode::empirical);
    auto key = [&](VertexId v) { return filt.compat_key(v); };

    Cochain v = cup_i(res.extension, res.extension, 0, cx, key);
    CHECK(coboundary(v, cx).is_zero());
    // v(x) vanishes on the complex just above r1
    std::int32_t above = res.r1.is_level() ? res.r1.rank + 1 : filt.r0_rank();
    cx.for_each_simplex(4, [&](const Simplex& s) {
        if (filt.in_complex_at(s, above)) CHECK(v.at(s) == 0);
    });
    // bilinearity edge: cup with the zero cochain is zero
    Cochain zero;
    zero.dim = 2;
    zero.ring = Ring::integers;
    CHECK(cup_i(zero, res.extension, 0, cx, key).is_zero());
}

TEST_CASE("cup-i square of a z2 cocycle is closed on random small complexes") {
    CounterRng rng(314);
    for (int rep = 0; rep < 6; ++rep) {
        GridDomain g(4, {2, 2, 2, 2}, Topology::cube);
        SimplicialComplex cx(g);
        auto key = [](VertexId v) { return static_cast<std::uint64_t>(v); };
        // random z2 2-cocycle: kernel combination of the coboundary matrix
        std::unordered_map<Row, std::int64_t> rows;
        oracle::Mat dcols;
        std::vector<Simplex> cells2;
        cx.for_each_simplex(2, [&](const Simplex& s) { cells2.push_back(s); });
        for (const Simplex& s : cells2) {
            std::vector<mpz_class> col;
            cx.cofaces(s, [&](const Simplex& t, int sign) {
                auto [it, fresh] = rows.emplace(simplex_sort_id(cx, t), static_cast<std::int64_t>(rows.size()));
                if (static_cast<std::size_t>(it->second) >= col.size()) col.resize(it->second + 1, 0);
                col[it->second] += sign;
            });
            dcols.push_back(std::move(col));
        }
        oracle::Mat ker = oracle::kernel(dcols, static_cast<std::int64_t>(rows.size()));
        REQUIRE(!ker.empty());
        Cochain x;
        x.dim = 2;
        x.ring = Ring::z2;
        for (const auto& kv : ker) {
            if (rng.next_u64() % 2 == 0) continue;
            for (std::size_t j = 0; j < kv.size(); ++j) {
                long long c = mpz_class(kv[j] % 2).get_si();
                if (c != 0) x.add(cells2[j], 1);
            }
        }
        Cochain sq = cup_i(x, x, 4 - 3, cx, key); // n = 4 slice: cup_1 of 2-cochains
        CHECK(sq.dim == 3);
        CHECK(coboundary(sq, cx).is_zero());
    }
}

TEST_CASE("lemma A.1 consequence on small 4-cube grids with n=3") {
    CounterRng rng(2718);
    GridDomain g(4, {2, 2, 2, 2}, Topology::cube);
    SimplicialComplex cx(g);
    auto key = [](VertexId v) { return static_cast<std::uint64_t>(v); };

    // bases and matrices
    std::vector<Simplex> cells2, cells3;
    cx.for_each_simplex(2, [&](const Simplex& s) { cells2.push_back(s); });
    cx.for_each_simplex(3, [&](const Simplex& s) { cells3.push_back(s); });
    std::unordered_map<Row, std::int64_t> rows3, rows4;
    oracle::Mat d2;
    for (const Simplex& s : cells2) {
        std::vector<mpz_class> col;
        cx.cofaces(s, [&](const Simplex& t, int sign) {
            auto [it, fresh] = rows3.emplace(simplex_sort_id(cx, t), static_cast<std::int64_t>(rows3.size()));
            if (static_cast<std::size_t>(it->second) >= col.size()) col.resize(it->second + 1, 0);
            col[it->second] += sign;
        });
        d2.push_back(std::move(col));
    }
    oracle::Mat ker = oracle::kernel(d2, static_cast<std::int64_t>(rows3.size()));
    REQUIRE(!ker.empty());

    // random scalar landscape determines A
    SampledField land = robzero::testing::scalar_landscape(g, 3, rng);
    Filtration filt(land, cx, FiltrationMode::simplexwise, ThresholdMode::empirical);
    std::int32_t acut = filt.top_rank() / 2; // A = complex at this rank

    auto in_A = [&](const Simplex& s) { return filt.simplex_rank(s) >= acut; };

    // relative cocycles: kernel of d2 restricted to columns outside A
    oracle::Mat d2rel;
    std::vector<std::size_t> relidx;
    for (std::size_t j = 0; j < cells2.size(); ++j)
        if (!in_A(cells2[j])) {
            d2rel.push_back(d2[j]);
            relidx.push_back(j);
        }
    oracle::Mat kerrel = oracle::kernel(d2rel, static_cast<std::int64_t>(rows3.size()));

    // delta3 columns outside A for the relative-coboundary test
    oracle::Mat d3rel;
    for (const Simplex& s : cells3) {
        if (in_A(s)) continue;
        std::vector<mpz_class> col;
        cx.cofaces(s, [&](const Simplex& t, int sign) {
            auto [it, fresh] = rows4.emplace(simplex_sort_id(cx, t), static_cast<std::int64_t>(rows4.size()));
            if (static_cast<std::size_t>(it->second) >= col.size()) col.resize(it->second + 1, 0);
            col[it->second] += sign;
        });
        d3rel.push_back(std::move(col));
    }

    int done = 0;
    for (int rep = 0; rep < 10 && !kerrel.empty(); ++rep) {
        Cochain x;
        x.dim = 2;
        x.ring = Ring::integers;
        for (const auto& kv : ker)
            if (rng.next_u64() % 2)
                for (std::size_t j = 0; j < kv.size(); ++j)
                    if (sgn(kv[j]) != 0) x.add(cells2[j], kv[j].get_si());
        Cochain w;
        w.dim = 2;
        w.ring = Ring::integers;
        const auto& kv = kerrel[rng.next_u64() % kerrel.size()];
        for (std::size_t j = 0; j < kv.size(); ++j)
            if (sgn(kv[j]) != 0) w.add(cells2[relidx[j]], kv[j].get_si());

        Cochain xw = x;
        for (auto& [s, c] : w.entries) xw.add(s, -c);
        Cochain diff = cup_i(xw, xw, 0, cx, key);
        Cochain vx = cup_i(x, x, 0, cx, key);
        for (auto& [s, c] : vx.entries) diff.add(s, -c);
        // v(x - w) - v(x) vanishes on A and is a relative coboundary
        std::vector<mpz_class> target(rows4.size(), 0);
        for (auto& [s, c] : diff.entries) {
            if (in_A(s)) CHECK(c == 0);
            auto it = rows4.find(simplex_sort_id(cx, s));
            if (it == rows4.end()) {
                // a 4-simplex no outside-A column touches: must vanish
                CHECK(c == 0);
                continue;
            }
            target[static_cast<std::size_t>(it->second)] = mpz_class(static_cast<long>(c));
        }
        CHECK(oracle::solvable(d3rel, static_cast<std::int64_t>(rows4.size()), target));
        ++done;
    }
    CHECK(done == 10);
}

TEST_CASE("persistent generators span relative cohomology at every level (mini oracle)") {
    CounterRng rng(555);
    for (int trial = 0; trial < 3; ++trial) {
        for (Topology topo : {Topology::cube, Topology::torus}) {
            GridDomain g(3, {3, 3, 3}, topo);
            SimplicialComplex cx(g);
            const int n = 2; // H^1 with N = delta^0
            SampledField land = robzero::testing::scalar_landscape(g, n, rng);
            Filtration filt(land, cx, FiltrationMode::simplexwise, ThresholdMode::empirical);

            ColumnTable mtab = build_table(filt, n - 1);
            ColumnTable ntab = build_table(filt, n - 2);
            std::unordered_map<std::int64_t, std::int64_t> mpos;
            for (std::size_t i = 0; i < mtab.size(); ++i)
                mpos.emplace(mtab.row_key(i, cx), static_cast<std::int64_t>(i));

            TableSource msrc(mtab, cx);
            GeneratorNSource nsrc(ntab, cx, mpos);
            PersistentGeneratorEngine<RingI64> engine(msrc, nsrc);
            struct Birth {
                std::int32_t rank;
                std::vector<mpz_class> vec;
            };
            std::vector<Birth> births;
            while (auto gen = engine.next_below(INT32_MAX)) {
                Birth b;
                b.rank = gen->value_rank;
                b.vec.assign(mtab.size(), 0);
                for (auto& [pos, v] : gen->cocycle)
                    b.vec[static_cast<std::size_t>(pos)] = mpz_class(static_cast<long>(v));
                births.push_back(std::move(b));
            }

            // dense matrices for the oracle
            std::unordered_map<Row, std::int64_t> rows;
            oracle::Mat md = dense_prefix(mtab, cx, INT32_MAX, rows);
            oracle::Mat nd;
            {
                TableSource nsrc2(ntab, cx);
                // N columns over the m-position row space
                GeneratorNSource raw(ntab, cx, mpos);
                while (auto col = raw.next()) {
                    std::vector<mpz_class> dense;
                    for (auto [row, c] : col->entries) {
                        if (static_cast<std::size_t>(row) >= dense.size()) dense.resize(row + 1, 0);
                        dense[static_cast<std::size_t>(row)] += c;
                    }
                    nd.push_back(std::move(dense));
                }
            }

            // check generation at every data level
            std::int32_t prev_rank = -1;
            for (std::size_t i = 0; i < mtab.size(); ++i) {
                std::int32_t r = mtab.ranks[i];
                if (r == prev_rank) continue;
                prev_rank = r;
                std::size_t L = i;
                while (L < mtab.size() && mtab.ranks[L] == r) ++L; // prefix with rank <= r
                oracle::Mat mprefix(md.begin(), md.begin() + L);
                oracle::Mat zbasis = oracle::kernel(mprefix, static_cast<std::int64_t>(rows.size()));
                oracle::Mat bg;
                for (std::size_t j = 0; j < ntab.size(); ++j)
                    if (ntab.ranks[j] <= r) bg.push_back(nd[j]);
                for (const auto& b : births)
                    if (b.rank <= r) bg.push_back(b.vec);
                for (auto& z : zbasis) {
                    z.resize(mtab.size(), 0);
                    CHECK(oracle::solvable(bg, static_cast<std::int64_t>(mtab.size()), z));
                }
            }
        }
    }
}
