#include "doctest.h"

#include <cstdio>
#include <filesystem>

#include "robzero/field.hpp"
#include "robzero/gen.hpp"

using namespace robzero;

namespace {

std::string tmp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

} // namespace

TEST_CASE("norm values") {
    double v[2] = {3.0, -4.0};
    CHECK(norm_value(v, 2, Norm::l2) == doctest::Approx(5.0));
    CHECK(norm_value(v, 2, Norm::linf) == doctest::Approx(4.0));
    CHECK(norm_value(v, 2, Norm::l1) == doctest::Approx(7.0));
}

TEST_CASE("robf round trip is bit exact in both encodings") {
    GaussianOptions opt;
    opt.dims = 2;
    opt.grid = 6;
    opt.codomain = 3;
    opt.seed = 11;
    SampledField f = gen_gaussian(opt);

    for (bool binary : {true, false}) {
        std::string p = tmp_path(binary ? "rz_round.bin.robf" : "rz_round.txt.robf");
        save_field(f, p, binary);
        SampledField g = load_field(p);
        CHECK(g.n == f.n);
        CHECK(g.alpha == f.alpha);
        CHECK(g.grid.dim() == f.grid.dim());
        REQUIRE(g.values.size() == f.values.size());
        for (std::size_t i = 0; i < f.values.size(); ++i) CHECK(g.values[i] == f.values[i]);
    }
}

TEST_CASE("robf rejects malformed inputs") {
    std::string p = tmp_path("rz_bad.robf");
    {
        std::FILE* out = std::fopen(p.c_str(), "w");
        // declares codomain 3 but writes 2 components per vertex
        std::fputs("robf 1\ntopology cube\ndims 1\ngrid 2\ncodomain 3\nalpha 0.5\nnorm inf\ndata text\n", out);
        std::fputs("1.0 2.0\n0.5 0.25 0.125\n", out);
        std::fclose(out);
    }
    CHECK_THROWS_AS(load_field(p), InputError);
    {
        std::FILE* out = std::fopen(p.c_str(), "w");
        std::fputs("robf 2\ntopology cube\n", out);
        std::fclose(out);
    }
    CHECK_THROWS_AS(load_field(p), InputError);
}

TEST_CASE("quadratic benchmark formula and lipschitz constant") {
    SampledField f = gen_quadratic(2, 5);
    CHECK(f.alpha == doctest::Approx(8.0 / 4.0));
    // f at (1, 0)
    MultiIndex mi;
    mi.c[0] = 4;
    mi.c[1] = 2;
    const double* v = f.at(f.grid.vertex_id(mi));
    CHECK(v[0] == doctest::Approx(1.0));
    CHECK(v[1] == doctest::Approx(0.0));
    // origin vertex of an odd grid maps to zero
    const double* o = f.at(f.grid.vertex_id(MultiIndex{{2, 2}}));
    CHECK(o[0] == 0.0);
    CHECK(o[1] == 0.0);
    CHECK(f.alpha_consistent());
    CHECK(gen_quadratic(3, 6).alpha_consistent());
}

TEST_CASE("hopf benchmark formula and lipschitz constant") {
    SampledField h = gen_hopf(3, 5);
    CHECK(h.alpha == doctest::Approx(16.0 / 4.0));
    MultiIndex mi{{4, 2, 2, 2}}; // (1, 0, 0, 0)
    const double* v = h.at(h.grid.vertex_id(mi));
    CHECK(v[0] == doctest::Approx(0.0));
    CHECK(v[1] == doctest::Approx(0.0));
    CHECK(v[2] == doctest::Approx(1.0));
    CHECK(h.alpha_consistent());
    SampledField h4 = gen_hopf(4, 4);
    CHECK(h4.n == 4);
    CHECK(h4.grid.dim() == 5);
    CHECK(h4.alpha_consistent());
}

TEST_CASE("random quadratic fields are even and vanish at the origin") {
    SampledField f = gen_random_quadratic(5, 33);
    CHECK(f.alpha_consistent());
    const GridDomain& g = f.grid;
    const double* o = f.at(g.vertex_id(MultiIndex{{2, 2, 2, 2}}));
    for (int k = 0; k < 3; ++k) CHECK(o[k] == doctest::Approx(0.0).epsilon(1e-12));
    // f(-x) = f(x)
    MultiIndex a{{0, 1, 3, 4}}, b{{4, 3, 1, 0}};
    const double* fa = f.at(g.vertex_id(a));
    const double* fb = f.at(g.vertex_id(b));
    for (int k = 0; k < 3; ++k) CHECK(fa[k] == doctest::Approx(fb[k]));
}

TEST_CASE("gaussian generator: determinism, centering, plausible variance") {
    GaussianOptions opt;
    opt.dims = 3;
    opt.grid = 8;
    opt.codomain = 2;
    opt.seed = 77;
    opt.topology = Topology::torus;
    SampledField f1 = gen_gaussian(opt);
    SampledField f2 = gen_gaussian(opt);
    CHECK(f1.values == f2.values);
    // centered at the fixed torus point
    const double* z = f1.at(0);
    CHECK(z[0] == 0.0);
    CHECK(z[1] == 0.0);

    opt.topology = Topology::cube;
    opt.dims = 4;
    opt.grid = 7;
    SampledField fc = gen_gaussian(opt);
    MultiIndex mid{{3, 3, 3, 3}};
    const double* c = fc.at(fc.grid.vertex_id(mid));
    CHECK(c[0] == 0.0);
    CHECK(fc.alpha > 0.0);
    CHECK(fc.alpha_consistent());

    GaussianOptions v;
    v.dims = 4;
    v.grid = 12;
    v.codomain = 1;
    v.seed = 5;
    v.topology = Topology::torus;
    v.l = 3.0;
    SampledField fv = gen_gaussian(v);
    double mean = 0.0, m2 = 0.0;
    std::int64_t vn = fv.grid.vertex_count();
    for (VertexId x = 0; x < vn; ++x) mean += fv.values[static_cast<std::size_t>(x)];
    mean /= static_cast<double>(vn);
    for (VertexId x = 0; x < vn; ++x) {
        double d = fv.values[static_cast<std::size_t>(x)] - mean;
        m2 += d * d;
    }
    m2 /= static_cast<double>(vn);
    CHECK(m2 > 0.2);
    CHECK(m2 < 4.0);
}
