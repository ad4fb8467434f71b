#include "robzero/gen.hpp"

#include <cmath>
#include <complex>
#include <gmpxx.h>
#include <fftw3.h>
#include <numeric>

namespace robzero {

double CounterRng::next_gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = next_unit();
    double u2 = next_unit();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

// The benchmark formulas are evaluated in exact rational arithmetic and
// rounded once per component.  Grid rationals are not dyadic, so chaining
// double operations would split exact magnitude ties by an ulp and perturb
// both the level set and the dominant-component choice.
SampledField gen_quadratic(int n, int g) {
    if (n < 2 || g < 2) throw InputError("gen_quadratic needs n >= 2, g >= 2");
    GridDomain grid(n, std::vector<int>(n, g), Topology::cube);
    SampledField f{grid, n, {}, 4.0 * n / (g - 1), Norm::linf};
    f.values.resize(static_cast<std::size_t>(grid.vertex_count()) * n);
    std::vector<mpq_class> x(n);
    for (VertexId v = 0; v < grid.vertex_count(); ++v) {
        MultiIndex mi = grid.vertex_index(v);
        for (int j = 0; j < n; ++j) x[j] = mpq_class(2 * mi.c[j] - (g - 1), g - 1);
        double* out = f.at(v);
        mpq_class s = x[0] * x[0];
        for (int j = 1; j < n; ++j) s -= x[j] * x[j];
        out[0] = s.get_d();
        for (int j = 1; j < n; ++j) out[j] = mpq_class(2 * x[0] * x[j]).get_d();
    }
    return f;
}

SampledField gen_hopf(int n, int g) {
    if (n < 3 || g < 2) throw InputError("gen_hopf needs n >= 3, g >= 2");
    const int m = n + 1;
    GridDomain grid(m, std::vector<int>(m, g), Topology::cube);
    SampledField f{grid, n, {}, 4.0 * (n + 1) / (g - 1), Norm::linf};
    f.values.resize(static_cast<std::size_t>(grid.vertex_count()) * n);
    std::vector<mpq_class> x(m);
    for (VertexId v = 0; v < grid.vertex_count(); ++v) {
        MultiIndex mi = grid.vertex_index(v);
        for (int j = 0; j < m; ++j) x[j] = mpq_class(2 * mi.c[j] - (g - 1), g - 1);
        double* out = f.at(v);
        out[0] = mpq_class(2 * x[0] * x[2] + 2 * x[1] * x[3]).get_d();
        out[1] = mpq_class(2 * x[1] * x[2] - 2 * x[0] * x[3]).get_d();
        out[2] = mpq_class(x[0] * x[0] + x[1] * x[1] - x[2] * x[2] - x[3] * x[3]).get_d();
        for (int j = 4; j <= n; ++j) out[j - 1] = x[j].get_d();
    }
    return f;
}

namespace {

// Synthesize one real stationary component on the g^m torus: scale white
// Gaussian noise in frequency space by sqrt(S(p)) and transform back.  The
// spectrum uses aliased (centered) frequencies so it is symmetric and the
// covariance real; it is normalized so the marginal variance is exactly 1.
void synth_component(const GridDomain& grid, Spectrum spec, double l, CounterRng& rng,
                     std::vector<double>& out) {
    const int m = grid.dim();
    const std::int64_t vn = grid.vertex_count();
    std::vector<int> dims(m);
    for (int j = 0; j < m; ++j) dims[j] = grid.resolution(j);

    std::vector<std::complex<double>> buf(vn);
    for (std::int64_t v = 0; v < vn; ++v)
        buf[v] = {rng.next_gaussian(), rng.next_gaussian()};

    // Spectral weights on centered frequencies.
    std::vector<double> weight(vn);
    double total = 0.0;
    for (std::int64_t v = 0; v < vn; ++v) {
        MultiIndex mi = grid.vertex_index(v);
        double p2 = 0.0;
        for (int j = 0; j < m; ++j) {
            int g = dims[j];
            int q = mi.c[j] <= g / 2 ? mi.c[j] : mi.c[j] - g;
            p2 += double(q) * q;
        }
        double s;
        if (spec == Spectrum::power) {
            s = std::pow(1.0 + p2, -l);
        } else {
            // Gaussian covariance exp(-d^2/(2 l^2)) has a Gaussian spectrum.
            double scale = 2.0 * M_PI * M_PI * l * l / (double(dims[0]) * dims[0]);
            s = std::exp(-p2 * scale);
        }
        weight[v] = s;
        total += s;
    }
    // The real part of the synthesized field has variance sum_p S(p) * norm^2
    // (each complex weight contributes |c_p|^2 through independent re/im
    // noise); normalize the marginal to exactly 1.
    double norm = 1.0 / std::sqrt(total);
    for (std::int64_t v = 0; v < vn; ++v) buf[v] *= std::sqrt(weight[v]) * norm;

    fftw_plan plan = fftw_plan_dft(m, dims.data(), reinterpret_cast<fftw_complex*>(buf.data()),
                                   reinterpret_cast<fftw_complex*>(buf.data()), FFTW_BACKWARD,
                                   FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    out.resize(vn);
    for (std::int64_t v = 0; v < vn; ++v) out[v] = buf[v].real();
}

} // namespace

SampledField gen_gaussian(const GaussianOptions& opt) {
    if (opt.grid < 2 || opt.dims < 1 || opt.codomain < 1 || opt.l <= 0.0)
        throw InputError("invalid gaussian generator parameters");
    const int m = opt.dims;
    const bool cube = opt.topology == Topology::cube;
    const int synth_g = cube ? 2 * opt.grid : opt.grid;
    GridDomain synth_grid(m, std::vector<int>(m, synth_g), Topology::torus);
    GridDomain out_grid(m, std::vector<int>(m, opt.grid), opt.topology);

    SampledField f{out_grid, opt.codomain, {}, 0.0, Norm::linf};
    f.values.resize(static_cast<std::size_t>(out_grid.vertex_count()) * opt.codomain);

    std::vector<double> comp;
    for (int c = 0; c < opt.codomain; ++c) {
        CounterRng rng(opt.seed, static_cast<std::uint64_t>(c) + 1);
        synth_component(synth_grid, opt.spectrum, opt.l, rng, comp);
        if (cube) {
            // Restrict the periodic field to the first g indices per axis.
            for (VertexId v = 0; v < out_grid.vertex_count(); ++v) {
                MultiIndex mi = out_grid.vertex_index(v);
                f.values[static_cast<std::size_t>(v) * opt.codomain + c] = comp[synth_grid.vertex_id(mi)];
            }
        } else {
            for (VertexId v = 0; v < out_grid.vertex_count(); ++v)
                f.values[static_cast<std::size_t>(v) * opt.codomain + c] = comp[v];
        }
    }

    // Center: analyze f(x) - f(x0), x0 the cube midpoint (vertex 0 on a torus).
    MultiIndex mid{};
    if (cube)
        for (int j = 0; j < m; ++j) mid.c[j] = (opt.grid - 1) / 2;
    VertexId x0 = out_grid.vertex_id(mid);
    std::vector<double> f0(f.at(x0), f.at(x0) + opt.codomain);
    for (VertexId v = 0; v < out_grid.vertex_count(); ++v)
        for (int c = 0; c < opt.codomain; ++c) f.values[static_cast<std::size_t>(v) * opt.codomain + c] -= f0[c];

    // Empirical simplexwise Lipschitz estimate; the true constant of a random
    // field is not finitely computable, so this is flagged heuristic upstream.
    f.alpha = 1.0;
    double inc = f.max_edge_increment();
    f.alpha = std::max(inc * opt.alpha_safety, 1e-12);
    return f;
}

SampledField gen_random_quadratic(int g, std::uint64_t seed) {
    if (g < 2) throw InputError("gen_random_quadratic needs g >= 2");
    const int m = 4, n = 3;
    GridDomain grid(m, std::vector<int>(m, g), Topology::cube);
    CounterRng rng(seed, 0xabcdef);
    double a[n][m][m];
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) a[k][i][j] = rng.next_gaussian();

    // |f_k(x)-f_k(y)|  <=  sup |grad f_k|_1 * |x-y|_inf on [-1,1]^4.
    double lip = 0.0;
    for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int t = 0; t < m; ++t) {
            double row = 0.0;
            for (int j = 0; j < m; ++j) row += std::fabs(a[k][t][j] + a[k][j][t]);
            s += row;
        }
        lip = std::max(lip, s);
    }
    SampledField f{grid, n, {}, lip * 2.0 / (g - 1), Norm::linf};
    f.values.resize(static_cast<std::size_t>(grid.vertex_count()) * n);
    for (VertexId v = 0; v < grid.vertex_count(); ++v) {
        MultiIndex mi = grid.vertex_index(v);
        double x[m];
        for (int j = 0; j < m; ++j) x[j] = grid.coordinate(j, mi.c[j]);
        double* out = f.at(v);
        for (int k = 0; k < n; ++k) {
            double s = 0.0;
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) s += a[k][i][j] * x[i] * x[j];
            out[k] = s;
        }
    }
    return f;
}

} // namespace robzero
