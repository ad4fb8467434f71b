// robzero: certify robust zeros of sampled vector fields and compute
// worst-case optimization bounds via persistent cohomological obstructions.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "robzero/gen.hpp"
#include "robzero/obstruction.hpp"
#include "robzero/robopt.hpp"

using nlohmann::json;
using namespace robzero;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitTooCoarse = 2;
constexpr int kExitInconclusive = 3;

int worker_count() {
    if (const char* env = std::getenv("ROBZERO_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

json persistence_json(const Persistence& p) {
    switch (p.kind) {
        case Persistence::Kind::level: return p.value;
        case Persistence::Kind::below_r0: return "below_r0";
        default: return "inconclusive";
    }
}

json report_json(const RobustnessReport& rep, const SampledField& f, const std::string& input) {
    json j;
    j["schema"] = 1;
    j["input"] = {{"path", input},
                  {"dims", f.grid.dim()},
                  {"topology", f.grid.topology() == Topology::torus ? "torus" : "cube"},
                  {"codomain", f.n},
                  {"alpha", f.alpha},
                  {"norm", norm_name(f.p)}};
    std::vector<int> res(f.grid.dim());
    for (int i = 0; i < f.grid.dim(); ++i) res[i] = f.grid.resolution(i);
    j["input"]["grid"] = res;
    j["mode"] = rep.mode == FiltrationMode::cubical ? "cubical" : "simplicial";
    j["threshold"] = rep.threshold == ThresholdMode::alpha ? "alpha" : "empirical";
    j["depth"] = rep.depth == Depth::secondary ? "secondary" : "primary";
    j["heuristic"] = rep.heuristic;
    j["r0"] = rep.r0;
    j["r1"] = persistence_json(rep.r1);
    j["r2"] = rep.depth == Depth::secondary ? persistence_json(rep.r2) : json(nullptr);
    j["zero_guaranteed"] = rep.zero_guaranteed;
    j["lower_bound"] = rep.lower_bound ? json(*rep.lower_bound) : json("none");
    j["upper_bound"] = rep.upper_bound ? json(*rep.upper_bound) : json("none");
    j["upper_capped"] = rep.upper_capped;
    j["nonexistence_robustness"] =
        rep.nonexistence_robustness ? json(*rep.nonexistence_robustness) : json(nullptr);
    j["diagnostics"] = {{"columns_total", rep.diag.columns_total},
                        {"columns_admitted", rep.diag.columns_admitted},
                        {"secondary_columns_admitted", rep.diag.secondary_columns_admitted},
                        {"generators", rep.diag.generators},
                        {"ms_filtration", rep.diag.ms_filtration},
                        {"ms_primary", rep.diag.ms_primary},
                        {"ms_secondary", rep.diag.ms_secondary},
                        {"used_bignum", rep.diag.used_bignum}};
    return j;
}

void emit(const json& j, const std::string& out) {
    if (out.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream f(out);
        if (!f) throw InputError(out + ": cannot open for writing");
        f << j.dump(2) << "\n";
    }
}

struct SampleStats {
    std::uint64_t seed = 0;
    double r0 = 0, r1 = 0, r2 = 0;
    bool r1_nontrivial = false, r2_above_r1 = false;
    double ms = 0;
    std::string status = "ok";
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"robust zero certification via persistent obstructions"};
    app.require_subcommand(1);

    // ---- robustness ----
    auto* rob = app.add_subcommand("robustness", "compute robustness bounds for a sampled field");
    std::string rob_input, rob_out, rob_norm, rob_threshold;
    bool rob_cubical = false, rob_simplicial = false, rob_secondary = false, rob_primary = false;
    rob->add_option("--input", rob_input, "ROBF input file")->required();
    rob->add_option("--out", rob_out, "write the JSON report here (default stdout)");
    rob->add_flag("--cubical", rob_cubical, "force the cubical filtration (default for dims >= 4)");
    rob->add_flag("--simplicial", rob_simplicial, "force the simplexwise filtration");
    rob->add_flag("--secondary", rob_secondary, "force the secondary stage");
    rob->add_flag("--primary-only", rob_primary, "stop after the primary obstruction");
    rob->add_option("--threshold", rob_threshold, "starting level rule: alpha | empirical");
    rob->add_option("--norm", rob_norm, "override the input norm: 1 | 2 | inf");

    // ---- gen ----
    auto* gen = app.add_subcommand("gen", "generate benchmark or random fields");
    gen->require_subcommand(1);
    std::string gen_out;
    int gq_n = 2, gq_g = 10;
    auto* gq = gen->add_subcommand("quadratic", "f1 = x1^2 - sum xj^2, fj = 2 x1 xj");
    gq->add_option("--n", gq_n, "codomain dimension")->required();
    gq->add_option("--grid", gq_g, "vertices per axis")->required();
    gq->add_option("--out", gen_out, "output ROBF path")->required();

    int gh_n = 3, gh_g = 10;
    auto* gh = gen->add_subcommand("hopf", "Hopf map and its suspensions");
    gh->add_option("--n", gh_n, "codomain dimension (>= 3)")->required();
    gh->add_option("--grid", gh_g, "vertices per axis")->required();
    gh->add_option("--out", gen_out, "output ROBF path")->required();

    GaussianOptions gopt;
    std::string gg_topology = "cube", gg_spectrum = "power";
    std::uint64_t gg_seed = 0;
    auto* gg = gen->add_subcommand("gaussian", "stationary Gaussian random field");
    gg->add_option("--dims", gopt.dims, "domain dimension");
    gg->add_option("--grid", gopt.grid, "vertices per axis")->required();
    gg->add_option("--codomain", gopt.codomain, "codomain dimension");
    gg->add_option("--l", gopt.l, "spectrum parameter");
    gg->add_option("--spectrum", gg_spectrum, "power | gaussian");
    gg->add_option("--topology", gg_topology, "cube | torus");
    gg->add_option("--seed", gg_seed, "random seed")->required();
    gg->add_option("--safety", gopt.alpha_safety, "factor on the empirical Lipschitz estimate");
    gg->add_option("--out", gen_out, "output ROBF path")->required();

    int gr_g = 10;
    std::uint64_t gr_seed = 0;
    auto* gr = gen->add_subcommand("quadratic-random", "random homogeneous quadratic [-1,1]^4 -> R^3");
    gr->add_option("--grid", gr_g, "vertices per axis")->required();
    gr->add_option("--seed", gr_seed, "random seed")->required();
    gr->add_option("--out", gen_out, "output ROBF path")->required();

    // ---- optimize ----
    auto* opt = app.add_subcommand("optimize", "lower bounds on the uncertainty-optimality curve");
    std::string opt_input, opt_obj, opt_out;
    double opt_rmax = 0.0;
    bool opt_cubical = false;
    opt->add_option("--input", opt_input, "ROBF constraint field")->required();
    opt->add_option("--objective", opt_obj, "ROBF objective (codomain 1)")->required();
    opt->add_option("--r-max", opt_rmax, "largest perturbation radius")->required();
    opt->add_option("--out", opt_out, "output CSV path")->required();
    opt->add_flag("--cubical", opt_cubical, "use the cubical filtration");

    // ---- experiment ----
    auto* exp = app.add_subcommand("experiment", "batch statistics over random fields");
    GaussianOptions eopt;
    std::string exp_out, exp_topology = "cube", exp_spectrum = "power", exp_generator = "gaussian";
    std::uint64_t exp_seed = 0;
    int exp_count = 10;
    exp->add_option("--generator", exp_generator, "gaussian | quadratic-random");
    exp->add_option("--dims", eopt.dims, "domain dimension");
    exp->add_option("--grid", eopt.grid, "vertices per axis")->required();
    exp->add_option("--codomain", eopt.codomain, "codomain dimension");
    exp->add_option("--l", eopt.l, "spectrum parameter");
    exp->add_option("--spectrum", exp_spectrum, "power | gaussian");
    exp->add_option("--topology", exp_topology, "cube | torus");
    exp->add_option("--count", exp_count, "number of samples")->required();
    exp->add_option("--seed", exp_seed, "base seed")->required();
    exp->add_option("--out", exp_out, "output CSV path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (rob->parsed()) {
            SampledField f = load_field(rob_input);
            if (!rob_norm.empty()) {
                if (rob_norm == "1") f.p = Norm::l1;
                else if (rob_norm == "2") f.p = Norm::l2;
                else if (rob_norm == "inf") f.p = Norm::linf;
                else throw InputError("unknown norm: " + rob_norm);
            }
            if (!f.alpha_consistent())
                std::cerr << "warning: declared alpha is below the largest sampled edge increment\n";

            PipelineOptions po;
            po.mode = (f.grid.dim() >= 4 || rob_cubical) && !rob_simplicial ? FiltrationMode::cubical
                                                                            : FiltrationMode::simplexwise;
            // the cubical pipeline conventionally starts at the empirical
            // simplicial threshold; alpha remains available for guarantees
            po.threshold = po.mode == FiltrationMode::cubical ? ThresholdMode::empirical
                                                              : ThresholdMode::alpha;
            if (rob_threshold == "alpha") po.threshold = ThresholdMode::alpha;
            else if (rob_threshold == "empirical") po.threshold = ThresholdMode::empirical;
            else if (!rob_threshold.empty()) throw InputError("unknown threshold rule: " + rob_threshold);

            bool secondary_default = f.n > 3 || (f.n == 3 && f.grid.topology() == Topology::cube);
            po.depth = (secondary_default || rob_secondary) && !rob_primary ? Depth::secondary
                                                                            : Depth::primary;

            RobustnessReport rep = robustness_report(f, po);
            std::cerr << "columns: " << rep.diag.columns_admitted << "/" << rep.diag.columns_total
                      << " admitted";
            if (po.depth == Depth::secondary)
                std::cerr << ", secondary " << rep.diag.secondary_columns_admitted << " (+"
                          << rep.diag.generators << " generators)";
            std::cerr << "\n";
            emit(report_json(rep, f, rob_input), rob_out);
            if (po.depth == Depth::secondary && rep.r2.kind == Persistence::Kind::inconclusive)
                return kExitInconclusive;
            return kExitOk;
        }

        if (gen->parsed()) {
            auto make_field = [&]() -> SampledField {
                if (gq->parsed()) return gen_quadratic(gq_n, gq_g);
                if (gh->parsed()) return gen_hopf(gh_n, gh_g);
                if (gg->parsed()) {
                    gopt.seed = gg_seed;
                    gopt.topology = gg_topology == "torus" ? Topology::torus : Topology::cube;
                    gopt.spectrum = gg_spectrum == "gaussian" ? Spectrum::gaussian : Spectrum::power;
                    SampledField g = gen_gaussian(gopt);
                    std::cerr << "empirical alpha estimate " << g.alpha
                              << " (random-field Lipschitz constants are heuristic)\n";
                    return g;
                }
                return gen_random_quadratic(gr_g, gr_seed);
            };
            SampledField f = make_field();
            save_field(f, gen_out);
            std::cerr << "wrote " << gen_out << " (" << f.grid.vertex_count() << " vertices)\n";
            return kExitOk;
        }

        if (opt->parsed()) {
            SampledField f = load_field(opt_input);
            ObjectiveField o = load_objective(opt_obj);
            OptOptions oo;
            oo.mode = opt_cubical ? FiltrationMode::cubical : FiltrationMode::simplexwise;
            oo.threshold = ThresholdMode::empirical;
            OptCurve curve = opt_curve(f, o, opt_rmax, oo);
            write_curve_csv(curve, opt_out);
            std::cerr << "wrote " << curve.points.size() << " curve points";
            if (curve.terminated) std::cerr << " (terminates at r = " << curve.termination_r << ")";
            std::cerr << "\n";
            return kExitOk;
        }

        if (exp->parsed()) {
            eopt.topology = exp_topology == "torus" ? Topology::torus : Topology::cube;
            eopt.spectrum = exp_spectrum == "gaussian" ? Spectrum::gaussian : Spectrum::power;
            const bool quadratic = exp_generator == "quadratic-random";
            if (!quadratic && exp_generator != "gaussian")
                throw InputError("unknown generator: " + exp_generator);

            std::vector<SampleStats> stats(static_cast<std::size_t>(exp_count));
            std::atomic<int> next{0};
            int threads = std::min(worker_count(), exp_count);
            auto run_sample = [&](int i) {
                SampleStats& s = stats[static_cast<std::size_t>(i)];
                s.seed = exp_seed + static_cast<std::uint64_t>(i);
                auto t0 = std::chrono::steady_clock::now();
                try {
                    GaussianOptions go = eopt;
                    go.seed = s.seed;
                    SampledField f =
                        quadratic ? gen_random_quadratic(eopt.grid, s.seed) : gen_gaussian(go);
                    PipelineOptions po;
                    po.mode = FiltrationMode::cubical;
                    po.threshold = ThresholdMode::empirical;
                    po.depth = Depth::secondary;
                    ObstructionResult res = obstruction_pipeline(f, po);
                    s.r0 = res.r0;
                    s.r1 = res.r1.is_level() ? res.r1.value : res.r0;
                    s.r1_nontrivial = res.r1.is_level() && res.r1.value > res.r0;
                    if (res.r2.kind == Persistence::Kind::inconclusive) {
                        s.status = "inconclusive";
                        s.r2 = s.r1;
                    } else {
                        s.r2 = res.r2.is_level() ? res.r2.value : s.r1;
                        s.r2_above_r1 = s.r2 > s.r1;
                    }
                } catch (const TooCoarse&) {
                    s.status = "too_coarse";
                } catch (const std::exception& e) {
                    s.status = std::string("error: ") + e.what();
                }
                s.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                           .count();
            };
            std::vector<std::thread> pool;
            for (int t = 0; t < threads; ++t)
                pool.emplace_back([&] {
                    for (int i = next.fetch_add(1); i < exp_count; i = next.fetch_add(1)) run_sample(i);
                });
            for (auto& t : pool) t.join();

            std::ofstream out(exp_out);
            if (!out) throw InputError(exp_out + ": cannot open for writing");
            out << "sample,seed,status,r0,r1,r2,r1_gt_r0,r2_gt_r1,ms\n";
            int ok = 0, nontriv = 0, sec = 0;
            double sum_r1 = 0, max_r1 = 0, sum_r0 = 0;
            for (int i = 0; i < exp_count; ++i) {
                const SampleStats& s = stats[static_cast<std::size_t>(i)];
                char buf[192];
                std::snprintf(buf, sizeof buf, "%d,%llu,%s,%.9g,%.9g,%.9g,%d,%d,%.1f\n", i,
                              (unsigned long long)s.seed, s.status.c_str(), s.r0, s.r1, s.r2,
                              (int)s.r1_nontrivial, (int)s.r2_above_r1, s.ms);
                out << buf;
                if (s.status == "ok" || s.status == "inconclusive") {
                    ++ok;
                    sum_r0 += s.r0;
                    if (s.r1_nontrivial) {
                        ++nontriv;
                        sum_r1 += s.r1;
                        max_r1 = std::max(max_r1, s.r1);
                    }
                    if (s.r2_above_r1) ++sec;
                }
            }
            char buf[224];
            std::snprintf(buf, sizeof buf, "summary,,count=%d,%.9g,%.9g,%.9g,%.4f,%.4f,\n", ok,
                          ok ? sum_r0 / ok : 0.0, nontriv ? sum_r1 / nontriv : 0.0, max_r1,
                          ok ? (double)nontriv / ok : 0.0, ok ? (double)sec / ok : 0.0);
            out << buf;
            std::cerr << "samples ok " << ok << "/" << exp_count << ", r1>r0 in " << nontriv
                      << ", r2>r1 in " << sec << "\n";
            return kExitOk;
        }
    } catch (const TooCoarse& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitTooCoarse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitOk;
}
