#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <omp.h>

#include "nswn/config.hpp"
#include "nswn/solver.hpp"
#include "nswn/studies.hpp"
#include "nswn/trees.hpp"

using namespace nswn;

namespace {

std::ofstream open_report(const RunConfig& cfg, const std::string& dir, const std::string& name)
{
    std::filesystem::create_directories(dir);
    std::ofstream os(dir + "/" + name);
    if (!os) throw ConfigError("cannot open output file " + dir + "/" + name);
    os << report_header(cfg);
    os << std::setprecision(17);
    return os;
}

void write_snapshot(std::ofstream& os, const VectorField& v)
{
    const TorusLattice& L = *v.lat();
    os << "# lattice N=" << L.N << " M=" << L.M << " dealias=" << L.cutoff() << "\n";
    os << "k1,k2,k3,re1,im1,re2,im2,re3,im3\n";
    for (long idx = 0; idx < L.n_modes(); ++idx) {
        auto k = L.mode(idx);
        os << k[0] << "," << k[1] << "," << k[2];
        for (int c = 0; c < 3; ++c)
            os << "," << v[c].c[idx].real() << "," << v[c].c[idx].imag();
        os << "\n";
    }
}

std::vector<int> sample_steps(const RunConfig& cfg)
{
    std::vector<int> out;
    for (int s = 1; s <= cfg.samples; ++s) out.push_back((int)std::llround((double)s * cfg.steps / cfg.samples));
    return out;
}

void cmd_sample_noise(const RunConfig& cfg)
{
    TorusLattice L(cfg.N);
    NoiseConfig nc{&L, cfg.eps_ladder.front(), cfg.seeds.front(), cfg.T, cfg.steps};
    OuState st(nc);
    for (int m = 0; m < cfg.steps; ++m) st.advance();
    auto os1 = open_report(cfg, cfg.out_dir, "noise_u1.csv");
    write_snapshot(os1, st.u1);
    auto os2 = open_report(cfg, cfg.out_dir, "noise_k.csv");
    write_snapshot(os2, st.k_field);
}

void cmd_build_objects(const RunConfig& cfg)
{
    TorusLattice L(cfg.N);
    double eps = cfg.eps_ladder.front();
    CountertermSet cts = make_counterterms(L, eps);
    SolverParams prm = cfg.solver;
    prm.T = cfg.T;
    prm.steps = cfg.steps;
    prm.march_direct = false;
    prm.decomp_check_every = 0;
    NoiseConfig nc{&L, eps, cfg.seeds.front(), cfg.T, cfg.steps};
    Flow f(nc, prm, cts, VectorField(L));

    auto os = open_report(cfg, cfg.out_dir, "objects.csv");
    os << "time,object,alpha,p,q,value\n";
    double d = cfg.solver.delta;
    auto emit = [&](double t, const char* name, double alpha, double val) {
        os << t << "," << name << "," << alpha << ",inf,inf," << val << "\n";
    };
    std::vector<int> samp = sample_steps(cfg);
    size_t si = 0;
    for (int m = 1; m <= cfg.steps; ++m) {
        f.step();
        if (si < samp.size() && m == samp[si]) {
            ++si;
            BundleNorms n = bundle_norms(f, d);
            double t = f.time();
            emit(t, "u1", -0.5 - d / 2.0, n.u1);
            emit(t, "u1u1", -1.0 - d / 2.0, n.u1u1);
            emit(t, "u1u2", -0.5 - d / 2.0, n.u1u2);
            emit(t, "u2u2", -d, n.u2u2);
            emit(t, "pi0_u3u1", -d, n.pi0_u3u1);
            emit(t, "v6", -d, n.v6);
            emit(t, "v7", -d, n.v7);
        }
    }
}

void cmd_counterterms(const RunConfig& cfg)
{
    TorusLattice L(cfg.N);
    auto os = open_report(cfg, cfg.out_dir, "counterterms.csv");
    os << "epsilon,N,t,i,j,c0,c11,c2\n";
    std::vector<int> samp = sample_steps(cfg);
    for (double eps : cfg.eps_ladder) {
        CountertermSet ct = make_counterterms(L, eps);
        for (int m : samp) {
            double t = cfg.T * m / cfg.steps;
            Mat3 c1 = ct.c1.eval(t), c2 = ct.c2.eval(t);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    os << eps << "," << cfg.N << "," << t << "," << i + 1 << "," << j + 1 << ","
                       << ct.c0(i, j) << "," << c1(i, j) << "," << c2(i, j) << "\n";
        }
    }
}

void cmd_solve(const RunConfig& cfg, uint64_t seed, double eps)
{
    TorusLattice L(cfg.N);
    CountertermSet cts = make_counterterms(L, eps);
    SolverParams prm = cfg.solver;
    prm.T = cfg.T;
    prm.steps = cfg.steps;
    prm.march_direct = false;
    prm.decomp_check_every = 0;
    NoiseConfig nc{&L, eps, seed, cfg.T, cfg.steps};
    SolveResult r = solve_paracontrolled(nc, prm, cts, VectorField(L));

    auto os = open_report(cfg, cfg.out_dir, "solve.csv");
    os << "t,norm_u,norm_u4_weighted,ansatz_residual,tau_L_hit\n";
    for (const StepRecord& s : r.steps)
        os << s.t << "," << s.u_norm << "," << s.u4_weighted << "," << s.residual << ","
           << (s.tau_hit ? 1 : 0) << "\n";
}

void cmd_converge(const RunConfig& cfg)
{
    ConvergeReport rep = run_convergence_study(cfg);
    auto os = open_report(cfg, cfg.out_dir, "converge.csv");
    os << "# seeds_done=" << rep.seeds_done << " seeds_failed=" << rep.seeds_failed
       << " bundle_decay_exp=" << rep.bundle_decay_exp << " solution_decay_exp=" << rep.solution_decay_exp
       << "\n";
    os << "eps_coarse,eps_fine,median_bundle,q1_bundle,q3_bundle,median_solution,q1_solution,q3_solution\n";
    for (const ConvergeLevel& l : rep.levels)
        os << l.eps_coarse << "," << l.eps_fine << "," << l.med_bundle << "," << l.q1_bundle << ","
           << l.q3_bundle << "," << l.med_solution << "," << l.q1_solution << "," << l.q3_solution << "\n";
}

void cmd_diverge(const RunConfig& cfg)
{
    DivergeReport rep = run_divergence_study(cfg);
    auto os = open_report(cfg, cfg.out_dir, "diverge.csv");
    os << "# tstar=" << rep.tstar << " c0_growth_exp=" << rep.c0_growth_exp << "\n";
    os << "epsilon,c0_diag,c0_offdiag,c1_tstar,c2_tstar,ratio_prev\n";
    for (const DivergeRow& r : rep.rows)
        os << r.eps << "," << r.c0_diag << "," << r.c0_offdiag << "," << r.c1_tstar << "," << r.c2_tstar
           << "," << r.ratio_prev << "\n";
}

void cmd_lemmas(const RunConfig& cfg)
{
    auto os = open_report(cfg, cfg.out_dir, "lemmas.csv");
    os << "check,parameter,value\n";

    os << "conv_slope,l=2 m=2," << conv_sum_slope(2.0, 2.0, {8, 12, 16, 24, 32, 48, 64}) << "\n";
    os << "conv_slope,l=2.5 m=2," << conv_sum_slope(2.5, 2.0, {8, 12, 16, 24, 32, 48, 64}) << "\n";

    MultiplierScan s1 = multiplier_difference_scan(0.5, 5, {0.02, 0.1, 0.5, 2.0, 50.0});
    os << "multiplier_diff_const,eta=0.5," << s1.fitted_const << "\n";
    os << "multiplier_tail,eta=0.5 t=50," << s1.tail_value << "\n";
    MultiplierScan s2 = multiplier_difference_scan(1.0, 5, {0.02, 0.1, 0.5, 2.0, 50.0});
    os << "multiplier_diff_const,eta=1," << s2.fitted_const << "\n";

    EstimateConstants a = estimate_constants(8, 25, 9000);
    EstimateConstants b = estimate_constants(16, 25, 9000);
    auto pair = [&](const char* name, double lo, double hi) {
        os << name << ",N=8," << lo << "\n";
        os << name << ",N=16," << hi << "\n";
    };
    pair("para_lt_const", a.para_lt, b.para_lt);
    pair("para_res_const", a.para_res, b.para_res);
    pair("commutator_const", a.commutator, b.commutator);
    pair("leray_comm_const", a.leray_comm, b.leray_comm);
    pair("heat_const", a.heat, b.heat);
    pair("leray_const", a.leray, b.leray);
}

void cmd_trees(const RunConfig& cfg)
{
    trees::Grammar g = trees::generate_grammar(12);
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream txt(cfg.out_dir + "/trees_forest.txt");
    txt << report_header(cfg);
    trees::emit_forest(txt, g);
    auto csv = open_report(cfg, cfg.out_dir, "trees.csv");
    trees::emit_csv(csv, g);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"paracontrolled Navier-Stokes experiment driver"};
    app.require_subcommand(1);

    std::string config_path, out_override, seeds_override;
    int threads = 0;
    app.add_option("--config", config_path, "INI config file");
    app.add_option("--out", out_override, "output directory");
    app.add_option("--seeds", seeds_override, "seed list, e.g. 1,2,5-8");
    app.add_option("--threads", threads, "OpenMP thread count");

    uint64_t solve_seed = 0;
    double solve_eps = 0.0;
    CLI::App* c_noise = app.add_subcommand("sample-noise", "emit OU field snapshots");
    CLI::App* c_obj = app.add_subcommand("build-objects", "emit bundle norm tables");
    CLI::App* c_ct = app.add_subcommand("counterterms", "emit counterterm tables");
    CLI::App* c_solve = app.add_subcommand("solve", "one paracontrolled solve");
    c_solve->add_option("--seed", solve_seed, "noise seed (default: first configured)");
    c_solve->add_option("--epsilon", solve_eps, "mollification scale (default: first ladder level)");
    CLI::App* c_conv = app.add_subcommand("converge", "coupled ladder convergence study");
    CLI::App* c_div = app.add_subcommand("diverge", "counterterm divergence study");
    CLI::App* c_lem = app.add_subcommand("lemmas", "brute-force estimate battery");
    CLI::App* c_trees = app.add_subcommand("trees", "emit the decorated forest");
    for (CLI::App* s : {c_noise, c_obj, c_ct, c_solve, c_conv, c_div, c_lem, c_trees}) s->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = load_config(config_path);
        if (!out_override.empty()) cfg.out_dir = out_override;
        if (!seeds_override.empty()) cfg.seeds = parse_seed_list(seeds_override);
        cfg.validate();
        if (threads > 0) omp_set_num_threads(threads);

        if (*c_noise) cmd_sample_noise(cfg);
        if (*c_obj) cmd_build_objects(cfg);
        if (*c_ct) cmd_counterterms(cfg);
        if (*c_solve)
            cmd_solve(cfg, solve_seed ? solve_seed : cfg.seeds.front(),
                      solve_eps > 0.0 ? solve_eps : cfg.eps_ladder.front());
        if (*c_conv) cmd_converge(cfg);
        if (*c_div) cmd_diverge(cfg);
        if (*c_lem) cmd_lemmas(cfg);
        if (*c_trees) cmd_trees(cfg);
        return 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const FixedPointError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
