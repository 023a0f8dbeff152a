#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "nswn/config.hpp"
#include "nswn/solver.hpp"
#include "nswn/studies.hpp"

using namespace nswn;
namespace fs = std::filesystem;

namespace {

std::string bin_path()
{
    const char* p = std::getenv("NSWN_BIN");
    REQUIRE(p != nullptr);
    return p;
}

int run_cli(const std::string& args)
{
    std::string cmd = bin_path() + " " + args + " >/dev/null 2>&1";
    int st = std::system(cmd.c_str());
    REQUIRE(st != -1);
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name)
{
    fs::path d = fs::path("cli_scratch") / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

void write_tiny_config(const fs::path& p, const std::string& extra = "")
{
    std::ofstream os(p);
    os << "[grid]\nN=2\nT=0.2\nsteps=4\n"
       << "[noise]\nepsilon=0.5,0.25\nseed=1,2\n"
       << "[experiment]\nsamples=2\n"
       << extra;
}

} // namespace

TEST_CASE("config: defaults validate, parse round-trips, hash is stable")
{
    RunConfig def;
    CHECK_NOTHROW(def.validate());

    std::istringstream in(canonical_text(def));
    RunConfig back = parse_config(in);
    CHECK(config_hash(back) == config_hash(def));
    CHECK(canonical_text(back) == canonical_text(def));

    std::istringstream in2("[grid]\nN=8\nT=0.125\n[solver]\nz=0.53\n# comment\n; another\n");
    RunConfig c = parse_config(in2);
    CHECK(c.N == 8);
    CHECK(c.T == 0.125);
    CHECK(c.solver.z == 0.53);
    CHECK(c.steps == RunConfig{}.steps);
    CHECK(config_hash(c) != config_hash(def));
}

TEST_CASE("config: every malformed input is rejected")
{
    auto bad = [](const std::string& text) {
        std::istringstream in(text);
        CHECK_THROWS_AS(parse_config(in), ConfigError);
    };
    bad("[grid]\nN=0\n");
    bad("[grid]\nN=nope\n");
    bad("[grid]\nbogus_key=1\n");
    bad("[noise]\nepsilon=0.25,0.5\n");          // not decreasing
    bad("[noise]\nepsilon=\n");                  // empty ladder
    bad("[noise]\nseed=\n");
    bad("[noise]\nprofile=spikes\n");
    bad("[solver]\nz=0.3\n");                    // violates z > 1/2
    bad("[grid]\nN=4\nno_equals_sign\n");
    bad("[grid\nN=4\n");                         // unterminated section
}

TEST_CASE("config: seed lists with ranges")
{
    CHECK(parse_seed_list("1,2,5-8") == std::vector<uint64_t>{1, 2, 5, 6, 7, 8});
    CHECK(parse_seed_list("7") == std::vector<uint64_t>{7});
    CHECK_THROWS_AS(parse_seed_list("8-5"), ConfigError);
    CHECK_THROWS_AS(parse_seed_list("x"), ConfigError);
    CHECK_THROWS_AS(parse_seed_list(""), ConfigError);
}

TEST_CASE("exit codes: usage and config errors yield 2")
{
    CHECK(run_cli("") == 2);                       // missing subcommand
    CHECK(run_cli("no-such-command") == 2);
    CHECK(run_cli("trees --config /does/not/exist --out cli_scratch/x") == 2);

    fs::path d = fresh_dir("badcfg");
    std::ofstream(d / "bad.ini") << "[solver]\nz=0.2\n";
    CHECK(run_cli("trees --config " + (d / "bad.ini").string() + " --out " + d.string()) == 2);
    CHECK(run_cli("--help") == 0);
}

TEST_CASE("trees subcommand: forest and csv emitted, reruns byte-identical")
{
    fs::path d1 = fresh_dir("trees1"), d2 = fresh_dir("trees2");
    REQUIRE(run_cli("trees --out " + d1.string()) == 0);
    REQUIRE(run_cli("trees --out " + d2.string()) == 0);

    std::string csv = slurp(d1 / "trees.csv");
    CHECK(csv.rfind("# config_hash=", 0) == 0);
    CHECK(csv.find("shape_id,index_decoration,a,b,negative_at_left_endpoint,negative_at_right_endpoint\n") !=
          std::string::npos);
    std::string txt = slurp(d1 / "trees_forest.txt");
    CHECK(txt.find("stabilized") != std::string::npos);

    CHECK(slurp(d1 / "trees.csv") == slurp(d2 / "trees.csv"));
    CHECK(slurp(d1 / "trees_forest.txt") == slurp(d2 / "trees_forest.txt"));
}

TEST_CASE("sample-noise, counterterms, solve on a tiny config")
{
    fs::path d = fresh_dir("tiny");
    write_tiny_config(d / "cfg.ini");
    std::string common = " --config " + (d / "cfg.ini").string() + " --out " + d.string();

    SUBCASE("sample-noise snapshots have one row per mode")
    {
        REQUIRE(run_cli("sample-noise" + common) == 0);
        std::string s = slurp(d / "noise_u1.csv");
        CHECK(s.find("# lattice N=2") != std::string::npos);
        CHECK(s.find("k1,k2,k3,re1,im1,re2,im2,re3,im3") != std::string::npos);
        long rows = std::count(s.begin(), s.end(), '\n');
        CHECK(rows == 3 + 125); // header lines + (2*2+1)^3 modes
        CHECK(fs::exists(d / "noise_k.csv"));
    }

    SUBCASE("counterterms table covers the ladder with the documented schema")
    {
        REQUIRE(run_cli("counterterms" + common) == 0);
        std::string s = slurp(d / "counterterms.csv");
        CHECK(s.find("epsilon,N,t,i,j,c0,c11,c2\n") != std::string::npos);
        long rows = std::count(s.begin(), s.end(), '\n');
        CHECK(rows == 2 + 2 * 2 * 9); // headers + ladder x samples x 3x3
    }

    SUBCASE("solve emits one record per time level and reruns identically")
    {
        REQUIRE(run_cli("solve --seed 2" + common) == 0);
        std::string s1 = slurp(d / "solve.csv");
        CHECK(s1.find("t,norm_u,norm_u4_weighted,ansatz_residual,tau_L_hit\n") != std::string::npos);
        CHECK(std::count(s1.begin(), s1.end(), '\n') == 2 + 5); // headers + steps+1 records
        REQUIRE(run_cli("solve --seed 2" + common) == 0);
        CHECK(slurp(d / "solve.csv") == s1);
    }

    SUBCASE("build-objects emits the seven bundle norms per sample time")
    {
        REQUIRE(run_cli("build-objects" + common) == 0);
        std::string s = slurp(d / "objects.csv");
        CHECK(s.find("time,object,alpha,p,q,value\n") != std::string::npos);
        CHECK(std::count(s.begin(), s.end(), '\n') == 2 + 2 * 7);
        CHECK(s.find(",pi0_u3u1,") != std::string::npos);
    }

    SUBCASE("diverge tabulates the ladder")
    {
        REQUIRE(run_cli("diverge" + common) == 0);
        std::string s = slurp(d / "diverge.csv");
        CHECK(s.find("epsilon,c0_diag,c0_offdiag,c1_tstar,c2_tstar,ratio_prev\n") != std::string::npos);
        CHECK(std::count(s.begin(), s.end(), '\n') == 3 + 2);
    }
}

TEST_CASE("seeds override from the command line changes the converge seed pool")
{
    fs::path d = fresh_dir("conv");
    write_tiny_config(d / "cfg.ini");
    std::string common = " --config " + (d / "cfg.ini").string() + " --out " + d.string();
    REQUIRE(run_cli("converge --seeds 1-8" + common) == 0);
    std::string s = slurp(d / "converge.csv");
    CHECK(s.find("# seeds_done=8 seeds_failed=0") != std::string::npos);
    CHECK(s.find("eps_coarse,eps_fine,") != std::string::npos);
}

TEST_CASE("coupled flows at the same epsilon are at zero distance")
{
    TorusLattice L(2);
    CountertermSet ct = make_counterterms(L, 0.4);
    SolverParams p;
    p.T = 0.2;
    p.steps = 4;
    p.march_direct = false;
    p.decomp_check_every = 0;
    NoiseConfig nc{&L, 0.4, 5, 0.2, 4};
    Flow a(nc, p, ct, VectorField(L)), b(nc, p, ct, VectorField(L));
    for (int m = 0; m < 4; ++m) {
        a.step();
        b.step();
    }
    PairDistance d = level_distance(a, b, p.delta, p.z);
    CHECK(d.bundle == 0.0);
    CHECK(d.solution == 0.0);
}

TEST_CASE("divergence study: growth exponent near 1 once resolved")
{
    RunConfig cfg;
    cfg.N = 16;
    cfg.eps_ladder = {0.25, 0.125};
    cfg.seeds = {1};
    cfg.steps = 4;
    cfg.T = 0.2;
    DivergeReport rep = run_divergence_study(cfg);
    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.rows[1].ratio_prev > 1.5);
    CHECK(rep.rows[0].c0_offdiag < 1e-12);
    CHECK(rep.rows[1].c0_offdiag < 1e-12);
    CHECK(rep.rows[0].c1_tstar != 0.0);
    CHECK(rep.rows[1].c2_tstar > 0.0);
}

TEST_CASE("report headers carry the config hash and version")
{
    RunConfig cfg;
    std::string h = report_header(cfg);
    CHECK(h.rfind("# config_hash=", 0) == 0);
    CHECK(h.find("version=" + code_version()) != std::string::npos);
}
