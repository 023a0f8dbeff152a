#include "nswn/config.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace nswn {

namespace {

std::string trim(const std::string& s)
{
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& v, const std::string& key)
{
    try {
        size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value for " + key + ": '" + v + "'");
    }
}

int to_int(const std::string& v, const std::string& key)
{
    double d = to_double(v, key);
    int i = (int)d;
    if ((double)i != d) throw ConfigError("config: integer required for " + key + ": '" + v + "'");
    return i;
}

std::vector<double> to_double_list(const std::string& v, const std::string& key)
{
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(to_double(item, key));
    }
    return out;
}

/// shortest decimal that round-trips exactly
std::string num_str(double d)
{
    for (int prec = 1; prec <= 17; ++prec) {
        std::ostringstream os;
        os.precision(prec);
        os << d;
        if (std::stod(os.str()) == d) return os.str();
    }
    return std::to_string(d);
}

} // namespace

void RunConfig::validate() const
{
    if (N < 1 || N > 64) throw ConfigError("config: grid.N in [1,64] required");
    if (T <= 0.0 || T > 0.5) throw ConfigError("config: grid.T in (0, 0.5] required");
    if (steps < 1) throw ConfigError("config: grid.steps >= 1 required");
    if (eps_ladder.empty()) throw ConfigError("config: noise.epsilon ladder empty");
    for (size_t i = 0; i < eps_ladder.size(); ++i) {
        if (eps_ladder[i] <= 0.0) throw ConfigError("config: noise.epsilon must be positive");
        if (i && eps_ladder[i] >= eps_ladder[i - 1])
            throw ConfigError("config: noise.epsilon ladder must be strictly decreasing");
    }
    if (seeds.empty() || seeds.size() > 64) throw ConfigError("config: 1..64 seeds required");
    if (profile != "plateau") throw ConfigError("config: unknown noise.profile '" + profile + "'");
    try {
        SolverParams p = solver;
        p.T = T;
        p.steps = steps;
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (samples < 1) throw ConfigError("config: experiment.samples >= 1 required");
}

RunConfig parse_config(std::istream& in)
{
    RunConfig cfg;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError("config: unterminated section at line " + std::to_string(lineno));
            section = trim(s.substr(1, s.size() - 2));
            continue;
        }
        size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: expected key=value at line " + std::to_string(lineno));
        std::string key = section + "." + trim(s.substr(0, eq));
        std::string val = trim(s.substr(eq + 1));

        if (key == "grid.N") cfg.N = to_int(val, key);
        else if (key == "grid.T") cfg.T = to_double(val, key);
        else if (key == "grid.steps") cfg.steps = to_int(val, key);
        else if (key == "noise.epsilon") cfg.eps_ladder = to_double_list(val, key);
        else if (key == "noise.seed") cfg.seeds = parse_seed_list(val);
        else if (key == "noise.profile") cfg.profile = val;
        else if (key == "solver.z") cfg.solver.z = to_double(val, key);
        else if (key == "solver.delta0") cfg.solver.delta0 = to_double(val, key);
        else if (key == "solver.delta") cfg.solver.delta = to_double(val, key);
        else if (key == "solver.beta") cfg.solver.beta = to_double(val, key);
        else if (key == "solver.L") cfg.solver.L = to_double(val, key);
        else if (key == "solver.fp_tol") cfg.solver.fp_tol = to_double(val, key);
        else if (key == "solver.fp_max_iter") cfg.solver.fp_max_iter = to_int(val, key);
        else if (key == "solver.fp_damping") cfg.solver.fp_damping = to_double(val, key);
        else if (key == "experiment.study") cfg.study = val;
        else if (key == "experiment.samples") cfg.samples = to_int(val, key);
        else if (key == "experiment.out") cfg.out_dir = val;
        else throw ConfigError("config: unknown key '" + key + "' at line " + std::to_string(lineno));
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    return parse_config(in);
}

std::string canonical_text(const RunConfig& cfg)
{
    std::ostringstream os;
    os << "[grid]\n";
    os << "N=" << cfg.N << "\n";
    os << "T=" << num_str(cfg.T) << "\n";
    os << "steps=" << cfg.steps << "\n";
    os << "[noise]\n";
    os << "epsilon=";
    for (size_t i = 0; i < cfg.eps_ladder.size(); ++i) os << (i ? "," : "") << num_str(cfg.eps_ladder[i]);
    os << "\n";
    os << "seed=";
    for (size_t i = 0; i < cfg.seeds.size(); ++i) os << (i ? "," : "") << cfg.seeds[i];
    os << "\n";
    os << "profile=" << cfg.profile << "\n";
    os << "[solver]\n";
    os << "z=" << num_str(cfg.solver.z) << "\n";
    os << "delta0=" << num_str(cfg.solver.delta0) << "\n";
    os << "delta=" << num_str(cfg.solver.delta) << "\n";
    os << "beta=" << num_str(cfg.solver.beta) << "\n";
    os << "L=" << num_str(cfg.solver.L) << "\n";
    os << "fp_tol=" << num_str(cfg.solver.fp_tol) << "\n";
    os << "fp_max_iter=" << cfg.solver.fp_max_iter << "\n";
    os << "fp_damping=" << num_str(cfg.solver.fp_damping) << "\n";
    os << "[experiment]\n";
    os << "study=" << cfg.study << "\n";
    os << "samples=" << cfg.samples << "\n";
    os << "out=" << cfg.out_dir << "\n";
    return os.str();
}

uint64_t config_hash(const RunConfig& cfg)
{
    // the hash identifies the computation, not the destination directory
    RunConfig keyed = cfg;
    keyed.out_dir = "out";
    uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : canonical_text(keyed)) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::string code_version() { return "nswn 1.0.0"; }

std::string report_header(const RunConfig& cfg)
{
    std::ostringstream os;
    os << "# config_hash=" << std::hex << config_hash(cfg) << std::dec << " version=" << code_version() << "\n";
    return os.str();
}

std::vector<uint64_t> parse_seed_list(const std::string& s)
{
    std::vector<uint64_t> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        size_t dash = item.find('-');
        try {
            if (dash != std::string::npos && dash > 0) {
                uint64_t a = std::stoull(trim(item.substr(0, dash)));
                uint64_t b = std::stoull(trim(item.substr(dash + 1)));
                if (b < a) throw std::invalid_argument(item);
                for (uint64_t v = a; v <= b; ++v) out.push_back(v);
            } else {
                size_t pos = 0;
                uint64_t v = std::stoull(item, &pos);
                if (pos != item.size()) throw std::invalid_argument(item);
                out.push_back(v);
            }
        } catch (const std::exception&) {
            throw ConfigError("config: bad seed list entry '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError("config: empty seed list");
    return out;
}

} // namespace nswn
