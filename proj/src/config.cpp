#include "nlsv/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace nlsv {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double to_double(const std::string& v, const std::string& where) {
    double x = 0.0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw ConfigError(where + ": expected a number, got '" + v + "'");
    return x;
}

long long to_int(const std::string& v, const std::string& where) {
    long long x = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size())
        throw ConfigError(where + ": expected an integer, got '" + v + "'");
    return x;
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> m = {
        {"scenario", [](RunConfig& c, const std::string& v, const std::string&) { c.scenario = v; }},
        {"nx", [](RunConfig& c, const std::string& v, const std::string& w) { c.grid.nx = static_cast<int>(to_int(v, w)); }},
        {"ny", [](RunConfig& c, const std::string& v, const std::string& w) { c.grid.ny = static_cast<int>(to_int(v, w)); }},
        {"Lx", [](RunConfig& c, const std::string& v, const std::string& w) { c.grid.Lx = to_double(v, w); }},
        {"Ly", [](RunConfig& c, const std::string& v, const std::string& w) { c.grid.Ly = to_double(v, w); }},
        {"dt", [](RunConfig& c, const std::string& v, const std::string& w) { c.grid.dt = to_double(v, w); }},
        {"T", [](RunConfig& c, const std::string& v, const std::string& w) { c.grid.T = to_double(v, w); }},
        {"eps",
         [](RunConfig& c, const std::string& v, const std::string& w) {
             c.eps_list.clear();
             for (const auto& s : split_list(v)) c.eps_list.push_back(to_double(s, w));
         }},
        {"A0", [](RunConfig& c, const std::string& v, const std::string&) { c.A0 = v; }},
        {"A1", [](RunConfig& c, const std::string& v, const std::string&) { c.A1 = v; }},
        {"initial_f", [](RunConfig& c, const std::string& v, const std::string&) { c.initial_f = v; }},
        {"initial_u", [](RunConfig& c, const std::string& v, const std::string&) { c.initial_u = v; }},
        {"vmax", [](RunConfig& c, const std::string& v, const std::string& w) { c.vmax = to_double(v, w); }},
        {"lambda", [](RunConfig& c, const std::string& v, const std::string& w) { c.lambda = to_double(v, w); }},
        {"lattice",
         [](RunConfig& c, const std::string& v, const std::string& w) {
             const auto parts = split_list(v);
             if (parts.size() != 4) throw ConfigError(w + ": lattice needs four counts (nx, ny, nvx, nvy)");
             for (int k = 0; k < 4; ++k) c.lattice[k] = static_cast<int>(to_int(parts[k], w));
         }},
        {"max_particles",
         [](RunConfig& c, const std::string& v, const std::string& w) {
             c.max_particles = static_cast<std::size_t>(to_int(v, w));
         }},
        {"solver_tol", [](RunConfig& c, const std::string& v, const std::string& w) { c.solver_tol = to_double(v, w); }},
        {"tol_ledger", [](RunConfig& c, const std::string& v, const std::string& w) { c.tol_ledger = to_double(v, w); }},
        {"n_cell", [](RunConfig& c, const std::string& v, const std::string& w) { c.n_cell = static_cast<int>(to_int(v, w)); }},
        {"moment_grid",
         [](RunConfig& c, const std::string& v, const std::string& w) { c.moment_grid = static_cast<int>(to_int(v, w)); }},
        {"out_dir", [](RunConfig& c, const std::string& v, const std::string&) { c.out_dir = v; }},
        {"snapshot_stride",
         [](RunConfig& c, const std::string& v, const std::string& w) {
             c.snapshot_stride = static_cast<int>(to_int(v, w));
         }},
    };
    return m;
}

}  // namespace

const std::vector<std::string>& required_config_keys() {
    static const std::vector<std::string> k = {"scenario", "nx", "ny", "dt", "T", "eps", "out_dir"};
    return k;
}

void RunConfig::validate() const {
    grid.validate();
    if (eps_list.empty()) throw ConfigError("eps list must not be empty");
    for (std::size_t k = 0; k < eps_list.size(); ++k) {
        const double e = eps_list[k];
        if (!(e > 0.0 && e <= 1.0) || !is_reciprocal_integer(e))
            throw ConfigError("eps = " + fmt(e) + " violates: each eps must be the reciprocal of an integer");
        if (k > 0 && !(e < eps_list[k - 1])) throw ConfigError("eps list must be strictly decreasing");
        if (grid.nx * e < 8.0 - 1e-9 || grid.ny * e < 8.0 - 1e-9)
            throw ConfigError("eps = " + fmt(e) + " violates the resolution constraint nx*eps >= 8");
    }
    if (!(vmax > 0.0)) throw ConfigError("vmax must be positive");
    if (lambda < 0.0 || lambda > 1.0) throw ConfigError("lambda must lie in [0, 1]");
    for (int n : lattice)
        if (n < 2) throw ConfigError("lattice counts must be >= 2");
    if (max_particles == 0) throw ConfigError("max_particles must be positive");
    if (!(solver_tol > 0.0 && solver_tol < 1.0)) throw ConfigError("solver_tol must lie in (0, 1)");
    if (!(tol_ledger >= 0.0)) throw ConfigError("tol_ledger must be nonnegative");
    if (n_cell < 4) throw ConfigError("n_cell must be >= 4");
    if (moment_grid < 1) throw ConfigError("moment_grid must be >= 1");
    if (snapshot_stride < 0) throw ConfigError("snapshot_stride must be >= 0");
    if (initial_f != "scenario" && initial_f != "none") throw ConfigError("initial_f must be 'scenario' or 'none'");
    if (initial_u != "scenario" && initial_u != "zero") throw ConfigError("initial_u must be 'scenario' or 'zero'");
    if (out_dir.empty()) throw ConfigError("out_dir must not be empty");
}

GridSpec RunConfig::fine_grid(double eps) const {
    GridSpec g = grid;
    g.eps = eps;
    return g;
}

RunConfig parse_config(const std::string& text, const std::string& source) {
    RunConfig c;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = source + ":" + std::to_string(lineno);
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) throw ConfigError(where + ": unknown key '" + key + "'");
        if (!seen.insert(key).second) throw ConfigError(where + ": duplicate key '" + key + "'");
        if (value.empty()) throw ConfigError(where + ": empty value for '" + key + "'");
        it->second(c, value, where);
    }
    std::string missing;
    for (const auto& k : required_config_keys())
        if (!seen.count(k)) missing += (missing.empty() ? "" : ", ") + k;
    if (!missing.empty()) throw ConfigError(source + ": missing required keys: " + missing);
    if (!c.eps_list.empty()) c.grid.eps = c.eps_list.front();
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream os;
    os << "scenario = " << c.scenario << '\n';
    os << "nx = " << c.grid.nx << '\n';
    os << "ny = " << c.grid.ny << '\n';
    os << "Lx = " << fmt(c.grid.Lx) << '\n';
    os << "Ly = " << fmt(c.grid.Ly) << '\n';
    os << "dt = " << fmt(c.grid.dt) << '\n';
    os << "T = " << fmt(c.grid.T) << '\n';
    os << "eps = ";
    for (std::size_t k = 0; k < c.eps_list.size(); ++k) os << (k ? ", " : "") << fmt(c.eps_list[k]);
    os << '\n';
    if (!c.A0.empty()) os << "A0 = " << c.A0 << '\n';
    if (!c.A1.empty()) os << "A1 = " << c.A1 << '\n';
    os << "initial_f = " << c.initial_f << '\n';
    os << "initial_u = " << c.initial_u << '\n';
    os << "vmax = " << fmt(c.vmax) << '\n';
    os << "lambda = " << fmt(c.lambda) << '\n';
    os << "lattice = " << c.lattice[0] << ", " << c.lattice[1] << ", " << c.lattice[2] << ", " << c.lattice[3] << '\n';
    os << "max_particles = " << c.max_particles << '\n';
    os << "solver_tol = " << fmt(c.solver_tol) << '\n';
    os << "tol_ledger = " << fmt(c.tol_ledger) << '\n';
    os << "n_cell = " << c.n_cell << '\n';
    os << "moment_grid = " << c.moment_grid << '\n';
    os << "out_dir = " << c.out_dir << '\n';
    os << "snapshot_stride = " << c.snapshot_stride << '\n';
    return os.str();
}

std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t h) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t k = 0; k < n; ++k) {
        h ^= p[k];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t config_hash(const RunConfig& c) {
    const std::string s = serialize_config(c);
    return fnv1a64(s.data(), s.size());
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace nlsv
