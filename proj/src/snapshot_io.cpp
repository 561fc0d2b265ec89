#include "nlsv/snapshot_io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace nlsv {

namespace fs = std::filesystem;

namespace {

constexpr char kFieldMagic[8] = {'N', 'L', 'S', 'V', 'S', 'N', 'A', 'P'};
constexpr char kPartMagic[8] = {'N', 'L', 'S', 'V', 'P', 'A', 'R', 'T'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ofstream& os, const T& x) {
    os.write(reinterpret_cast<const char*>(&x), sizeof(T));
}

template <class T>
T get(std::ifstream& is, const std::string& path) {
    T x{};
    if (!is.read(reinterpret_cast<char*>(&x), sizeof(T))) throw ConfigError("truncated snapshot '" + path + "'");
    return x;
}

void put_array(std::ofstream& os, const std::vector<double>& a) {
    os.write(reinterpret_cast<const char*>(a.data()), static_cast<std::streamsize>(a.size() * sizeof(double)));
}

void get_array(std::ifstream& is, std::vector<double>& a, const std::string& path) {
    if (!is.read(reinterpret_cast<char*>(a.data()), static_cast<std::streamsize>(a.size() * sizeof(double))))
        throw ConfigError("truncated snapshot '" + path + "'");
}

void check_magic(std::ifstream& is, const char (&magic)[8], const std::string& path) {
    char m[8];
    if (!is.read(m, 8) || std::memcmp(m, magic, 8) != 0) throw ConfigError("'" + path + "' is not a snapshot of the expected kind");
    if (get<std::uint32_t>(is, path) != kVersion) throw ConfigError("'" + path + "': unsupported snapshot version");
}

}  // namespace

// ============================================================================
// OutputDir
// ============================================================================

OutputDir::OutputDir(std::string root, std::uint64_t config_hash) : root_(std::move(root)), hash_(config_hash) {
    fs::create_directories(root_);
}

std::string OutputDir::path(const std::string& name) const {
    return (fs::path(root_) / name).string();
}

void OutputDir::record(const std::string& name) {
    for (const auto& n : names_)
        if (n == name) return;
    names_.push_back(name);
}

void OutputDir::write_text(const std::string& name, const std::string& text) {
    const fs::path p = path(name);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream os(p, std::ios::binary);
    if (!os) throw ConfigError("cannot write '" + p.string() + "'");
    os << text;
    os.close();
    record(name);
}

void OutputDir::write_manifest() const {
    std::ofstream os(path("MANIFEST.txt"), std::ios::binary);
    if (!os) throw ConfigError("cannot write manifest in '" + root_ + "'");
    os << "config_hash " << hex64(hash_) << '\n';
    for (const auto& n : names_) {
        const std::string p = path(n);
        os << n << ' ' << fs::file_size(p) << ' ' << hex64(file_checksum(p)) << '\n';
    }
}

std::uint64_t file_checksum(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot read '" + path + "'");
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (is) {
        is.read(buf, sizeof buf);
        h = fnv1a64(buf, static_cast<std::size_t>(is.gcount()), h);
    }
    return h;
}

// ============================================================================
// Snapshots
// ============================================================================

void write_field_snapshot(const std::string& path, const VectorField& u, double t) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot write '" + path + "'");
    const GridSpec& g = u.grid();
    os.write(kFieldMagic, 8);
    put(os, kVersion);
    put(os, static_cast<std::int32_t>(g.nx));
    put(os, static_cast<std::int32_t>(g.ny));
    put(os, g.Lx);
    put(os, g.Ly);
    put(os, t);
    put_array(os, u.u_data());
    put_array(os, u.v_data());
}

std::pair<VectorField, double> read_field_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot read '" + path + "'");
    check_magic(is, kFieldMagic, path);
    GridSpec g;
    g.nx = get<std::int32_t>(is, path);
    g.ny = get<std::int32_t>(is, path);
    g.Lx = get<double>(is, path);
    g.Ly = get<double>(is, path);
    const double t = get<double>(is, path);
    VectorField u(g);
    get_array(is, u.u_data(), path);
    get_array(is, u.v_data(), path);
    return {std::move(u), t};
}

void write_particle_snapshot(const std::string& path, const ParticleEnsemble& ens, double t) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot write '" + path + "'");
    os.write(kPartMagic, 8);
    put(os, kVersion);
    put(os, static_cast<std::uint64_t>(ens.size()));
    put(os, t);
    put_array(os, ens.x);
    put_array(os, ens.y);
    put_array(os, ens.vx);
    put_array(os, ens.vy);
    put_array(os, ens.w);
}

std::pair<ParticleEnsemble, double> read_particle_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot read '" + path + "'");
    check_magic(is, kPartMagic, path);
    const auto n = static_cast<std::size_t>(get<std::uint64_t>(is, path));
    const double t = get<double>(is, path);
    ParticleEnsemble e;
    for (auto* a : {&e.x, &e.y, &e.vx, &e.vy, &e.w}) {
        a->resize(n);
        get_array(is, *a, path);
    }
    return {std::move(e), t};
}

// ============================================================================
// Tensor CSV
// ============================================================================

std::string tensor_csv(const std::vector<Tensor4>& seq, double dt) {
    std::ostringstream os;
    os << "t";
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) os << ",c" << a << b;
    os << '\n';
    char buf[64];
    for (std::size_t n = 0; n < seq.size(); ++n) {
        std::snprintf(buf, sizeof buf, "%.17g", n * dt);
        os << buf;
        for (double x : seq[n].c) {
            std::snprintf(buf, sizeof buf, ",%.17g", x);
            os << buf;
        }
        os << '\n';
    }
    return os.str();
}

std::vector<Tensor4> parse_tensor_csv(const std::string& text, double* dt) {
    std::istringstream in(text);
    std::string line;
    std::vector<Tensor4> out;
    std::vector<double> times;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 || line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ss, cell, ',')) {
            try {
                vals.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ConfigError("tensor CSV line " + std::to_string(lineno) + ": bad number '" + cell + "'");
            }
        }
        if (vals.size() != 17) throw ConfigError("tensor CSV line " + std::to_string(lineno) + ": expected 17 columns");
        times.push_back(vals[0]);
        Tensor4 C;
        for (int k = 0; k < 16; ++k) C.c[k] = vals[k + 1];
        out.push_back(C);
    }
    if (dt) *dt = times.size() > 1 ? times[1] - times[0] : 0.0;
    return out;
}

std::vector<Tensor4> load_tensor_csv(const std::string& path, double* dt) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_tensor_csv(ss.str(), dt);
}

}  // namespace nlsv
