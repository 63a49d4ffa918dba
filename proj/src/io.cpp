#include "rds/io.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rds/numeric.hpp"

namespace rds {

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create directory '" + dir + "': " + ec.message());
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
}

std::uint64_t file_checksum(const std::string& path) {
    const std::string data = read_text_file(path);
    return fnv1a64(data.data(), data.size());
}

std::string checksum_hex(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

constexpr char kPathMagic[8] = {'R', 'D', 'S', 'N', 'P', 'T', 'H', '1'};

void put_u64(std::ofstream& o, std::uint64_t v) {
    o.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void put_f64(std::ofstream& o, double v) {
    o.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
std::uint64_t get_u64(std::ifstream& i) {
    std::uint64_t v;
    i.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}
double get_f64(std::ifstream& i) {
    double v;
    i.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}

} // namespace

void PathIO::save_binary(const NoisePath& path, const std::string& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + file + "'");
    out.write(kPathMagic, 8);
    put_u64(out, path.seed);
    put_u64(out, path.grid.n_points);
    put_u64(out, path.modes());
    put_u64(out, path.grid.zero_index);
    put_f64(out, path.grid.dt);
    put_f64(out, path.beta);
    put_f64(out, path.gamma);
    put_f64(out, path.cq);
    put_f64(out, path.origin_shift);
    for (double q : path.modal_scales) put_f64(out, q);
    for (std::size_t i = 0; i < path.grid.n_points; ++i) {
        put_f64(out, path.scalar_value(i));
        for (std::size_t k = 0; k < path.modes(); ++k) put_f64(out, path.value(i, k));
    }
}

NoisePath PathIO::load_binary(const std::string& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + file + "'");
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kPathMagic, 8) != 0)
        throw std::runtime_error("'" + file + "' is not a noise path dump");
    NoisePath p;
    p.seed = get_u64(in);
    const std::uint64_t n = get_u64(in);
    const std::uint64_t K = get_u64(in);
    p.grid.zero_index = get_u64(in);
    p.grid.dt = get_f64(in);
    p.beta = get_f64(in);
    p.gamma = get_f64(in);
    p.cq = get_f64(in);
    p.origin_shift = get_f64(in);
    p.grid.n_points = n;
    p.grid.t_min = -static_cast<double>(p.grid.zero_index) * p.grid.dt;
    p.grid.t_max =
        static_cast<double>(n - 1 - p.grid.zero_index) * p.grid.dt;
    p.modal_scales.resize(K);
    for (auto& q : p.modal_scales) q = get_f64(in);
    p.scalar_.resize(n);
    p.values_.resize(n * K);
    for (std::uint64_t i = 0; i < n; ++i) {
        p.scalar_[i] = get_f64(in);
        for (std::uint64_t k = 0; k < K; ++k) p.values_[i * K + k] = get_f64(in);
    }
    if (!in) throw std::runtime_error("'" + file + "' truncated");
    return p;
}

void PathIO::save_csv(const NoisePath& path, const std::string& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write '" + file + "'");
    out << "# seed=" << path.seed << " dt=" << format_g17(path.grid.dt)
        << " t_min=" << format_g17(path.grid.t_min)
        << " t_max=" << format_g17(path.grid.t_max) << " K=" << path.modes()
        << " beta=" << format_g17(path.beta) << " gamma=" << format_g17(path.gamma)
        << " cq=" << format_g17(path.cq) << "\n";
    out << "t,scalar";
    for (std::size_t k = 1; k <= path.modes(); ++k) out << ",m" << k;
    out << "\n";
    for (std::size_t i = 0; i < path.grid.n_points; ++i) {
        out << format_g17(path.grid.time_of(i)) << "," << format_g17(path.scalar_value(i));
        for (std::size_t k = 0; k < path.modes(); ++k)
            out << "," << format_g17(path.value(i, k));
        out << "\n";
    }
}

void save_trajectory_csv(const Trajectory& traj, const std::string& file,
                         const std::string& config_hash) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write '" + file + "'");
    out << "# seed=" << traj.fiber.seed << " shift=" << format_g17(traj.fiber.shift);
    if (!config_hash.empty()) out << " config=" << config_hash;
    out << "\n";
    const std::size_t K = traj.states.empty() ? 0 : traj.states.front().modes();
    out << "t";
    for (std::size_t k = 1; k <= K; ++k) out << ",coeff_" << k;
    out << "\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        out << format_g17(traj.times[i]);
        for (std::size_t k = 0; k < K; ++k) out << "," << format_g17(traj.states[i][k]);
        out << "\n";
    }
}

Trajectory load_trajectory_csv(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open '" + file + "'");
    Trajectory traj;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("t,", 0) == 0 || line == "t") continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (row.empty()) continue;
        traj.times.push_back(row.front());
        traj.states.emplace_back(std::vector<double>(row.begin() + 1, row.end()));
    }
    return traj;
}

void save_trajectory_binary(const Trajectory& traj, const std::string& file,
                            const std::string& config_text) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + file + "'");
    const char magic[8] = {'R', 'D', 'S', 'T', 'R', 'A', 'J', '1'};
    out.write(magic, 8);
    const std::uint64_t cfg_len = config_text.size();
    out.write(reinterpret_cast<const char*>(&cfg_len), 8);
    out.write(config_text.data(), static_cast<std::streamsize>(cfg_len));
    const std::uint64_t n = traj.times.size();
    const std::uint64_t K = traj.states.empty() ? 0 : traj.states.front().modes();
    out.write(reinterpret_cast<const char*>(&n), 8);
    out.write(reinterpret_cast<const char*>(&K), 8);
    out.write(reinterpret_cast<const char*>(&traj.fiber.seed), 8);
    out.write(reinterpret_cast<const char*>(&traj.fiber.shift), 8);
    for (std::size_t i = 0; i < n; ++i) {
        out.write(reinterpret_cast<const char*>(&traj.times[i]), 8);
        out.write(reinterpret_cast<const char*>(traj.states[i].coeffs.data()),
                  static_cast<std::streamsize>(8 * K));
    }
}

void write_manifest(const std::string& file, const std::string& config_text,
                    const std::string& config_hash,
                    const std::vector<std::uint64_t>& seeds,
                    const std::vector<ManifestEntry>& outputs) {
    nlohmann::json j;
    j["format"] = "rds-manifest-1";
    j["config_hash"] = config_hash;
    j["config"] = config_text;
    j["seeds"] = seeds;
    nlohmann::json outs = nlohmann::json::array();
    for (const auto& e : outputs) outs.push_back({{"file", e.file}, {"checksum", e.checksum}});
    j["outputs"] = outs;
    write_text_file(file, j.dump(2) + "\n");
}

} // namespace rds
