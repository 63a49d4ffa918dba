#ifndef RDS_IO_HPP
#define RDS_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rds/noise.hpp"
#include "rds/solver.hpp"

namespace rds {

void ensure_dir(const std::string& dir);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
std::uint64_t file_checksum(const std::string& path);
std::string checksum_hex(std::uint64_t h);

// Noise path replay formats. The binary layout is fixed (little-endian
// doubles, header then node values row-major with the scalar path first),
// so a dump regenerates the path byte-exactly on the same build.
class PathIO {
  public:
    static void save_binary(const NoisePath& path, const std::string& file);
    static NoisePath load_binary(const std::string& file);
    static void save_csv(const NoisePath& path, const std::string& file);
};

// trajectory table: header "t,coeff_1..coeff_K", 17 significant digits
void save_trajectory_csv(const Trajectory& traj, const std::string& file,
                         const std::string& config_hash = "");
Trajectory load_trajectory_csv(const std::string& file);

void save_trajectory_binary(const Trajectory& traj, const std::string& file,
                            const std::string& config_text);

struct ManifestEntry {
    std::string file;
    std::string checksum;
};

// replay manifest: config text + hash + seed list + output checksums
void write_manifest(const std::string& file, const std::string& config_text,
                    const std::string& config_hash,
                    const std::vector<std::uint64_t>& seeds,
                    const std::vector<ManifestEntry>& outputs);

} // namespace rds

#endif
