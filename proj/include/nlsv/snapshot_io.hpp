/// @file snapshot_io.hpp
/// @brief Binary field/particle snapshots, tensor CSVs and the output manifest.
///
/// Binary layouts (little-endian) are documented in docs/formats.md.

#pragma once

#include "nlsv/config.hpp"
#include "nlsv/particles.hpp"

#include <string>
#include <utility>
#include <vector>

namespace nlsv {

/// Output directory that records every artifact it writes; write_manifest() lists each
/// file with its size and FNV-1a 64 checksum, plus the config hash.
class OutputDir {
public:
    OutputDir(std::string root, std::uint64_t config_hash);

    const std::string& root() const { return root_; }
    /// Absolute-or-relative path of an artifact inside the directory.
    std::string path(const std::string& name) const;
    /// Registers an artifact already written at path(name).
    void record(const std::string& name);
    /// Writes a text artifact and records it.
    void write_text(const std::string& name, const std::string& text);
    /// Writes MANIFEST.txt (not listed in itself).
    void write_manifest() const;
    const std::vector<std::string>& artifacts() const { return names_; }

private:
    std::string root_;
    std::uint64_t hash_;
    std::vector<std::string> names_;
};

std::uint64_t file_checksum(const std::string& path);

void write_field_snapshot(const std::string& path, const VectorField& u, double t);
std::pair<VectorField, double> read_field_snapshot(const std::string& path);

void write_particle_snapshot(const std::string& path, const ParticleEnsemble& ens, double t);
std::pair<ParticleEnsemble, double> read_particle_snapshot(const std::string& path);

/// Rows "t,c00,c01,...,c33" (row-major 4x4 over flat gradient indices).
std::string tensor_csv(const std::vector<Tensor4>& seq, double dt);
std::vector<Tensor4> parse_tensor_csv(const std::string& text, double* dt = nullptr);
std::vector<Tensor4> load_tensor_csv(const std::string& path, double* dt = nullptr);

}  // namespace nlsv
