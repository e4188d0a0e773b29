#ifndef VSPIKE_IO_HPP
#define VSPIKE_IO_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vspike/grid.hpp"

namespace vspike {

// Flat little-endian binary of 64-bit floats behind a 64-byte header
// (magic, Nx, Ny, Lx, delta); lines are stored with Ny = 1.
struct FieldFileHeader {
    char magic[8];
    std::uint32_t Nx = 0, Ny = 0;
    double Lx = 0.0, delta = 0.0;
};

void write_field_file(const std::filesystem::path& path, const std::vector<double>& data,
                      std::uint32_t Nx, std::uint32_t Ny, double Lx, double delta);
std::vector<double> read_field_file(const std::filesystem::path& path, FieldFileHeader* header);

// write-temp-rename
void atomic_write_text(const std::filesystem::path& path, const std::string& content);
void atomic_write_bytes(const std::filesystem::path& path, const std::string& bytes);

// FNV-1a of the canonical config text; stable across runs and builds.
std::string fnv1a_hex(const std::string& text);

} // namespace vspike

#endif
