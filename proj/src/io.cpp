#include "vspike/io.hpp"

#include <atomic>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace vspike {

namespace {

constexpr char kMagic[8] = {'V', 'S', 'P', 'K', 'F', 'L', 'D', '1'};

std::filesystem::path temp_sibling(const std::filesystem::path& path) {
    static std::atomic<unsigned> counter{0};
    auto p = path;
    p += ".tmp" + std::to_string(counter.fetch_add(1));
    return p;
}

} // namespace

void write_field_file(const std::filesystem::path& path, const std::vector<double>& data,
                      std::uint32_t Nx, std::uint32_t Ny, double Lx, double delta) {
    if (data.size() != static_cast<size_t>(Nx) * Ny)
        throw std::invalid_argument("write_field_file: size mismatch");
    std::string bytes(64, '\0');
    std::memcpy(bytes.data(), kMagic, 8);
    std::memcpy(bytes.data() + 8, &Nx, 4);
    std::memcpy(bytes.data() + 12, &Ny, 4);
    std::memcpy(bytes.data() + 16, &Lx, 8);
    std::memcpy(bytes.data() + 24, &delta, 8);
    bytes.append(reinterpret_cast<const char*>(data.data()), data.size() * sizeof(double));
    atomic_write_bytes(path, bytes);
}

std::vector<double> read_field_file(const std::filesystem::path& path, FieldFileHeader* header) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_field_file: cannot open " + path.string());
    char head[64];
    in.read(head, 64);
    if (!in || std::memcmp(head, kMagic, 8) != 0)
        throw std::runtime_error("read_field_file: bad header in " + path.string());
    FieldFileHeader h;
    std::memcpy(h.magic, head, 8);
    std::memcpy(&h.Nx, head + 8, 4);
    std::memcpy(&h.Ny, head + 12, 4);
    std::memcpy(&h.Lx, head + 16, 8);
    std::memcpy(&h.delta, head + 24, 8);
    std::vector<double> data(static_cast<size_t>(h.Nx) * h.Ny);
    in.read(reinterpret_cast<char*>(data.data()), data.size() * sizeof(double));
    if (!in) throw std::runtime_error("read_field_file: truncated file " + path.string());
    if (header) *header = h;
    return data;
}

void atomic_write_bytes(const std::filesystem::path& path, const std::string& bytes) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = temp_sibling(path);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("atomic_write: cannot open " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw std::runtime_error("atomic_write: write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

void atomic_write_text(const std::filesystem::path& path, const std::string& content) {
    atomic_write_bytes(path, content);
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace vspike
