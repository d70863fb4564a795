#include "poclab/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

namespace poclab {

namespace {

void write_binary_dump(const std::string& path, const char magic[4],
                       std::uint32_t a, std::uint32_t b, double t,
                       const std::vector<double>& payload) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    const std::uint32_t version = 1;
    out.write(magic, 4);
    out.write(reinterpret_cast<const char*>(&version), 4);
    out.write(reinterpret_cast<const char*>(&a), 4);
    out.write(reinterpret_cast<const char*>(&b), 4);
    out.write(reinterpret_cast<const char*>(&t), 8);
    out.write(reinterpret_cast<const char*>(payload.data()),
              (std::streamsize)(payload.size() * sizeof(double)));
    if (!out) throw ConfigError("short write: " + path);
}

void read_binary_dump(const std::string& path, const char magic[4],
                      std::uint32_t& a, std::uint32_t& b, double& t,
                      std::vector<double>& payload) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open: " + path);
    char m[4];
    std::uint32_t version = 0;
    in.read(m, 4);
    if (!in || std::memcmp(m, magic, 4) != 0)
        throw ConfigError("bad magic in dump: " + path);
    in.read(reinterpret_cast<char*>(&version), 4);
    if (version != 1) throw ConfigError("unsupported dump version in " + path);
    in.read(reinterpret_cast<char*>(&a), 4);
    in.read(reinterpret_cast<char*>(&b), 4);
    in.read(reinterpret_cast<char*>(&t), 8);
    payload.resize((std::size_t)a * b);
    in.read(reinterpret_cast<char*>(payload.data()),
            (std::streamsize)(payload.size() * sizeof(double)));
    if (!in) throw ConfigError("truncated dump: " + path);
}

}  // namespace

void write_weights_dump(const std::string& path, std::uint32_t m, std::uint32_t d,
                        double t, const std::vector<double>& rows) {
    if (rows.size() != (std::size_t)m * d) throw ConfigError("weights dump size mismatch");
    write_binary_dump(path, "POCW", m, d, t, rows);
}

WeightsDump read_weights_dump(const std::string& path) {
    WeightsDump w;
    read_binary_dump(path, "POCW", w.m, w.d, w.t, w.rows);
    return w;
}

void write_density_dump(const std::string& path, std::uint32_t n_lat,
                        std::uint32_t n_lon, double t,
                        const std::vector<double>& masses) {
    if (masses.size() != (std::size_t)n_lat * n_lon)
        throw ConfigError("density dump size mismatch");
    write_binary_dump(path, "POCE", n_lat, n_lon, t, masses);
}

DensityDump read_density_dump(const std::string& path) {
    DensityDump d;
    read_binary_dump(path, "POCE", d.n_lat, d.n_lon, d.t, d.masses);
    return d;
}

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows,
               const std::string& comment) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    if (!comment.empty()) out << "# " << comment << "\n";
    for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& r : rows) {
        for (size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << format_g17(r[i]);
        out << "\n";
    }
    if (!out) throw ConfigError("short write: " + path);
}

}  // namespace poclab
