#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "poclab/errors.hpp"

namespace poclab {

// Raw-weights dump: magic "POCW", u32 version, u32 m, u32 d, f64 t, then
// m*d row-major little-endian doubles.
struct WeightsDump {
    std::uint32_t m = 0, d = 0;
    double t = 0.0;
    std::vector<double> rows;
};

void write_weights_dump(const std::string& path, std::uint32_t m, std::uint32_t d,
                        double t, const std::vector<double>& rows);
WeightsDump read_weights_dump(const std::string& path);

// Density dump: magic "POCE", u32 version, u32 n_lat, u32 n_lon, f64 t,
// then per-cell masses.
struct DensityDump {
    std::uint32_t n_lat = 0, n_lon = 0;
    double t = 0.0;
    std::vector<double> masses;
};

void write_density_dump(const std::string& path, std::uint32_t n_lat,
                        std::uint32_t n_lon, double t,
                        const std::vector<double>& masses);
DensityDump read_density_dump(const std::string& path);

// CSV with a fixed %.17g float format so repeated runs are byte-identical.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows,
               const std::string& comment = {});

std::string format_g17(double v);

}  // namespace poclab
