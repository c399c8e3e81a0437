#ifndef EULERLAB_FIELD_IO_HPP
#define EULERLAB_FIELD_IO_HPP

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "field.hpp"
#include "grid.hpp"

namespace eulerlab {

static_assert(std::endian::native == std::endian::little,
              "field binary format is little-endian; big-endian hosts are unsupported");

// Flat binary field file: magic "ELF2", u32 n, f64 box_length, then n^2 f64
// samples row-major, all little-endian.
inline void write_field_binary(const RealField& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_field_binary: cannot open " + path);
    const char magic[4] = {'E', 'L', 'F', '2'};
    out.write(magic, 4);
    const std::uint32_t n = static_cast<std::uint32_t>(f.n());
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    const double L = f.grid().box_length;
    out.write(reinterpret_cast<const char*>(&L), sizeof L);
    out.write(reinterpret_cast<const char*>(f.values().data()),
              static_cast<std::streamsize>(f.values().size() * sizeof(double)));
    if (!out) throw std::runtime_error("write_field_binary: short write to " + path);
}

inline RealField read_field_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_field_binary: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "ELF2", 4) != 0)
        throw std::runtime_error("read_field_binary: bad magic in " + path);
    std::uint32_t n = 0;
    double L = 0.0;
    in.read(reinterpret_cast<char*>(&n), sizeof n);
    in.read(reinterpret_cast<char*>(&L), sizeof L);
    if (!in) throw std::runtime_error("read_field_binary: truncated header in " + path);
    RealField f(Grid2D(n, L));
    in.read(reinterpret_cast<char*>(f.values().data()),
            static_cast<std::streamsize>(f.values().size() * sizeof(double)));
    if (!in) throw std::runtime_error("read_field_binary: truncated samples in " + path);
    return f;
}

// Plain-text alternative: one line per grid row, comma-separated samples.
// The box length is not part of the text format and must be supplied on read.
inline void write_field_csv(const RealField& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_field_csv: cannot open " + path);
    char buf[32];
    for (std::size_t i = 0; i < f.n(); ++i) {
        for (std::size_t j = 0; j < f.n(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", f(i, j));
            out << buf << (j + 1 == f.n() ? "" : ",");
        }
        out << "\n";
    }
}

inline RealField read_field_csv(const std::string& path, double box_length) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_field_csv: cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("read_field_csv: empty file " + path);
    const std::size_t n = rows.size();
    RealField f(Grid2D(n, box_length));
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n)
            throw std::runtime_error("read_field_csv: ragged row in " + path);
        for (std::size_t j = 0; j < n; ++j) f(i, j) = rows[i][j];
    }
    return f;
}

}  // namespace eulerlab

#endif
