#ifndef EULERLAB_HISTORY_IO_HPP
#define EULERLAB_HISTORY_IO_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "field_io.hpp"
#include "flow_map.hpp"

namespace eulerlab {

// Velocity history on disk: a directory of per-frame field files plus an
// index JSON listing times and file names.
inline void write_history(const VelocityHistory& history, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    nlohmann::json index;
    index["n"] = history.grid().n;
    index["box_length"] = history.grid().box_length;
    index["frames"] = nlohmann::json::array();
    char name[64];
    for (std::size_t k = 0; k < history.frame_count(); ++k) {
        std::snprintf(name, sizeof name, "ux_%06zu.elf2", k);
        const std::string ux = name;
        std::snprintf(name, sizeof name, "uy_%06zu.elf2", k);
        const std::string uy = name;
        write_field_binary(history.frame(k).x_component, dir + "/" + ux);
        write_field_binary(history.frame(k).y_component, dir + "/" + uy);
        index["frames"].push_back({{"t", history.times()[k]}, {"ux", ux}, {"uy", uy}});
    }
    std::ofstream out(dir + "/index.json");
    if (!out) throw std::runtime_error("write_history: cannot open index in " + dir);
    out << index.dump(2) << "\n";
}

inline VelocityHistory read_history(const std::string& dir) {
    std::ifstream in(dir + "/index.json");
    if (!in) throw std::runtime_error("read_history: missing index.json in " + dir);
    nlohmann::json index;
    in >> index;
    const Grid2D grid(index.at("n").get<std::size_t>(), index.at("box_length").get<double>());
    VelocityHistory history(grid);
    for (const auto& frame : index.at("frames")) {
        RealField ux = read_field_binary(dir + "/" + frame.at("ux").get<std::string>());
        RealField uy = read_field_binary(dir + "/" + frame.at("uy").get<std::string>());
        history.push(frame.at("t").get<double>(), VectorField(std::move(ux), std::move(uy)));
    }
    if (history.frame_count() < 2)
        throw std::runtime_error("read_history: need at least 2 frames in " + dir);
    return history;
}

}  // namespace eulerlab

#endif
