#include "wlab/surface_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace wlab {

void write_surface(const std::string& path, const Immersion& f) {
    std::ofstream out(path);
    if (!out) throw ConfigError("write_surface: cannot open '" + path + "'");
    const TorusGrid& grid = f.grid();
    out << "{\n  \"nTheta\": " << grid.n_theta() << ",\n  \"nPhi\": " << grid.n_phi()
        << ",\n  \"points\": [\n";
    char buf[32];
    for (int k = 0; k < f.points().size(); ++k) {
        const Vec4& p = f.points()[k];
        out << "    [";
        for (int c = 0; c < 4; ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", p[c]);
            out << buf << (c < 3 ? ", " : "");
        }
        out << (k + 1 < f.points().size() ? "],\n" : "]\n");
    }
    out << "  ]\n}\n";
}

Immersion read_surface(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("read_surface: cannot open '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw ConfigError("read_surface: '" + path + "': " + e.what());
    }
    if (!doc.contains("nTheta") || !doc.contains("nPhi") || !doc.contains("points")) {
        throw ConfigError("read_surface: '" + path +
                          "' must contain nTheta, nPhi and points");
    }
    const int n_theta = doc["nTheta"].get<int>();
    const int n_phi = doc["nPhi"].get<int>();
    TorusGrid grid(n_theta, n_phi);
    const auto& pts = doc["points"];
    if (static_cast<int>(pts.size()) != grid.size()) {
        throw ConfigError("read_surface: expected " + std::to_string(grid.size()) +
                          " points, got " + std::to_string(pts.size()));
    }
    Vec4Field field(grid, Vec4::Zero());
    for (int k = 0; k < grid.size(); ++k) {
        const auto& row = pts[k];
        if (row.size() != 4) throw ConfigError("read_surface: point " + std::to_string(k) +
                                               " is not a 4-tuple");
        for (int c = 0; c < 4; ++c) field[k][c] = row[c].get<double>();
    }
    return Immersion(std::move(field));
}

} // namespace wlab
