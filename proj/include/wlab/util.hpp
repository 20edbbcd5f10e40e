#ifndef WLAB_UTIL_HPP
#define WLAB_UTIL_HPP

#include <charconv>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "wlab/grid.hpp"

namespace wlab {

/// Shortest decimal that round-trips to the same double.
inline std::string format_double(double x) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

/// Column-stable CSV emitter; all floats use shortest round-trip decimals.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header)
        : out_(path) {
        if (!out_) throw LabError("CsvWriter: cannot open '" + path + "'");
        for (std::size_t i = 0; i < header.size(); ++i) {
            out_ << header[i] << (i + 1 < header.size() ? "," : "");
        }
        out_ << "\n";
    }

    CsvWriter& cell(const std::string& s) {
        sep();
        out_ << s;
        return *this;
    }
    CsvWriter& cell(double x) { return cell(format_double(x)); }
    CsvWriter& cell(int x) { return cell(std::to_string(x)); }

    void end_row() {
        out_ << "\n";
        first_ = true;
    }

private:
    void sep() {
        if (!first_) out_ << ",";
        first_ = false;
    }
    std::ofstream out_;
    bool first_ = true;
};

/// Deterministic generator: splitmix64-seeded xoshiro-free minimal engine.
/// Distribution helpers are hand-rolled so output never depends on the
/// standard library's implementation-defined algorithms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    std::uint64_t next() {
        // splitmix64
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    double uniform() { return double(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        // Box-Muller with cached second value.
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        cached_ = r * std::sin(kTwoPi * u2);
        have_cached_ = true;
        return r * std::cos(kTwoPi * u2);
    }

    Vec4 unit_vec4() {
        Vec4 v(normal(), normal(), normal(), normal());
        while (v.norm() < 1e-6) v = Vec4(normal(), normal(), normal(), normal());
        return v.normalized();
    }

private:
    std::uint64_t state_;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Least-squares straight line through (x_i, y_i).
inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    LineFit f;
    f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / n;
    return f;
}

} // namespace wlab

#endif
