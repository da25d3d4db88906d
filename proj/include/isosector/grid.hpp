#pragma once

#include "errors.hpp"

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

namespace isosector {

struct GridSpec {
    double lo = 0.0;
    double hi = 0.0;
    bool log = false;
    std::size_t count = 0;
};

// "lo:hi:lin|log:count"
inline GridSpec parse_grid(const std::string& text) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i)
        if (i == text.size() || text[i] == ':') {
            parts.push_back(text.substr(start, i - start));
            start = i + 1;
        }
    require(parts.size() == 4, ErrorKind::ParamOutOfRange, "grid '" + text + "' must look like lo:hi:lin|log:count");
    auto number = [&](const std::string& s) {
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        require(!s.empty() && end == s.c_str() + s.size() && std::isfinite(v), ErrorKind::ParamOutOfRange,
                "grid '" + text + "' has a bad number '" + s + "'");
        return v;
    };
    GridSpec g;
    g.lo = number(parts[0]);
    g.hi = number(parts[1]);
    require(parts[2] == "lin" || parts[2] == "log", ErrorKind::ParamOutOfRange,
            "grid '" + text + "' spacing must be lin or log");
    g.log = parts[2] == "log";
    const double c = number(parts[3]);
    require(c >= 1.0 && c == std::floor(c), ErrorKind::ParamOutOfRange, "grid '" + text + "' count must be a positive integer");
    g.count = std::size_t(c);
    require(g.hi >= g.lo, ErrorKind::ParamOutOfRange, "grid '" + text + "' must have hi >= lo");
    require(g.lo > 0.0, ErrorKind::ParamOutOfRange, "grid '" + text + "' must be positive");
    require(g.count > 1 || g.hi == g.lo, ErrorKind::ParamOutOfRange, "grid '" + text + "' with one point needs hi == lo");
    return g;
}

// Endpoints are exact.
inline std::vector<double> make_grid(const GridSpec& g) {
    std::vector<double> v(g.count);
    for (std::size_t i = 0; i < g.count; ++i) {
        if (g.count == 1) {
            v[i] = g.lo;
            break;
        }
        const double t = double(i) / double(g.count - 1);
        v[i] = g.log ? std::exp(std::log(g.lo) + t * (std::log(g.hi) - std::log(g.lo))) : g.lo + t * (g.hi - g.lo);
    }
    if (g.count > 1) {
        v.front() = g.lo;
        v.back() = g.hi;
    }
    return v;
}

inline std::vector<double> make_grid(const std::string& text) { return make_grid(parse_grid(text)); }

} // namespace isosector
