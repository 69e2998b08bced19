#pragma once

// Internal CSV/number helpers shared by the loaders and writers. Doubles are
// formatted with shortest round-trip notation so written files reload to the
// exact same values.

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

#include "geofuse/errors.hpp"

namespace geofuse::csv {

inline std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

inline double parse_double(std::string_view s, const std::string& file, int line_no) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw DataError(file + ":" + std::to_string(line_no) + ": invalid number '" +
                        std::string(s) + "'");
    }
    return v;
}

inline long parse_long(std::string_view s, const std::string& file, int line_no) {
    long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw DataError(file + ":" + std::to_string(line_no) + ": invalid integer '" +
                        std::string(s) + "'");
    }
    return v;
}

inline std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

inline std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') {
        line.remove_suffix(1);
    }
    return line;
}

} // namespace geofuse::csv
