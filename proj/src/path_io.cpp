// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "jumplab/path_io.hpp"

#include <charconv>
#include <sstream>
#include <vector>

#include "jumplab/error.hpp"
#include "jumplab/format.hpp"

namespace jumplab {

namespace {

double to_double(std::string_view s, std::size_t line)
{
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw ConfigError(line, "not a number: '" + std::string(s) + "'");
    }
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace

std::string mode_name(SmallJumpMode mode)
{
    return mode == SmallJumpMode::drop ? "drop" : "gaussian_substitute";
}

std::string path_to_csv(const Path& path, const SimConfig& config, std::size_t path_index)
{
    const int d = path.x0.dim();
    std::string out;
    out += "# d=" + std::to_string(d) + "\n";
    out += "# x0=";
    for (int i = 0; i < d; ++i) out += (i ? ";" : "") + format_double(path.x0[i]);
    out += "\n# seed=" + std::to_string(path.seed) + "\n";
    out += "# epsilon=" + format_double(config.epsilon) + "\n";
    out += "# mode=" + mode_name(config.small_jump_mode) + "\n";
    out += "# t_end=" + format_double(path.t_end) + "\n";
    out += "# path_index=" + std::to_string(path_index) + "\n";
    out += "# dropped_variance_fraction=" + format_double(path.truncation.dropped_variance_fraction) + "\n";
    out += std::string("# approximate=") + (path.approximate ? "1" : "0") + "\n";
    out += "jump_time";
    for (int i = 0; i < d; ++i) out += ",z" + std::to_string(i + 1);
    out += "\n";
    for (std::size_t k = 0; k < path.jump_times.size(); ++k) {
        out += format_double(path.jump_times[k]);
        for (int i = 0; i < d; ++i) out += "," + format_double(path.jump_vectors[k][i]);
        out += "\n";
    }
    return out;
}

Path path_from_csv(std::string_view text)
{
    Path p;
    int d = 0;
    bool header = false;
    std::size_t line_no = 0;
    for (std::string_view line : split(text, '\n')) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == '#') {
            line.remove_prefix(1);
            while (!line.empty() && line.front() == ' ') line.remove_prefix(1);
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) continue;
            const std::string_view key = line.substr(0, eq), value = line.substr(eq + 1);
            if (key == "d") {
                d = static_cast<int>(to_double(value, line_no));
                if (d < 1 || d > kMaxDim) throw ConfigError(line_no, "dimension must be 1, 2 or 3");
            } else if (key == "x0") {
                const auto parts = split(value, ';');
                Vec x(static_cast<int>(parts.size()));
                if (parts.size() > kMaxDim) throw ConfigError(line_no, "x0 has too many coordinates");
                for (std::size_t i = 0; i < parts.size(); ++i) x[static_cast<int>(i)] = to_double(parts[i], line_no);
                p.x0 = x;
            } else if (key == "seed") {
                p.seed = std::stoull(std::string(value));
            } else if (key == "t_end") {
                p.t_end = to_double(value, line_no);
            } else if (key == "dropped_variance_fraction") {
                p.truncation.dropped_variance_fraction = to_double(value, line_no);
            } else if (key == "approximate") {
                p.approximate = value == "1";
            }
            continue;
        }
        if (!header) {
            if (line.substr(0, 9) != "jump_time") throw ConfigError(line_no, "expected the jump_time header");
            if (d == 0 || p.x0.dim() != d) throw ConfigError(line_no, "missing or inconsistent d / x0 metadata");
            if (static_cast<int>(split(line, ',').size()) != d + 1) throw ConfigError(line_no, "header width");
            header = true;
            continue;
        }
        const auto cells = split(line, ',');
        if (static_cast<int>(cells.size()) != d + 1)
            throw ConfigError(line_no, "expected " + std::to_string(d + 1) + " columns");
        p.jump_times.push_back(to_double(cells[0], line_no));
        Vec z(d);
        for (int i = 0; i < d; ++i) z[i] = to_double(cells[static_cast<std::size_t>(i) + 1], line_no);
        p.jump_vectors.push_back(z);
    }
    if (!header) throw ConfigError(line_no, "no jump_time header found");
    return p;
}

}  // namespace jumplab
