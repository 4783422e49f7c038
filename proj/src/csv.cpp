#include "sgdf/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace sgdf {

const char* const kTrajectoryHeader =
    "step,loss,grad_norm_sq,theta_norm,k_mean,k_min,k_max,cum_regret";

std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc())
        throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, p);
}

double parse_double_field(const std::string& s) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e)
        throw std::runtime_error("parse_double_field: malformed number '" + s + "'");
    return v;
}

namespace {

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

void append_optional(std::string& out, const std::optional<double>& v) {
    out.push_back(',');
    if (v) out += format_double(*v);
}

std::optional<double> parse_optional(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return parse_double_field(s);
}

}  // namespace

std::string trajectory_to_csv(const std::vector<TrajectoryRecord>& records) {
    std::string out = kTrajectoryHeader;
    out.push_back('\n');
    std::uint64_t prev_step = 0;
    bool first = true;
    for (const TrajectoryRecord& r : records) {
        if (!first && r.step <= prev_step)
            throw std::invalid_argument("trajectory_to_csv: steps must be strictly increasing (" +
                                        std::to_string(prev_step) + " then " +
                                        std::to_string(r.step) + ")");
        first = false;
        prev_step = r.step;
        out += std::to_string(r.step);
        out.push_back(',');
        out += format_double(r.loss);
        out.push_back(',');
        out += format_double(r.grad_norm_sq);
        out.push_back(',');
        out += format_double(r.theta_norm);
        append_optional(out, r.k_mean);
        append_optional(out, r.k_min);
        append_optional(out, r.k_max);
        append_optional(out, r.cum_regret);
        out.push_back('\n');
    }
    return out;
}

std::vector<TrajectoryRecord> trajectory_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("trajectory_from_csv: empty input (header required)");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kTrajectoryHeader)
        throw std::runtime_error("trajectory_from_csv: unexpected header '" + line + "'");

    std::vector<TrajectoryRecord> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> f = split_row(line);
        if (f.size() != 8)
            throw std::runtime_error("trajectory_from_csv: line " + std::to_string(line_no) +
                                     " has " + std::to_string(f.size()) + " fields, expected 8");
        TrajectoryRecord r;
        std::uint64_t step = 0;
        const char* b = f[0].data();
        const char* e = f[0].data() + f[0].size();
        auto [p, ec] = std::from_chars(b, e, step);
        if (ec != std::errc() || p != e)
            throw std::runtime_error("trajectory_from_csv: bad step on line " +
                                     std::to_string(line_no));
        r.step = step;
        r.loss = parse_double_field(f[1]);
        r.grad_norm_sq = parse_double_field(f[2]);
        r.theta_norm = parse_double_field(f[3]);
        r.k_mean = parse_optional(f[4]);
        r.k_min = parse_optional(f[5]);
        r.k_max = parse_optional(f[6]);
        r.cum_regret = parse_optional(f[7]);
        out.push_back(r);
    }
    return out;
}

namespace {

void write_text_file(const std::string& text, const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary: LF endings everywhere
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace

void write_trajectory_csv(const std::vector<TrajectoryRecord>& records,
                          const std::string& path) {
    write_text_file(trajectory_to_csv(records), path);
}

std::vector<TrajectoryRecord> read_trajectory_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return trajectory_from_csv(buf.str());
}

void write_csv(const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows, const std::string& path) {
    if (header.empty()) throw std::invalid_argument("write_csv: header must be nonempty");
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out.push_back(',');
        out += header[i];
    }
    out.push_back('\n');
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw std::invalid_argument("write_csv: row width " + std::to_string(row.size()) +
                                        " != header width " + std::to_string(header.size()));
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out.push_back(',');
            out += row[i];
        }
        out.push_back('\n');
    }
    write_text_file(out, path);
}

}  // namespace sgdf
