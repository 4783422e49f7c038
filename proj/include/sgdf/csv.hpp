#pragma once

// CSV telemetry: the single machine-readable record of every run. Numbers are
// written with std::to_chars (shortest round-trip form) and read back with
// std::from_chars, so write -> read recovers every double bit-exactly and the
// byte stream is identical across runs on one platform. Format: UTF-8, comma
// separator, '.' decimal point, LF line endings, mandatory header.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sgdf {

// One telemetry row. Gain statistics exist only for gain-filtering variants
// and cumulative regret only when the objective's optimum is known; absent
// values serialize as empty fields.
struct TrajectoryRecord {
    std::uint64_t step = 0;  // 1-indexed, strictly increasing within a file
    double loss = 0.0;             // noise-free f(theta_t)
    double grad_norm_sq = 0.0;     // |grad f(theta_t)|^2 (true gradient)
    double theta_norm = 0.0;       // |theta_t|
    std::optional<double> k_mean;  // raw Wiener gain statistics over coordinates
    std::optional<double> k_min;
    std::optional<double> k_max;
    std::optional<double> cum_regret;
};

extern const char* const kTrajectoryHeader;  // column order, single source of truth

std::string format_double(double v);           // shortest round-trip decimal form
double parse_double_field(const std::string&);  // inverse; throws on malformed input

std::string trajectory_to_csv(const std::vector<TrajectoryRecord>& records);
std::vector<TrajectoryRecord> trajectory_from_csv(const std::string& text);

void write_trajectory_csv(const std::vector<TrajectoryRecord>& records,
                          const std::string& path);
std::vector<TrajectoryRecord> read_trajectory_csv(const std::string& path);

// Generic table writer used by the summary/report emitters: header then rows,
// all fields preformatted. Row widths must match the header.
void write_csv(const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows, const std::string& path);

}  // namespace sgdf
