#pragma once

// Step-size / gain-exponent schedules. Steps are 1-indexed: value(1) is the
// factor used by the first update. All schedules are strictly positive for
// every t >= 1; validation happens at construction so evaluation never fails.

#include <cstdint>
#include <vector>

namespace sgdf {

enum class ScheduleKind { constant, inverse_sqrt, step_decay, cosine };

class Schedule {
public:
    // value(t) = base
    static Schedule constant(double base);

    // value(t) = base / sqrt(t)
    static Schedule inverse_sqrt(double base);

    // value(t) = base * factor^(number of milestones m with t > m);
    // i.e. the decay at milestone m takes effect from step m+1 on.
    static Schedule step_decay(double base, double factor, std::vector<double> milestones);

    // value(t) = floor + (base - floor)/2 * (1 + cos(pi * min(t, t_max)/t_max));
    // floor must be positive so the schedule never reaches zero.
    static Schedule cosine(double base, double t_max, double floor_value);

    double value(std::uint64_t t) const;

    ScheduleKind kind() const { return kind_; }
    double base() const { return base_; }

private:
    Schedule() = default;

    ScheduleKind kind_ = ScheduleKind::constant;
    double base_ = 1.0;
    double factor_ = 1.0;                // step_decay
    std::vector<double> milestones_;     // step_decay, strictly increasing
    double t_max_ = 1.0;                 // cosine
    double floor_ = 0.0;                 // cosine
};

double schedule_value(const Schedule& s, std::uint64_t t);

}  // namespace sgdf
