#include "sgdf/schedule.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sgdf {

namespace {
void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}
}  // namespace

Schedule Schedule::constant(double base) {
    require(base > 0.0 && std::isfinite(base), "Schedule::constant: base must be positive");
    Schedule s;
    s.kind_ = ScheduleKind::constant;
    s.base_ = base;
    return s;
}

Schedule Schedule::inverse_sqrt(double base) {
    require(base > 0.0 && std::isfinite(base), "Schedule::inverse_sqrt: base must be positive");
    Schedule s;
    s.kind_ = ScheduleKind::inverse_sqrt;
    s.base_ = base;
    return s;
}

Schedule Schedule::step_decay(double base, double factor, std::vector<double> milestones) {
    require(base > 0.0 && std::isfinite(base), "Schedule::step_decay: base must be positive");
    require(factor > 0.0 && std::isfinite(factor), "Schedule::step_decay: factor must be positive");
    for (std::size_t i = 0; i < milestones.size(); ++i) {
        require(milestones[i] > 0.0 && std::isfinite(milestones[i]),
                "Schedule::step_decay: milestones must be positive");
        if (i > 0) {
            require(milestones[i] > milestones[i - 1],
                    "Schedule::step_decay: milestones must be strictly increasing");
        }
    }
    Schedule s;
    s.kind_ = ScheduleKind::step_decay;
    s.base_ = base;
    s.factor_ = factor;
    s.milestones_ = std::move(milestones);
    return s;
}

Schedule Schedule::cosine(double base, double t_max, double floor_value) {
    require(base > 0.0 && std::isfinite(base), "Schedule::cosine: base must be positive");
    require(t_max >= 1.0 && std::isfinite(t_max), "Schedule::cosine: t_max must be >= 1");
    require(floor_value > 0.0 && floor_value <= base,
            "Schedule::cosine: floor must satisfy 0 < floor <= base");
    Schedule s;
    s.kind_ = ScheduleKind::cosine;
    s.base_ = base;
    s.t_max_ = t_max;
    s.floor_ = floor_value;
    return s;
}

double Schedule::value(std::uint64_t t) const {
    if (t == 0) throw std::invalid_argument("Schedule::value: schedules are 1-indexed (t >= 1)");
    switch (kind_) {
        case ScheduleKind::constant:
            return base_;
        case ScheduleKind::inverse_sqrt:
            return base_ / std::sqrt(static_cast<double>(t));
        case ScheduleKind::step_decay: {
            double v = base_;
            for (double m : milestones_) {
                if (static_cast<double>(t) > m) v *= factor_;
            }
            return v;
        }
        case ScheduleKind::cosine: {
            double tt = std::min(static_cast<double>(t), t_max_);
            return floor_ + 0.5 * (base_ - floor_) *
                                (1.0 + std::cos(std::numbers::pi * tt / t_max_));
        }
    }
    throw std::logic_error("Schedule::value: unknown kind");
}

double schedule_value(const Schedule& s, std::uint64_t t) { return s.value(t); }

}  // namespace sgdf
