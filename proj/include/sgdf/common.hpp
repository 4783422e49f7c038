#pragma once

#include <stdexcept>
#include <string>

namespace sgdf {

// Raised when an update or measurement produces NaN/Inf. The library never
// lets non-finite values propagate silently: the filter divides by variance
// estimates, and a poisoned coordinate would corrupt every statistic
// downstream, so blow-ups surface immediately with a location.
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sgdf
