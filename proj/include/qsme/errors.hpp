#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qsme {

// Invalid or inconsistent configuration (bad field value, missing key).
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-finite state produced while stepping an SDE path.
class integration_error : public std::runtime_error {
public:
    integration_error(const std::string& msg, std::int64_t step, double time)
        : std::runtime_error(msg), step_index(step), time(time) {}
    std::int64_t step_index;
    double time;
};

// Not enough usable samples for a statistical fit.
class estimation_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace qsme
