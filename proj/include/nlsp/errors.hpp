#pragma once

#include <stdexcept>
#include <string>

namespace nlsp {

// Non-finite data reached an API boundary.
struct numerical_corruption_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Propagation requested at (or unrecoverably near) a zero of a ray function.
struct singular_time_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Grid cannot represent the requested operation (chirp aliasing, resampling
// mass loss, step-size floor reached without a blow-up signature, ...).
struct resolution_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A transform would move significant mass across the periodic boundary.
struct boundary_mass_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Scenario file rejected; message carries the offending line number.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace nlsp
