#pragma once

#include <optional>

#include "radarseg/common.hpp"
#include "radarseg/geometry.hpp"

namespace radarseg {

/// One timestamped radar detection. The cartesian position is the sensor-frame
/// conversion of the polar measurement (consistent to 1e-6 m by construction).
struct RadarReturn {
    double t = 0.0;  ///< seconds since scene start
    PolarReturn polar;
    LocalPosition cartesian;  ///< sensor frame
    double doppler = 0.0;     ///< m/s, radial; negative = closing
    double rcs = 0.0;         ///< dBsm
    std::optional<ClassLabel> label;
};

}  // namespace radarseg
