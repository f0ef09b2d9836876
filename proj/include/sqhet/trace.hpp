#pragma once

#include <cstddef>
#include <vector>

#include "sqhet/analytic.hpp"
#include "sqhet/grid.hpp"

namespace sqhet {

/// Real time series at the ADC rate, in shot-noise units.
struct PhotocurrentTrace {
    std::vector<double> samples;
    FrequencyGrid grid;
    Scheme scheme = Scheme::unsqueezed;
    std::size_t frame_index = 0;
};

}  // namespace sqhet
