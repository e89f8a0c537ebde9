#pragma once

#include "crsense/belief.hpp"

namespace crsense {

/// Everything the system knows about one primary channel: the occupancy
/// chain, the sensor operating point, the price of sensing it, the cap on
/// the long-term probability of interfering its primary user, and the
/// average SNR of the secondary links on it.
struct ChannelModel {
    TransitionModel transition;
    SensorModel sensor;
    double sensing_cost = 1.0;     ///< xi_k
    double interference_cap = 1.0; ///< o_k, in (0,1]
    double snr_db = 0.0;

    double mean_gain() const; ///< noise-normalized linear gain, 10^(snr_db/10)
};

void validate(const ChannelModel& c);

} // namespace crsense
