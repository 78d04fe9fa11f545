#pragma once

#include <cstdint>

#include "mla/model.hpp"

namespace mla {

/// Build the default 24-slot scenario: 20 elastic consumers with smooth
/// seeded demand profiles (<= 200 kW each), a 200 kW - 1 MW thermal plant
/// with cost 0.02 c^2 + 11.5 c (c in MW), a <= 1 MW photovoltaic plant with
/// a midday bell profile, and a 2 MW grid connection priced 9.87 cent/kWh
/// from 08:00 to 18:00 and 18.21 cent/kWh overnight. Deterministic in the
/// seed; the same seed always yields a bitwise-identical scenario.
Scenario make_reference_scenario(std::uint64_t seed);

}  // namespace mla
