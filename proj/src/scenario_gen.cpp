#include "mla/scenario_gen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace mla {

namespace {

// std::uniform_real_distribution is implementation-defined; derive uniforms
// from the raw engine output so seeded scenarios are identical everywhere.
double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * u01(rng);
}

constexpr std::size_t kSlots = 24;
constexpr double kOffPeakTariff = 9.87;   // 08:00 - 18:00
constexpr double kPeakTariff = 18.21;     // 18:00 - 08:00

double grid_tariff_at(std::size_t t) {
  return (t >= 8 && t < 18) ? kOffPeakTariff : kPeakTariff;
}

// Midday irradiance bell, zero before 06:00 and after 19:30, peak 1 MW.
double pv_availability_at(std::size_t t) {
  const double h = static_cast<double>(t) + 0.5;
  const double arc = std::sin(std::numbers::pi * (h - 6.0) / 13.5);
  return (h > 6.0 && h < 19.5 && arc > 0.0) ? 1000.0 * arc * arc : 0.0;
}

}  // namespace

Scenario make_reference_scenario(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Scenario s;
  s.time_grid = {kSlots, 1.0};
  s.solver = SolverOptions{};

  const double two_pi = 2.0 * std::numbers::pi;
  for (int r = 0; r < 20; ++r) {
    LacSpec lac;
    lac.id = "lac" + std::string(r < 9 ? "0" : "") + std::to_string(r + 1);
    lac.k_sensitivity = 0.217;
    const double scale = uniform(rng, 90.0, 150.0);
    const double amp1 = uniform(rng, 0.05, 0.25);
    const double amp2 = uniform(rng, 0.0, 0.15);
    const double phase1 = uniform(rng, 0.0, two_pi);
    const double phase2 = uniform(rng, 0.0, two_pi);
    for (std::size_t t = 0; t < kSlots; ++t) {
      const double h = static_cast<double>(t) + 0.5;
      // Overnight-charging shape: peaks around 02:00, trough mid-afternoon.
      const double shape = 0.55 + 0.45 * std::cos(two_pi * (h - 2.0) / 24.0);
      const double wiggle = amp1 * std::sin(two_pi * h / 24.0 + phase1) +
                            amp2 * std::sin(2.0 * two_pi * h / 24.0 + phase2);
      const double desired = std::clamp(scale * (shape + wiggle), 10.0, 200.0);
      lac.desired_power.push_back(desired);
      lac.min_power.push_back(0.0);
      lac.max_power.push_back(200.0);
      lac.forecast_price.push_back(grid_tariff_at(t));
      lac.u_max.push_back(derive_u_max(lac.forecast_price[t], lac.k_sensitivity, desired));
    }
    s.lacs.push_back(std::move(lac));
  }

  TppSpec tpp;
  tpp.id = "tpp";
  tpp.alpha = 0.02;
  tpp.beta = 11.5;
  tpp.gamma = 0.0;
  tpp.min_gen.assign(kSlots, 200.0);
  tpp.max_gen.assign(kSlots, 1000.0);
  s.generators.emplace_back(std::move(tpp));

  PvSpec pv;
  pv.id = "pv";
  for (std::size_t t = 0; t < kSlots; ++t) pv.availability.push_back(pv_availability_at(t));
  s.generators.emplace_back(std::move(pv));

  GridSpec grid;
  grid.id = "grid";
  for (std::size_t t = 0; t < kSlots; ++t) {
    grid.tariff.push_back(grid_tariff_at(t));
    grid.max_draw.push_back(2000.0);
  }
  s.generators.emplace_back(std::move(grid));

  validate_scenario(s);
  return s;
}

}  // namespace mla
