#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "mla/errors.hpp"

// Domain model for the market-balancing engine.
//
// Sign convention used everywhere downstream: an agent's net injection p is
// positive for generators (p = c >= 0) and negative for consumers
// (p = -x <= 0), so the per-slot balance constraint reads sum_i p_i = 0 and
// the clearing price satisfies U'(x) = lambda and C'(c) = lambda at interior
// optima.
//
// Units: power in kW, prices in euro-cent per kWh, slot duration in hours.
// TPP cost coefficients alpha/beta are MW-denominated as they appear in
// scenario files; see mla/agents.hpp for the kW-converted working form.

namespace mla {

struct TimeGrid {
  std::size_t slot_count = 0;        // T
  double slot_duration_hours = 0.0;  // dt

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

/// Elastic consumer aggregate. All per-slot vectors have length T.
struct LacSpec {
  std::string id;
  std::vector<double> desired_power;   // x_pr, kW, > 0
  std::vector<double> min_power;       // m, kW, >= 0
  std::vector<double> max_power;       // M, kW
  double k_sensitivity = 0.0;          // K, > 0
  std::vector<double> forecast_price;  // cent/kWh, > 0
  std::vector<double> u_max;           // utility ceiling; derived when absent

  friend bool operator==(const LacSpec&, const LacSpec&) = default;
};

/// Fuel-fed plant with quadratic cost and a forced minimum output.
struct TppSpec {
  std::string id;
  double alpha = 0.0;  // cent/(MW^2 * slot), >= 0
  double beta = 0.0;   // cent/(MW * slot)
  double gamma = 0.0;  // cent/slot, affects reported cost only
  std::vector<double> min_gen;  // kW
  std::vector<double> max_gen;  // kW

  friend bool operator==(const TppSpec&, const TppSpec&) = default;
};

/// Zero-marginal-cost plant capped by the irradiance profile.
struct PvSpec {
  std::string id;
  std::vector<double> availability;  // kW, >= 0

  friend bool operator==(const PvSpec&, const PvSpec&) = default;
};

/// Bulk grid connection with a linear tariff.
struct GridSpec {
  std::string id;
  std::vector<double> tariff;    // cent/kWh, > 0
  std::vector<double> max_draw;  // kW, > 0

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

using GeneratorSpec = std::variant<TppSpec, PvSpec, GridSpec>;

struct SolverOptions {
  double rho_initial = 1.0;    // penalty seed, cent/kWh per MW (per-slot, independent)
  double eps_abs = 1e-4;
  double eps_rel = 1e-5;
  std::size_t max_iterations = 500;

  friend bool operator==(const SolverOptions&, const SolverOptions&) = default;
};

struct Scenario {
  TimeGrid time_grid;
  std::vector<LacSpec> lacs;
  std::vector<GeneratorSpec> generators;
  SolverOptions solver;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Net injection in kW under the producers-positive convention.
struct NetPower {
  double kw = 0.0;

  friend bool operator==(const NetPower&, const NetPower&) = default;
};

inline NetPower net_from_consumption(double x_kw) { return NetPower{-x_kw}; }
inline NetPower net_from_generation(double c_kw) { return NetPower{c_kw}; }
inline double consumption_kw(NetPower p) { return -p.kw; }

/// Utility ceiling that makes the unpenalized best response at the forecast
/// price equal the desired power: u_max = lambda~ * K * x_pr * e^(1/K).
double derive_u_max(double forecast_price, double k_sensitivity, double desired_power);

/// Parse and fully validate a scenario document (strict JSON; unknown keys
/// are errors). Populates u_max for every LAC that omits it. Throws
/// ScenarioError with a field path on any violation, including infeasible
/// slots.
Scenario load_scenario(const std::string& json_text);
Scenario load_scenario_file(const std::string& path);

/// Serialize in the same schema accepted by load_scenario. Round-trips to an
/// identical Scenario.
std::string save_scenario(const Scenario& s);
void save_scenario_file(const Scenario& s, const std::string& path);

/// True iff the aggregate demand interval [sum m_r, sum M_r] intersects the
/// aggregate supply interval [sum c_min, sum c_max] in slot t. Pure predicate.
bool validate_feasibility(const Scenario& s, std::size_t t);

/// Check every invariant; throws ScenarioError with a field path.
void validate_scenario(const Scenario& s);

const std::string& generator_id(const GeneratorSpec& g);

}  // namespace mla
