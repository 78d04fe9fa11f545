#pragma once

#include <cstddef>
#include <vector>

#include "mla/model.hpp"

// Per-agent economics: utility/cost evaluation, demand calibration, and the
// penalized best response solved each coordinator iteration.
//
// The subproblem is  max_p  f_i(p) + lambda * p - (rho/2) (p - anchor)^2
// over the agent's feasible net-injection box, where f_i is U_r(-p) for a
// consumer and -C_l(p) for a generator. TPP/PV/GRID admit closed forms; the
// consumer case is a smooth monotone 1-D root find.

namespace mla {

struct BestResponseInput {
  // rho = 0 is rejected here: linear-objective agents would have set-valued
  // responses without the proximal term.
  BestResponseInput(double lambda, double rho, double anchor_kw, std::size_t slot);

  double lambda;     // cent/kWh
  double rho;        // cent/kWh per kW, > 0
  double anchor_kw;  // v_i = p_i^k - pbar^k
  std::size_t slot;
};

/// U(x) = u_max * (1 - e^(-x / (K * x_pr))).
double lac_utility(double x_kw, double u_max, double k_sensitivity, double x_pr_kw);

/// U'(x), cent/kWh.
double lac_marginal_utility(double x_kw, double u_max, double k_sensitivity, double x_pr_kw);

/// u_max making the unpenalized best response at the forecast price equal
/// x_pr (same formula as derive_u_max; kept as the calibration entry point).
double calibrate_umax(double forecast_price, double k_sensitivity, double x_pr_kw);

/// Unpenalized demand: clip(x_pr * (1 + K * ln(forecast/lambda)), min, max).
double lac_demand_at_price(double lambda, double forecast_price, double k_sensitivity,
                           double x_pr_kw, double min_kw, double max_kw);

/// Reported production cost for one slot, cent. The TPP polynomial is
/// MW-denominated as specced in the scenario file; the grid cost is
/// tariff * energy drawn over the slot.
double production_cost(const GeneratorSpec& g, double c_kw, std::size_t t, double slot_hours);

/// dC/dc in cent/kWh at output c (kW-converted coefficients).
double tpp_marginal_cost(const TppSpec& tpp, double c_kw);

NetPower best_response(const LacSpec& lac, const BestResponseInput& in);
NetPower best_response(const TppSpec& tpp, const BestResponseInput& in);
NetPower best_response(const PvSpec& pv, const BestResponseInput& in);
NetPower best_response(const GridSpec& grid, const BestResponseInput& in);

// --- flattened agent view (consumers first, then generators, in file order) ---

enum class AgentKind { lac, tpp, pv, grid };

struct AgentRef {
  AgentKind kind;
  std::size_t index;  // into Scenario::lacs or Scenario::generators
};

struct Box {
  double lo = 0.0;
  double hi = 0.0;
};

std::vector<AgentRef> agent_order(const Scenario& s);
const std::string& agent_id(const Scenario& s, const AgentRef& a);
AgentKind agent_kind(const Scenario& s, const AgentRef& a);

/// Feasible net-injection interval of the agent in slot t.
Box agent_box(const Scenario& s, const AgentRef& a, std::size_t t);

NetPower best_response(const Scenario& s, const AgentRef& a, const BestResponseInput& in);

/// f_i(p) in working units (consumer utility, negated generator cost with
/// kW-converted TPP coefficients). Summing over agents gives the welfare of
/// an allocation.
double agent_objective(const Scenario& s, const AgentRef& a, std::size_t t, double net_kw);

/// d f_i / dp at net injection p, cent/kWh.
double agent_objective_gradient(const Scenario& s, const AgentRef& a, std::size_t t, double net_kw);

}  // namespace mla
