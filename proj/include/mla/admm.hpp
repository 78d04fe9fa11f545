#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mla/agents.hpp"
#include "mla/model.hpp"

// Per-slot exchange coordinator: agents best-respond to a broadcast price
// with a proximal anchor at (own previous power - mean power), the price
// moves against the aggregate imbalance, and the loop stops when primal and
// dual residual norms pass the absolute/relative thresholds. Slots decouple
// and are solved independently.

namespace mla {

struct IterationState {
  std::size_t iter = 0;
  double lambda = 0.0;  // single multiplier per slot (all N copies are equal)
  double rho = 0.0;     // cent/kWh per kW
  std::vector<double> powers;  // p_i, kW, fixed agent order
  double mean_power = 0.0;
  double primal_residual_norm = 0.0;
  double dual_residual_norm = 0.0;
};

struct TracePoint {
  double primal_norm = 0.0;
  double dual_norm = 0.0;
  double lambda = 0.0;  // post-update price for this iteration
  double rho = 0.0;     // penalty used during this iteration
};

struct SlotResult {
  double clearing_price = 0.0;
  std::vector<double> allocation;  // net injections, fixed agent order
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<TracePoint> residual_trace;
};

struct HorizonResult {
  std::vector<SlotResult> slots;
  std::vector<std::vector<double>> lac_consumption;      // [lac][slot], kW, positive
  std::vector<std::vector<double>> generator_injection;  // [generator][slot], kW
};

struct ResidualNorms {
  double primal = 0.0;
  double dual = 0.0;
};

/// ||r||_2 = sqrt(N) * |mean(p^{k+1})| and
/// ||s||_2 = rho^k * ||(dp_i - d mean)_i||_2, taking rho^k, p^k and mean^k
/// from `prev`.
ResidualNorms compute_residuals(const IterationState& prev, std::span<const double> next_powers,
                                double next_mean);

struct StoppingThresholds {
  double eps_pri = 0.0;
  double eps_dual = 0.0;
};

/// eps_pri = sqrt(N) eps_abs + eps_rel max_i |p_i|,
/// eps_dual = sqrt(N) eps_abs + eps_rel N |lambda|.
StoppingThresholds stopping_thresholds(std::size_t n_agents, std::span<const double> powers,
                                       double lambda, const SolverOptions& options);

/// 2*rho when the primal residual dominates tenfold, rho/2 in the mirrored
/// case, rho otherwise (strict inequalities).
double update_rho(double rho, double primal_norm, double dual_norm);

/// Price seed for a slot: first grid tariff when a grid is present, else the
/// mean consumer forecast price.
double initial_price(const Scenario& s, std::size_t t);

/// The penalty seed in the options is MW-denominated; internal arithmetic is
/// per kW.
double initial_rho_per_kw(const SolverOptions& options);

/// Supplies one round of agent responses per iteration. Implementations own
/// each agent's previous power and derive the proximal anchor as
/// (own previous power - mean_power); `powers` must come back in fixed agent
/// order.
class ResponseSource {
 public:
  virtual ~ResponseSource() = default;

  virtual void begin_slot(std::size_t slot) = 0;
  virtual std::vector<double> iterate(std::size_t slot, std::size_t iter, double lambda,
                                      double rho, double mean_power) = 0;
  virtual void slot_done(std::size_t slot, const SlotResult& result) { (void)slot; (void)result; }
};

/// In-process source calling best_response directly.
class LocalResponseSource : public ResponseSource {
 public:
  explicit LocalResponseSource(const Scenario& s);

  void begin_slot(std::size_t slot) override;
  std::vector<double> iterate(std::size_t slot, std::size_t iter, double lambda, double rho,
                              double mean_power) override;

 private:
  const Scenario& scenario_;
  std::vector<AgentRef> order_;
  std::vector<double> previous_;
};

SlotResult solve_slot(const Scenario& s, std::size_t t, const SolverOptions& options);
SlotResult solve_slot(const Scenario& s, std::size_t t, const SolverOptions& options,
                      ResponseSource& source);

HorizonResult solve_horizon(const Scenario& s, const SolverOptions& options);
HorizonResult solve_horizon(const Scenario& s, const SolverOptions& options, ResponseSource& source);

}  // namespace mla
