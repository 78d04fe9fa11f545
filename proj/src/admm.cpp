#include "mla/admm.hpp"

#include <cmath>

#include "mla/agents.hpp"
#include "mla/errors.hpp"

namespace mla {

ResidualNorms compute_residuals(const IterationState& prev, std::span<const double> next_powers,
                                double next_mean) {
  const std::size_t n = prev.powers.size();
  if (next_powers.size() != n) {
    throw std::invalid_argument("compute_residuals: agent count mismatch");
  }
  const double root_n = std::sqrt(static_cast<double>(n));
  const double primal = root_n * std::abs(next_mean);

  const double dmean = next_mean - prev.mean_power;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double si = (next_powers[i] - prev.powers[i]) - dmean;
    sum_sq += si * si;
  }
  return {primal, prev.rho * std::sqrt(sum_sq)};
}

StoppingThresholds stopping_thresholds(std::size_t n_agents, std::span<const double> powers,
                                       double lambda, const SolverOptions& options) {
  const double root_n = std::sqrt(static_cast<double>(n_agents));
  double max_abs = 0.0;
  for (double p : powers) max_abs = std::max(max_abs, std::abs(p));
  const double eps_pri = root_n * options.eps_abs + options.eps_rel * max_abs;
  const double eps_dual = root_n * options.eps_abs +
                          options.eps_rel * static_cast<double>(n_agents) * std::abs(lambda);
  return {eps_pri, eps_dual};
}

double update_rho(double rho, double primal_norm, double dual_norm) {
  if (primal_norm > 10.0 * dual_norm) return 2.0 * rho;
  if (primal_norm < dual_norm / 10.0) return rho / 2.0;
  return rho;
}

double initial_price(const Scenario& s, std::size_t t) {
  for (const auto& g : s.generators) {
    if (const auto* grid = std::get_if<GridSpec>(&g)) return grid->tariff[t];
  }
  double sum = 0.0;
  for (const auto& lac : s.lacs) sum += lac.forecast_price[t];
  return sum / static_cast<double>(s.lacs.size());
}

double initial_rho_per_kw(const SolverOptions& options) {
  return options.rho_initial * 1e-3;
}

LocalResponseSource::LocalResponseSource(const Scenario& s)
    : scenario_(s), order_(agent_order(s)), previous_(order_.size(), 0.0) {}

void LocalResponseSource::begin_slot(std::size_t slot) {
  (void)slot;
  previous_.assign(order_.size(), 0.0);
}

std::vector<double> LocalResponseSource::iterate(std::size_t slot, std::size_t iter, double lambda,
                                                 double rho, double mean_power) {
  (void)iter;
  std::vector<double> out(order_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) {
    const double anchor = previous_[i] - mean_power;
    out[i] = best_response(scenario_, order_[i], BestResponseInput(lambda, rho, anchor, slot)).kw;
    previous_[i] = out[i];
  }
  return out;
}

SlotResult solve_slot(const Scenario& s, std::size_t t, const SolverOptions& options,
                      ResponseSource& source) {
  if (t >= s.time_grid.slot_count) throw std::out_of_range("solve_slot: slot index out of range");
  if (!validate_feasibility(s, t)) {
    throw ScenarioError("slot " + std::to_string(t) + ": infeasible, cannot clear");
  }
  const std::size_t n = s.lacs.size() + s.generators.size();

  IterationState state;
  state.iter = 0;
  state.lambda = initial_price(s, t);
  state.rho = initial_rho_per_kw(options);
  state.powers.assign(n, 0.0);
  state.mean_power = 0.0;

  SlotResult result;
  result.residual_trace.reserve(options.max_iterations);
  source.begin_slot(t);

  for (std::size_t k = 0; k < options.max_iterations; ++k) {
    std::vector<double> next = source.iterate(t, k, state.lambda, state.rho, state.mean_power);
    if (next.size() != n) throw ProtocolError("response count mismatch");

    double sum = 0.0;
    for (double p : next) sum += p;  // fixed agent order
    const double next_mean = sum / static_cast<double>(n);

    const ResidualNorms norms = compute_residuals(state, next, next_mean);

    // Excess injection lowers the price under the producers-positive
    // convention.
    const double next_lambda = state.lambda - state.rho * next_mean;

    const StoppingThresholds thr = stopping_thresholds(n, next, next_lambda, options);
    result.residual_trace.push_back({norms.primal, norms.dual, next_lambda, state.rho});

    // Besides the residual tests, require the reported allocation itself to
    // balance within eps_pri.
    const bool converged = norms.primal < thr.eps_pri && norms.dual < thr.eps_dual &&
                           std::abs(sum) <= thr.eps_pri;

    state.iter = k + 1;
    state.powers = std::move(next);
    state.mean_power = next_mean;
    state.lambda = next_lambda;
    state.primal_residual_norm = norms.primal;
    state.dual_residual_norm = norms.dual;
    state.rho = update_rho(state.rho, norms.primal, norms.dual);

    if (converged) {
      result.converged = true;
      break;
    }
  }

  result.clearing_price = state.lambda;
  result.allocation = state.powers;
  result.iterations = state.iter;
  source.slot_done(t, result);
  return result;
}

SlotResult solve_slot(const Scenario& s, std::size_t t, const SolverOptions& options) {
  LocalResponseSource source(s);
  return solve_slot(s, t, options, source);
}

HorizonResult solve_horizon(const Scenario& s, const SolverOptions& options,
                            ResponseSource& source) {
  const std::size_t slots = s.time_grid.slot_count;
  const std::size_t n_lacs = s.lacs.size();
  const std::size_t n_gens = s.generators.size();

  HorizonResult out;
  out.slots.reserve(slots);
  out.lac_consumption.assign(n_lacs, std::vector<double>(slots, 0.0));
  out.generator_injection.assign(n_gens, std::vector<double>(slots, 0.0));

  for (std::size_t t = 0; t < slots; ++t) {
    SlotResult slot = solve_slot(s, t, options, source);
    for (std::size_t r = 0; r < n_lacs; ++r) out.lac_consumption[r][t] = -slot.allocation[r];
    for (std::size_t l = 0; l < n_gens; ++l) {
      out.generator_injection[l][t] = slot.allocation[n_lacs + l];
    }
    out.slots.push_back(std::move(slot));
  }
  return out;
}

HorizonResult solve_horizon(const Scenario& s, const SolverOptions& options) {
  LocalResponseSource source(s);
  return solve_horizon(s, options, source);
}

}  // namespace mla
