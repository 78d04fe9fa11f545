#include "mla/agents.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mla/errors.hpp"

namespace mla {

namespace {

constexpr double kKwPerMw = 1000.0;

// kW-converted quadratic coefficient: cost slope 2*alpha*c[MW] + beta in
// cent/kWh becomes 2*(alpha/1000)*c[kW] + beta.
double alpha_kw(const TppSpec& tpp) { return tpp.alpha / kKwPerMw; }

double clip(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

void check_box(double c, double lo, double hi, const char* who) {
  const double slack = 1e-9 * std::max(1.0, std::abs(hi));
  if (c < lo - slack || c > hi + slack) {
    throw std::out_of_range(std::string(who) + ": output " + std::to_string(c) +
                            " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
}

}  // namespace

BestResponseInput::BestResponseInput(double lambda_, double rho_, double anchor_kw_, std::size_t slot_)
    : lambda(lambda_), rho(rho_), anchor_kw(anchor_kw_), slot(slot_) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw std::invalid_argument("BestResponseInput: rho must be > 0");
  }
  if (!std::isfinite(lambda) || !std::isfinite(anchor_kw)) {
    throw std::invalid_argument("BestResponseInput: non-finite lambda or anchor");
  }
}

double lac_utility(double x_kw, double u_max, double k_sensitivity, double x_pr_kw) {
  if (!(x_pr_kw > 0.0)) throw std::domain_error("lac_utility: desired power must be > 0");
  return u_max * -std::expm1(-x_kw / (k_sensitivity * x_pr_kw));
}

double lac_marginal_utility(double x_kw, double u_max, double k_sensitivity, double x_pr_kw) {
  if (!(x_pr_kw > 0.0)) throw std::domain_error("lac_marginal_utility: desired power must be > 0");
  const double kx = k_sensitivity * x_pr_kw;
  return u_max / kx * std::exp(-x_kw / kx);
}

double calibrate_umax(double forecast_price, double k_sensitivity, double x_pr_kw) {
  return derive_u_max(forecast_price, k_sensitivity, x_pr_kw);
}

double lac_demand_at_price(double lambda, double forecast_price, double k_sensitivity,
                           double x_pr_kw, double min_kw, double max_kw) {
  if (!(lambda > 0.0)) throw std::domain_error("lac_demand_at_price: lambda must be > 0");
  const double unclipped = x_pr_kw * (1.0 + k_sensitivity * std::log(forecast_price / lambda));
  return clip(unclipped, min_kw, max_kw);
}

double production_cost(const GeneratorSpec& g, double c_kw, std::size_t t, double slot_hours) {
  if (const auto* tpp = std::get_if<TppSpec>(&g)) {
    check_box(c_kw, tpp->min_gen[t], tpp->max_gen[t], "production_cost(tpp)");
    const double c_mw = c_kw / kKwPerMw;
    return tpp->alpha * c_mw * c_mw + tpp->beta * c_mw + tpp->gamma;
  }
  if (const auto* pv = std::get_if<PvSpec>(&g)) {
    check_box(c_kw, 0.0, pv->availability[t], "production_cost(pv)");
    return 0.0;
  }
  const auto& grid = std::get<GridSpec>(g);
  check_box(c_kw, 0.0, grid.max_draw[t], "production_cost(grid)");
  return grid.tariff[t] * c_kw * slot_hours;
}

double tpp_marginal_cost(const TppSpec& tpp, double c_kw) {
  return 2.0 * alpha_kw(tpp) * c_kw + tpp.beta;
}

NetPower best_response(const TppSpec& tpp, const BestResponseInput& in) {
  const std::size_t t = in.slot;
  const double c = (in.lambda - tpp.beta + in.rho * in.anchor_kw) / (2.0 * alpha_kw(tpp) + in.rho);
  return NetPower{clip(c, tpp.min_gen[t], tpp.max_gen[t])};
}

NetPower best_response(const PvSpec& pv, const BestResponseInput& in) {
  return NetPower{clip(in.anchor_kw + in.lambda / in.rho, 0.0, pv.availability[in.slot])};
}

NetPower best_response(const GridSpec& grid, const BestResponseInput& in) {
  const std::size_t t = in.slot;
  const double c = in.anchor_kw + (in.lambda - grid.tariff[t]) / in.rho;
  return NetPower{clip(c, 0.0, grid.max_draw[t])};
}

NetPower best_response(const LacSpec& lac, const BestResponseInput& in) {
  const std::size_t t = in.slot;
  const double m = lac.min_power[t];
  const double big_m = lac.max_power[t];
  const double x_anchor = -in.anchor_kw;  // consumption-space anchor

  // Stationarity g(x) = U'(x) - lambda - rho (x - x_anchor); g is strictly
  // decreasing, so the boxed maximizer is the safeguarded root.
  const auto g = [&](double x) {
    return lac_marginal_utility(x, lac.u_max[t], lac.k_sensitivity, lac.desired_power[t]) -
           in.lambda - in.rho * (x - x_anchor);
  };

  if (g(m) <= 0.0) return net_from_consumption(m);
  if (g(big_m) >= 0.0) return net_from_consumption(big_m);

  double lo = m, hi = big_m;
  double x = 0.5 * (lo + hi);
  const double step_tol = 1e-10 * std::max(1.0, big_m);
  const double kx = lac.k_sensitivity * lac.desired_power[t];
  for (int iter = 0; iter < 200; ++iter) {
    const double gx = g(x);
    if (gx > 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double dg = -lac_marginal_utility(x, lac.u_max[t], lac.k_sensitivity,
                                            lac.desired_power[t]) / kx - in.rho;
    double next = x - gx / dg;
    if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);  // bisection fallback
    const double step = std::abs(next - x);
    x = next;
    if (step < step_tol) return net_from_consumption(x);
  }
  throw SolverError("lac best response: no convergence within 200 iterations");
}

std::vector<AgentRef> agent_order(const Scenario& s) {
  std::vector<AgentRef> order;
  order.reserve(s.lacs.size() + s.generators.size());
  for (std::size_t r = 0; r < s.lacs.size(); ++r) order.push_back({AgentKind::lac, r});
  for (std::size_t l = 0; l < s.generators.size(); ++l) {
    const auto& g = s.generators[l];
    AgentKind kind = AgentKind::grid;
    if (std::holds_alternative<TppSpec>(g)) kind = AgentKind::tpp;
    else if (std::holds_alternative<PvSpec>(g)) kind = AgentKind::pv;
    order.push_back({kind, l});
  }
  return order;
}

const std::string& agent_id(const Scenario& s, const AgentRef& a) {
  if (a.kind == AgentKind::lac) return s.lacs[a.index].id;
  return generator_id(s.generators[a.index]);
}

AgentKind agent_kind(const Scenario& s, const AgentRef& a) {
  (void)s;
  return a.kind;
}

Box agent_box(const Scenario& s, const AgentRef& a, std::size_t t) {
  switch (a.kind) {
    case AgentKind::lac: {
      const auto& lac = s.lacs[a.index];
      return {-lac.max_power[t], -lac.min_power[t]};
    }
    case AgentKind::tpp: {
      const auto& tpp = std::get<TppSpec>(s.generators[a.index]);
      return {tpp.min_gen[t], tpp.max_gen[t]};
    }
    case AgentKind::pv: {
      const auto& pv = std::get<PvSpec>(s.generators[a.index]);
      return {0.0, pv.availability[t]};
    }
    case AgentKind::grid: {
      const auto& grid = std::get<GridSpec>(s.generators[a.index]);
      return {0.0, grid.max_draw[t]};
    }
  }
  throw std::logic_error("agent_box: bad kind");
}

NetPower best_response(const Scenario& s, const AgentRef& a, const BestResponseInput& in) {
  switch (a.kind) {
    case AgentKind::lac:
      return best_response(s.lacs[a.index], in);
    case AgentKind::tpp:
      return best_response(std::get<TppSpec>(s.generators[a.index]), in);
    case AgentKind::pv:
      return best_response(std::get<PvSpec>(s.generators[a.index]), in);
    case AgentKind::grid:
      return best_response(std::get<GridSpec>(s.generators[a.index]), in);
  }
  throw std::logic_error("best_response: bad kind");
}

double agent_objective(const Scenario& s, const AgentRef& a, std::size_t t, double net_kw) {
  switch (a.kind) {
    case AgentKind::lac: {
      const auto& lac = s.lacs[a.index];
      return lac_utility(-net_kw, lac.u_max[t], lac.k_sensitivity, lac.desired_power[t]);
    }
    case AgentKind::tpp: {
      const auto& tpp = std::get<TppSpec>(s.generators[a.index]);
      return -(alpha_kw(tpp) * net_kw * net_kw + tpp.beta * net_kw + tpp.gamma);
    }
    case AgentKind::pv:
      return 0.0;
    case AgentKind::grid: {
      const auto& grid = std::get<GridSpec>(s.generators[a.index]);
      return -grid.tariff[t] * net_kw;
    }
  }
  throw std::logic_error("agent_objective: bad kind");
}

double agent_objective_gradient(const Scenario& s, const AgentRef& a, std::size_t t, double net_kw) {
  switch (a.kind) {
    case AgentKind::lac: {
      const auto& lac = s.lacs[a.index];
      // f(p) = U(-p), so df/dp = -U'(x) at consumption x = -p
      return -lac_marginal_utility(-net_kw, lac.u_max[t], lac.k_sensitivity, lac.desired_power[t]);
    }
    case AgentKind::tpp: {
      const auto& tpp = std::get<TppSpec>(s.generators[a.index]);
      return -tpp_marginal_cost(tpp, net_kw);
    }
    case AgentKind::pv:
      return 0.0;
    case AgentKind::grid: {
      const auto& grid = std::get<GridSpec>(s.generators[a.index]);
      return -grid.tariff[t];
    }
  }
  throw std::logic_error("agent_objective_gradient: bad kind");
}

}  // namespace mla
