#include "mla/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

namespace mla {

using nlohmann::json;

double derive_u_max(double forecast_price, double k_sensitivity, double desired_power) {
  return forecast_price * k_sensitivity * desired_power * std::exp(1.0 / k_sensitivity);
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ScenarioError(path + ": " + what);
}

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& path) {
  for (const auto& item : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(),
                     [&](const char* k) { return item.key() == k; })) {
      fail(path + "." + item.key(), "unknown key");
    }
  }
}

const json& require_key(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing required key");
  return *it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

std::size_t as_count(const json& v, const std::string& path) {
  if (!v.is_number_unsigned()) fail(path, "expected a nonnegative integer");
  return v.get<std::size_t>();
}

std::string as_id(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  std::string id = v.get<std::string>();
  if (id.empty()) fail(path, "identifier must be nonempty");
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
    if (!ok) fail(path, "identifier may contain only [A-Za-z0-9_.-]");
  }
  return id;
}

std::vector<double> as_per_slot(const json& v, std::size_t slots, const std::string& path) {
  if (!v.is_array()) fail(path, "expected a per-slot array");
  if (v.size() != slots) {
    fail(path, "expected " + std::to_string(slots) + " entries, got " + std::to_string(v.size()));
  }
  std::vector<double> out;
  out.reserve(slots);
  for (std::size_t i = 0; i < slots; ++i) {
    out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

LacSpec parse_lac(const json& obj, std::size_t slots, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  reject_unknown_keys(obj,
                      {"id", "desired_power", "min_power", "max_power", "k_sensitivity",
                       "forecast_price", "u_max"},
                      path);
  LacSpec lac;
  lac.id = as_id(require_key(obj, "id", path), path + ".id");
  lac.desired_power = as_per_slot(require_key(obj, "desired_power", path), slots, path + ".desired_power");
  lac.max_power = as_per_slot(require_key(obj, "max_power", path), slots, path + ".max_power");
  lac.k_sensitivity = as_number(require_key(obj, "k_sensitivity", path), path + ".k_sensitivity");
  lac.forecast_price = as_per_slot(require_key(obj, "forecast_price", path), slots, path + ".forecast_price");
  if (obj.contains("min_power")) {
    lac.min_power = as_per_slot(obj["min_power"], slots, path + ".min_power");
  } else {
    lac.min_power.assign(slots, 0.0);  // lower bound defaults to 0 kW
  }
  if (obj.contains("u_max")) {
    lac.u_max = as_per_slot(obj["u_max"], slots, path + ".u_max");
  }
  return lac;
}

GeneratorSpec parse_generator(const json& obj, std::size_t slots, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  const json& kind_v = require_key(obj, "kind", path);
  if (!kind_v.is_string()) fail(path + ".kind", "expected a string");
  const std::string kind = kind_v.get<std::string>();

  if (kind == "tpp") {
    reject_unknown_keys(obj, {"kind", "id", "alpha", "beta", "gamma", "min_gen", "max_gen"}, path);
    TppSpec tpp;
    tpp.id = as_id(require_key(obj, "id", path), path + ".id");
    tpp.alpha = as_number(require_key(obj, "alpha", path), path + ".alpha");
    tpp.beta = as_number(require_key(obj, "beta", path), path + ".beta");
    tpp.gamma = obj.contains("gamma") ? as_number(obj["gamma"], path + ".gamma") : 0.0;
    tpp.min_gen = as_per_slot(require_key(obj, "min_gen", path), slots, path + ".min_gen");
    tpp.max_gen = as_per_slot(require_key(obj, "max_gen", path), slots, path + ".max_gen");
    return tpp;
  }
  if (kind == "pv") {
    reject_unknown_keys(obj, {"kind", "id", "availability"}, path);
    PvSpec pv;
    pv.id = as_id(require_key(obj, "id", path), path + ".id");
    pv.availability = as_per_slot(require_key(obj, "availability", path), slots, path + ".availability");
    return pv;
  }
  if (kind == "grid") {
    reject_unknown_keys(obj, {"kind", "id", "tariff", "max_draw"}, path);
    GridSpec grid;
    grid.id = as_id(require_key(obj, "id", path), path + ".id");
    grid.tariff = as_per_slot(require_key(obj, "tariff", path), slots, path + ".tariff");
    grid.max_draw = as_per_slot(require_key(obj, "max_draw", path), slots, path + ".max_draw");
    return grid;
  }
  fail(path + ".kind", "unknown generator kind '" + kind + "' (expected tpp|pv|grid)");
}

SolverOptions parse_solver(const json& obj, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  reject_unknown_keys(obj, {"rho_initial", "eps_abs", "eps_rel", "max_iterations"}, path);
  SolverOptions opt;
  opt.rho_initial = as_number(require_key(obj, "rho_initial", path), path + ".rho_initial");
  opt.eps_abs = as_number(require_key(obj, "eps_abs", path), path + ".eps_abs");
  opt.eps_rel = as_number(require_key(obj, "eps_rel", path), path + ".eps_rel");
  opt.max_iterations = as_count(require_key(obj, "max_iterations", path), path + ".max_iterations");
  return opt;
}

struct SlotBounds {
  double cmin = 0.0;
  double cmax = 0.0;
};

SlotBounds generator_bounds(const GeneratorSpec& g, std::size_t t) {
  if (const auto* tpp = std::get_if<TppSpec>(&g)) return {tpp->min_gen[t], tpp->max_gen[t]};
  if (const auto* pv = std::get_if<PvSpec>(&g)) return {0.0, pv->availability[t]};
  const auto& grid = std::get<GridSpec>(g);
  return {0.0, grid.max_draw[t]};
}

void check_finite(const std::vector<double>& v, const std::string& path) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) fail(path + "[" + std::to_string(i) + "]", "must be finite");
  }
}

}  // namespace

const std::string& generator_id(const GeneratorSpec& g) {
  return std::visit([](const auto& spec) -> const std::string& { return spec.id; }, g);
}

bool validate_feasibility(const Scenario& s, std::size_t t) {
  double demand_lo = 0.0, demand_hi = 0.0;
  for (const auto& lac : s.lacs) {
    demand_lo += lac.min_power[t];
    demand_hi += lac.max_power[t];
  }
  double supply_lo = 0.0, supply_hi = 0.0;
  for (const auto& g : s.generators) {
    const SlotBounds b = generator_bounds(g, t);
    supply_lo += b.cmin;
    supply_hi += b.cmax;
  }
  return supply_lo <= demand_hi && supply_hi >= demand_lo;
}

void validate_scenario(const Scenario& s) {
  const std::size_t slots = s.time_grid.slot_count;
  if (slots < 1) fail("time_grid.slot_count", "must be >= 1");
  if (!(s.time_grid.slot_duration_hours > 0.0) || !std::isfinite(s.time_grid.slot_duration_hours)) {
    fail("time_grid.slot_duration_hours", "must be > 0");
  }
  if (s.lacs.empty()) fail("lacs", "at least one consumer is required");
  if (s.generators.empty()) fail("generators", "at least one generator is required");

  std::vector<std::string> ids;
  auto check_unique = [&](const std::string& id, const std::string& path) {
    if (std::find(ids.begin(), ids.end(), id) != ids.end()) fail(path, "duplicate agent id '" + id + "'");
    ids.push_back(id);
  };

  for (std::size_t r = 0; r < s.lacs.size(); ++r) {
    const auto& lac = s.lacs[r];
    const std::string path = "lacs[" + std::to_string(r) + "]";
    check_unique(lac.id, path + ".id");
    for (const auto* field : {&lac.desired_power, &lac.min_power, &lac.max_power, &lac.forecast_price}) {
      if (field->size() != slots) fail(path, "per-slot array length mismatch");
    }
    if (lac.u_max.size() != slots) fail(path + ".u_max", "per-slot array length mismatch");
    if (!(lac.k_sensitivity > 0.0) || !std::isfinite(lac.k_sensitivity)) {
      fail(path + ".k_sensitivity", "must be > 0");
    }
    check_finite(lac.desired_power, path + ".desired_power");
    check_finite(lac.min_power, path + ".min_power");
    check_finite(lac.max_power, path + ".max_power");
    check_finite(lac.forecast_price, path + ".forecast_price");
    check_finite(lac.u_max, path + ".u_max");
    for (std::size_t t = 0; t < slots; ++t) {
      const std::string at = "[" + std::to_string(t) + "]";
      if (!(lac.desired_power[t] > 0.0)) fail(path + ".desired_power" + at, "must be > 0");
      if (lac.min_power[t] < 0.0) fail(path + ".min_power" + at, "must be >= 0");
      if (lac.min_power[t] > lac.desired_power[t]) {
        fail(path + ".min_power" + at, "exceeds desired_power");
      }
      if (lac.desired_power[t] > lac.max_power[t]) {
        fail(path + ".max_power" + at, "below desired_power");
      }
      if (!(lac.forecast_price[t] > 0.0)) fail(path + ".forecast_price" + at, "must be > 0");
      if (!(lac.u_max[t] > 0.0)) fail(path + ".u_max" + at, "must be > 0");
    }
  }

  for (std::size_t l = 0; l < s.generators.size(); ++l) {
    const std::string path = "generators[" + std::to_string(l) + "]";
    check_unique(generator_id(s.generators[l]), path + ".id");
    if (const auto* tpp = std::get_if<TppSpec>(&s.generators[l])) {
      if (tpp->min_gen.size() != slots || tpp->max_gen.size() != slots) {
        fail(path, "per-slot array length mismatch");
      }
      if (!(tpp->alpha >= 0.0) || !std::isfinite(tpp->alpha)) fail(path + ".alpha", "must be >= 0");
      if (!std::isfinite(tpp->beta)) fail(path + ".beta", "must be finite");
      if (!std::isfinite(tpp->gamma)) fail(path + ".gamma", "must be finite");
      check_finite(tpp->min_gen, path + ".min_gen");
      check_finite(tpp->max_gen, path + ".max_gen");
      for (std::size_t t = 0; t < slots; ++t) {
        const std::string at = "[" + std::to_string(t) + "]";
        if (tpp->min_gen[t] < 0.0) fail(path + ".min_gen" + at, "must be >= 0");
        if (tpp->min_gen[t] > tpp->max_gen[t]) fail(path + ".min_gen" + at, "exceeds max_gen");
      }
    } else if (const auto* pv = std::get_if<PvSpec>(&s.generators[l])) {
      if (pv->availability.size() != slots) fail(path, "per-slot array length mismatch");
      check_finite(pv->availability, path + ".availability");
      for (std::size_t t = 0; t < slots; ++t) {
        if (pv->availability[t] < 0.0) {
          fail(path + ".availability[" + std::to_string(t) + "]", "must be >= 0");
        }
      }
    } else {
      const auto& grid = std::get<GridSpec>(s.generators[l]);
      if (grid.tariff.size() != slots || grid.max_draw.size() != slots) {
        fail(path, "per-slot array length mismatch");
      }
      check_finite(grid.tariff, path + ".tariff");
      check_finite(grid.max_draw, path + ".max_draw");
      for (std::size_t t = 0; t < slots; ++t) {
        const std::string at = "[" + std::to_string(t) + "]";
        if (!(grid.tariff[t] > 0.0)) fail(path + ".tariff" + at, "must be > 0");
        if (!(grid.max_draw[t] > 0.0)) fail(path + ".max_draw" + at, "must be > 0");
      }
    }
  }

  if (!(s.solver.rho_initial > 0.0)) fail("solver.rho_initial", "must be > 0");
  if (!(s.solver.eps_abs > 0.0)) fail("solver.eps_abs", "must be > 0");
  if (!(s.solver.eps_rel > 0.0)) fail("solver.eps_rel", "must be > 0");
  if (s.solver.max_iterations < 1) fail("solver.max_iterations", "must be >= 1");

  for (std::size_t t = 0; t < slots; ++t) {
    if (!validate_feasibility(s, t)) {
      fail("slot " + std::to_string(t),
           "infeasible: forced minimum supply and demand intervals do not intersect");
    }
  }
}

Scenario load_scenario(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("document: ") + e.what());
  }
  if (!doc.is_object()) fail("document", "expected a JSON object");
  reject_unknown_keys(doc, {"time_grid", "lacs", "generators", "solver"}, "document");

  Scenario s;
  const json& tg = require_key(doc, "time_grid", "document");
  if (!tg.is_object()) fail("time_grid", "expected an object");
  reject_unknown_keys(tg, {"slot_count", "slot_duration_hours"}, "time_grid");
  s.time_grid.slot_count = as_count(require_key(tg, "slot_count", "time_grid"), "time_grid.slot_count");
  s.time_grid.slot_duration_hours =
      as_number(require_key(tg, "slot_duration_hours", "time_grid"), "time_grid.slot_duration_hours");
  if (s.time_grid.slot_count < 1) fail("time_grid.slot_count", "must be >= 1");

  const json& lacs = require_key(doc, "lacs", "document");
  if (!lacs.is_array()) fail("lacs", "expected an array");
  for (std::size_t r = 0; r < lacs.size(); ++r) {
    s.lacs.push_back(parse_lac(lacs[r], s.time_grid.slot_count, "lacs[" + std::to_string(r) + "]"));
  }

  const json& gens = require_key(doc, "generators", "document");
  if (!gens.is_array()) fail("generators", "expected an array");
  for (std::size_t l = 0; l < gens.size(); ++l) {
    s.generators.push_back(
        parse_generator(gens[l], s.time_grid.slot_count, "generators[" + std::to_string(l) + "]"));
  }

  s.solver = parse_solver(require_key(doc, "solver", "document"), "solver");

  // Populate the derived utility ceiling before invariant checks.
  for (auto& lac : s.lacs) {
    if (lac.u_max.empty()) {
      lac.u_max.resize(s.time_grid.slot_count);
      for (std::size_t t = 0; t < s.time_grid.slot_count; ++t) {
        lac.u_max[t] = derive_u_max(lac.forecast_price[t], lac.k_sensitivity, lac.desired_power[t]);
      }
    }
  }

  validate_scenario(s);
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario(buf.str());
}

std::string save_scenario(const Scenario& s) {
  json doc;
  doc["time_grid"] = {{"slot_count", s.time_grid.slot_count},
                      {"slot_duration_hours", s.time_grid.slot_duration_hours}};
  doc["lacs"] = json::array();
  for (const auto& lac : s.lacs) {
    doc["lacs"].push_back({{"id", lac.id},
                           {"desired_power", lac.desired_power},
                           {"min_power", lac.min_power},
                           {"max_power", lac.max_power},
                           {"k_sensitivity", lac.k_sensitivity},
                           {"forecast_price", lac.forecast_price},
                           {"u_max", lac.u_max}});
  }
  doc["generators"] = json::array();
  for (const auto& g : s.generators) {
    if (const auto* tpp = std::get_if<TppSpec>(&g)) {
      doc["generators"].push_back({{"kind", "tpp"},
                                   {"id", tpp->id},
                                   {"alpha", tpp->alpha},
                                   {"beta", tpp->beta},
                                   {"gamma", tpp->gamma},
                                   {"min_gen", tpp->min_gen},
                                   {"max_gen", tpp->max_gen}});
    } else if (const auto* pv = std::get_if<PvSpec>(&g)) {
      doc["generators"].push_back({{"kind", "pv"}, {"id", pv->id}, {"availability", pv->availability}});
    } else {
      const auto& grid = std::get<GridSpec>(g);
      doc["generators"].push_back(
          {{"kind", "grid"}, {"id", grid.id}, {"tariff", grid.tariff}, {"max_draw", grid.max_draw}});
    }
  }
  doc["solver"] = {{"rho_initial", s.solver.rho_initial},
                   {"eps_abs", s.solver.eps_abs},
                   {"eps_rel", s.solver.eps_rel},
                   {"max_iterations", s.solver.max_iterations}};
  return doc.dump(2) + "\n";
}

void save_scenario_file(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ScenarioError("cannot write scenario file '" + path + "'");
  out << save_scenario(s);
}

}  // namespace mla
