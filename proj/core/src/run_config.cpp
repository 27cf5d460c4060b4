#include "elmopp/run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "elmopp/csv.hpp"

namespace elmopp {

namespace {

std::string bool_text(bool v) { return v ? "true" : "false"; }

bool parse_bool(std::string_view s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument("expected true or false");
}

std::size_t parse_size(std::string_view s) {
  const long long v = parse_int(s);
  if (v < 0) throw std::invalid_argument("must be non-negative");
  return static_cast<std::size_t>(v);
}

std::uint64_t parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) throw std::invalid_argument("expected unsigned integer");
  return v;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += items[i];
  }
  return out;
}

using Setter = std::function<void(RunConfig&, std::string_view)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct Field {
  const char* section;
  const char* key;
  Setter set;
  Getter get;
};

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"run", "seed", [](RunConfig& c, std::string_view v) { c.seed = parse_u64(v); },
       [](const RunConfig& c) { return std::to_string(c.seed); }},

      {"sim", "n_steps", [](RunConfig& c, std::string_view v) { c.sim.n_steps = parse_size(v); },
       [](const RunConfig& c) { return std::to_string(c.sim.n_steps); }},
      {"sim", "dt", [](RunConfig& c, std::string_view v) { c.sim.dt = parse_double(v); },
       [](const RunConfig& c) { return format_double(c.sim.dt); }},
      {"sim", "inroad_capacity",
       [](RunConfig& c, std::string_view v) { c.sim.inroad_capacity = parse_double(v); },
       [](const RunConfig& c) { return format_double(c.sim.inroad_capacity); }},
      {"sim", "lane_split",
       [](RunConfig& c, std::string_view v) {
         const auto items = split_list(v);
         if (items.size() != kLaneGroups) throw std::invalid_argument("expected three values");
         for (std::size_t k = 0; k < kLaneGroups; ++k) c.sim.lane_split[k] = parse_double(items[k]);
       },
       [](const RunConfig& c) {
         std::vector<std::string> items;
         for (double r : c.sim.lane_split) items.push_back(format_double(r));
         return join(items);
       }},
      {"sim", "jam_density", [](RunConfig& c, std::string_view v) { c.sim.jam_density = parse_double(v); },
       [](const RunConfig& c) { return format_double(c.sim.jam_density); }},
      {"sim", "free_flow_speed",
       [](RunConfig& c, std::string_view v) { c.sim.free_flow_speed = parse_double(v); },
       [](const RunConfig& c) { return format_double(c.sim.free_flow_speed); }},
      {"sim", "startup_delay",
       [](RunConfig& c, std::string_view v) { c.sim.startup_delay = parse_double(v); },
       [](const RunConfig& c) { return format_double(c.sim.startup_delay); }},
      {"sim", "initial_load", [](RunConfig& c, std::string_view v) { c.sim.initial_load = parse_double(v); },
       [](const RunConfig& c) { return format_double(c.sim.initial_load); }},
      {"sim", "t_min",
       [](RunConfig& c, std::string_view v) { c.sim.timing.t_min = static_cast<int>(parse_int(v)); },
       [](const RunConfig& c) { return std::to_string(c.sim.timing.t_min); }},
      {"sim", "t_max",
       [](RunConfig& c, std::string_view v) { c.sim.timing.t_max = static_cast<int>(parse_int(v)); },
       [](const RunConfig& c) { return std::to_string(c.sim.timing.t_max); }},

      {"controller", "kind",
       [](RunConfig& c, std::string_view v) {
         const auto k = parse_controller(v);
         if (!k) throw std::invalid_argument("unknown controller");
         c.controller.kind = *k;
       },
       [](const RunConfig& c) { return std::string(controller_name(c.controller.kind)); }},
      {"controller", "clamp_timing",
       [](RunConfig& c, std::string_view v) { c.controller.clamp_timing = parse_bool(v); },
       [](const RunConfig& c) { return bool_text(c.controller.clamp_timing); }},
      {"controller", "fixed_green",
       [](RunConfig& c, std::string_view v) { c.controller.fixed_green = parse_double(v); },
       [](const RunConfig& c) { return format_double(c.controller.fixed_green); }},
      {"controller", "online_learning",
       [](RunConfig& c, std::string_view v) { c.controller.online_learning = parse_bool(v); },
       [](const RunConfig& c) { return bool_text(c.controller.online_learning); }},

      {"predictor", "depth", [](RunConfig& c, std::string_view v) { c.predictor.depth = parse_size(v); },
       [](const RunConfig& c) { return std::to_string(c.predictor.depth); }},
      {"predictor", "units", [](RunConfig& c, std::string_view v) { c.predictor.units = parse_size(v); },
       [](const RunConfig& c) { return std::to_string(c.predictor.units); }},
      {"predictor", "epochs", [](RunConfig& c, std::string_view v) { c.predictor.epochs = parse_size(v); },
       [](const RunConfig& c) { return std::to_string(c.predictor.epochs); }},
      {"predictor", "batch_size",
       [](RunConfig& c, std::string_view v) { c.predictor.batch_size = parse_size(v); },
       [](const RunConfig& c) { return std::to_string(c.predictor.batch_size); }},
      {"predictor", "train_fraction",
       [](RunConfig& c, std::string_view v) { c.predictor.train_fraction = parse_double(v); },
       [](const RunConfig& c) { return format_double(c.predictor.train_fraction); }},
      {"predictor", "learning_rate",
       [](RunConfig& c, std::string_view v) { c.predictor.adam.learning_rate = parse_double(v); },
       [](const RunConfig& c) { return format_double(c.predictor.adam.learning_rate); }},
      {"predictor", "beta1", [](RunConfig& c, std::string_view v) { c.predictor.adam.beta1 = parse_double(v); },
       [](const RunConfig& c) { return format_double(c.predictor.adam.beta1); }},
      {"predictor", "beta2", [](RunConfig& c, std::string_view v) { c.predictor.adam.beta2 = parse_double(v); },
       [](const RunConfig& c) { return format_double(c.predictor.adam.beta2); }},
      {"predictor", "epsilon",
       [](RunConfig& c, std::string_view v) { c.predictor.adam.epsilon = parse_double(v); },
       [](const RunConfig& c) { return format_double(c.predictor.adam.epsilon); }},

      {"inflow", "total", [](RunConfig& c, std::string_view v) { c.inflow.total = parse_double(v); },
       [](const RunConfig& c) { return format_double(c.inflow.total); }},
      {"inflow", "budget_scope",
       [](RunConfig& c, std::string_view v) {
         if (v == "per-inroad") {
           c.inflow.scope = BudgetScope::PerInroad;
         } else if (v == "network") {
           c.inflow.scope = BudgetScope::Network;
         } else {
           throw std::invalid_argument("expected per-inroad or network");
         }
       },
       [](const RunConfig& c) { return std::string(budget_scope_name(c.inflow.scope)); }},
      {"inflow", "series_points",
       [](RunConfig& c, std::string_view v) { c.inflow.series_points = parse_size(v); },
       [](const RunConfig& c) { return std::to_string(c.inflow.series_points); }},

      {"sweep", "totals",
       [](RunConfig& c, std::string_view v) {
         c.sweep.totals.clear();
         for (const auto& item : split_list(v)) c.sweep.totals.push_back(parse_double(item));
       },
       [](const RunConfig& c) {
         std::vector<std::string> items;
         for (double t : c.sweep.totals) items.push_back(format_double(t));
         return join(items);
       }},
      {"sweep", "trials", [](RunConfig& c, std::string_view v) { c.sweep.trials = parse_size(v); },
       [](const RunConfig& c) { return std::to_string(c.sweep.trials); }},
      {"sweep", "controllers",
       [](RunConfig& c, std::string_view v) {
         c.sweep.controllers.clear();
         for (const auto& item : split_list(v)) {
           const auto k = parse_controller(item);
           if (!k) throw std::invalid_argument("unknown controller '" + item + "'");
           c.sweep.controllers.push_back(*k);
         }
       },
       [](const RunConfig& c) {
         std::vector<std::string> items;
         for (auto k : c.sweep.controllers) items.emplace_back(controller_name(k));
         return join(items);
       }},
      {"sweep", "threads", [](RunConfig& c, std::string_view v) { c.sweep.threads = parse_size(v); },
       [](const RunConfig& c) { return std::to_string(c.sweep.threads); }},
      {"sweep", "alpha", [](RunConfig& c, std::string_view v) { c.sweep.alpha = parse_double(v); },
       [](const RunConfig& c) { return format_double(c.sweep.alpha); }},
  };
  return table;
}

const char* const kSections[] = {"run", "sim", "controller", "predictor", "inflow", "sweep"};

void require(bool ok, const char* key) {
  if (!ok) throw std::invalid_argument(std::string("invalid value for '") + key + "'");
}

}  // namespace

std::string_view budget_scope_name(BudgetScope scope) {
  return scope == BudgetScope::PerInroad ? "per-inroad" : "network";
}

void RunConfig::validate() const {
  require(sim.n_steps >= 1, "sim.n_steps");
  require(sim.dt > 0.0, "sim.dt");
  require(sim.inroad_capacity > 0.0, "sim.inroad_capacity");
  double split = 0.0;
  for (double r : sim.lane_split) {
    require(r >= 0.0, "sim.lane_split");
    split += r;
  }
  require(std::abs(split - 1.0) < 1e-9, "sim.lane_split");
  require(sim.jam_density > 0.0, "sim.jam_density");
  require(sim.free_flow_speed >= 0.0, "sim.free_flow_speed");
  require(sim.startup_delay >= 0.0, "sim.startup_delay");
  require(sim.initial_load >= 0.0 && sim.initial_load <= sim.inroad_capacity, "sim.initial_load");
  require(sim.timing.t_min > 0, "sim.t_min");
  require(sim.timing.t_max > sim.timing.t_min, "sim.t_min/sim.t_max (t_min must be below t_max)");
  require(controller.fixed_green > 0.0, "controller.fixed_green");
  require(predictor.depth >= 1, "predictor.depth");
  require(predictor.units >= 1, "predictor.units");
  require(predictor.batch_size >= 1, "predictor.batch_size");
  require(predictor.train_fraction > 0.0 && predictor.train_fraction < 1.0, "predictor.train_fraction");
  require(predictor.adam.learning_rate > 0.0, "predictor.learning_rate");
  require(predictor.adam.beta1 >= 0.0 && predictor.adam.beta1 < 1.0, "predictor.beta1");
  require(predictor.adam.beta2 >= 0.0 && predictor.adam.beta2 < 1.0, "predictor.beta2");
  require(predictor.adam.epsilon > 0.0, "predictor.epsilon");
  require(inflow.total >= 0.0, "inflow.total");
  const auto n_train = static_cast<std::size_t>(predictor.train_fraction * static_cast<double>(inflow.series_points));
  require(n_train >= 2 && inflow.series_points >= n_train + sim.n_steps, "inflow.series_points");
  for (double t : sweep.totals) require(t >= 0.0, "sweep.totals");
  require(!sweep.totals.empty(), "sweep.totals");
  require(sweep.trials >= 1, "sweep.trials");
  require(!sweep.controllers.empty(), "sweep.controllers");
  require(sweep.threads >= 1, "sweep.threads");
  require(sweep.alpha > 0.0 && sweep.alpha < 0.5, "sweep.alpha");
}

RunConfig parse_run_config(const KvDocument& doc) {
  RunConfig cfg;
  for (const auto& section : doc.sections) {
    bool known = false;
    for (const char* s : kSections) known = known || section.name == s;
    if (!known) throw std::invalid_argument("unknown config section '" + section.name + "'");
    for (const auto& [key, value] : section.entries) {
      const std::string name = section.name + "." + key;
      const Field* field = nullptr;
      for (const auto& f : fields()) {
        if (section.name == f.section && key == f.key) field = &f;
      }
      if (!field) throw std::invalid_argument("unknown config key '" + name + "'");
      try {
        field->set(cfg, value);
      } catch (const std::exception& e) {
        throw std::invalid_argument("bad value for '" + name + "': " + e.what());
      }
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig parse_run_config_string(std::string_view text) { return parse_run_config(parse_kv_string(text)); }

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  return parse_run_config(parse_kv(in));
}

KvDocument run_config_to_kv(const RunConfig& cfg) {
  KvDocument doc;
  for (const char* s : kSections) {
    auto& section = doc.add(s);
    for (const auto& f : fields()) {
      if (std::string_view(f.section) == s) section.set(f.key, f.get(cfg));
    }
  }
  return doc;
}

std::string serialize_run_config(const RunConfig& cfg) { return write_kv_string(run_config_to_kv(cfg)); }

}  // namespace elmopp
