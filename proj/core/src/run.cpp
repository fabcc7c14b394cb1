#include "seclat/run.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <ostream>
#include <sstream>

#if defined(SECLAT_VENDORED_JSON)
#include "json.hpp"
#else
#include <nlohmann/json.hpp>
#endif

#include "seclat/rng.hpp"

namespace seclat {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Locale-independent shortest round-trip rendering; CSV cells and row keys
// must be byte-stable across runs.
std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

DelaySpec parse_delay(const json& j) {
  if (!j.is_object() || !j.contains("kind")) {
    throw ConfigError("delay: expected an object with a \"kind\" field");
  }
  const std::string kind = j.at("kind").get<std::string>();
  try {
    if (kind == "deterministic") {
      return DelaySpec::deterministic(j.at("seconds").get<double>());
    }
    if (kind == "exponential") {
      return DelaySpec::exponential(j.at("rate").get<double>());
    }
    if (kind == "erlang") {
      return DelaySpec::erlang(j.at("shape").get<int>(),
                               j.at("rate").get<double>());
    }
    if (kind == "gamma") {
      return DelaySpec::gamma(j.at("shape").get<double>(),
                              j.at("rate").get<double>());
    }
    if (kind == "empirical") {
      return DelaySpec::empirical(
          j.at("samples").get<std::vector<double>>());
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("delay: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("delay: ") + e.what());
  }
  throw ConfigError("delay: unknown kind \"" + kind + "\"");
}

ModelParams parse_params(const json& j) {
  ModelParams p;
  try {
    p.mu_m = j.at("mu_m").get<double>();
    p.alpha = j.at("alpha").get<double>();
    p.k = j.at("k").get<int>();
    p.b0 = j.value("b0", 0);
    p.lambda_h = j.value("lambda_h", 0.0);
    if (j.contains("b")) p.b = j.at("b").get<double>();
    p.delay = parse_delay(j.at("delay"));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("params: ") + e.what());
  }
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return p;
}

ModelParams apply_axis(const ModelParams& base, const std::string& axis,
                       double value) {
  ModelParams p = base;
  if (axis == "k") {
    p.k = static_cast<int>(std::llround(value));
  } else if (axis == "alpha") {
    p.alpha = value;
  } else if (axis == "b0") {
    p.b0 = static_cast<int>(std::llround(value));
  } else if (axis == "lambda_h") {
    p.lambda_h = value;
  } else if (axis == "delay-scale") {
    p.delay = base.delay.scaled(value);
  } else {
    throw ConfigError("unknown sweep axis \"" + axis + "\"");
  }
  p.validate();
  return p;
}

std::string axis_value_label(const SweepAxis& axis, double value) {
  if (axis.name == "k" || axis.name == "b0") {
    return std::to_string(static_cast<long long>(std::llround(value)));
  }
  return fmt(value);
}

struct PointResult {
  double value = 0.0;
  std::optional<BoundReport> bounds;
  std::optional<SimOutcome> sim;
  std::string error;  // non-empty when the point failed
};

PointResult evaluate_point(const RunConfig& cfg, const SweepAxis& axis,
                           size_t index) {
  PointResult res;
  res.value = axis.values[index];
  ModelParams p;
  try {
    p = apply_axis(cfg.base, axis.name, res.value);
  } catch (const std::exception& e) {
    res.error = e.what();
    return res;
  }
  try {
    if (cfg.mode != RunMode::kSimulate) {
      res.bounds = compute_bounds(p, cfg.eps_tail, cfg.eps_residual,
                                  cfg.intermediates);
    }
    if (cfg.mode != RunMode::kBounds) {
      SimConfig sc;
      sc.params = p;
      sc.trials = cfg.trials;
      // Stream seeds are derived per sweep point so points are independent.
      uint64_t mix = cfg.seed ^ (0x632be59bd9b4e019ULL * (index + 1));
      sc.seed = splitmix64(mix);
      sc.premine_cycles = cfg.premine_cycles;
      sc.race_cutoff = std::max(cfg.race_cutoff, p.k);
      sc.threads = cfg.threads;
      res.sim = simulate(sc);
    }
  } catch (const StabilityViolation& e) {
    res.error = e.what();
  } catch (const NonConvergence& e) {
    res.error = e.what();
  }
  return res;
}

void write_csv(const RunConfig& cfg, const SweepAxis& axis,
               const std::vector<PointResult>& results, std::ostream& out) {
  out << axis.name;
  if (cfg.mode != RunMode::kSimulate) {
    out << ",upper,upper_error,lower,lower_error";
  }
  if (cfg.mode != RunMode::kBounds) {
    out << ",sim_frequency,sim_ci_low,sim_ci_high";
  }
  out << "\n";
  for (const auto& r : results) {
    if (!r.error.empty()) continue;
    out << axis_value_label(axis, r.value);
    if (r.bounds) {
      out << ',' << fmt(r.bounds->upper) << ',' << fmt(r.bounds->upper_error)
          << ',' << fmt(r.bounds->lower) << ',' << fmt(r.bounds->lower_error);
    }
    if (r.sim) {
      out << ',' << fmt(r.sim->frequency) << ',' << fmt(r.sim->wilson_low)
          << ',' << fmt(r.sim->wilson_high);
    }
    out << "\n";
  }
}

void write_json(const RunConfig& cfg, const SweepAxis& axis,
                const std::vector<PointResult>& results, std::ostream& out) {
  ordered_json rows = ordered_json::array();
  for (const auto& r : results) {
    if (!r.error.empty()) continue;
    ordered_json row;
    row[axis.name] = (axis.name == "k" || axis.name == "b0")
                         ? ordered_json(std::llround(r.value))
                         : ordered_json(r.value);
    if (r.bounds) {
      const ordered_json b = ordered_json::parse(
          to_json_string(*r.bounds, cfg.intermediates));
      for (auto it = b.begin(); it != b.end(); ++it) {
        row[it.key()] = it.value();
      }
    }
    if (r.sim) {
      ordered_json s;
      s["violations"] = r.sim->violations;
      s["trials"] = r.sim->trials;
      s["frequency"] = r.sim->frequency;
      s["wilson_ci_95"] = {r.sim->wilson_low, r.sim->wilson_high};
      s["cutoff_truncation_bound"] = r.sim->cutoff_truncation_bound;
      row["sim"] = s;
    }
    rows.push_back(row);
  }
  out << rows.dump(2) << "\n";
}

}  // namespace

SweepAxis parse_sweep_spec(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 >= spec.size()) {
    throw ConfigError("sweep: expected \"axis=values\", got \"" + spec + "\"");
  }
  SweepAxis axis;
  axis.name = spec.substr(0, eq);
  const std::string rest = spec.substr(eq + 1);

  auto parse_num = [&](const std::string& s) {
    try {
      size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("sweep: bad number \"" + s + "\"");
    }
  };

  const auto dots = rest.find("..");
  if (dots != std::string::npos) {
    const double lo = parse_num(rest.substr(0, dots));
    const double hi = parse_num(rest.substr(dots + 2));
    if (std::floor(lo) != lo || std::floor(hi) != hi || hi < lo) {
      throw ConfigError("sweep: range must be ascending integers");
    }
    for (double v = lo; v <= hi; v += 1.0) axis.values.push_back(v);
  } else {
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) axis.values.push_back(parse_num(item));
    }
  }
  if (axis.values.empty()) throw ConfigError("sweep: no values");
  return axis;
}

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  RunConfig cfg;
  try {
    cfg.base = parse_params(j.at("params"));
    const std::string mode = j.value("mode", std::string("bounds"));
    if (mode == "bounds") {
      cfg.mode = RunMode::kBounds;
    } else if (mode == "simulate") {
      cfg.mode = RunMode::kSimulate;
    } else if (mode == "both") {
      cfg.mode = RunMode::kBoth;
    } else {
      throw ConfigError("config: unknown mode \"" + mode + "\"");
    }
    if (j.contains("sweep")) {
      SweepAxis axis;
      axis.name = j.at("sweep").at("axis").get<std::string>();
      axis.values = j.at("sweep").at("values").get<std::vector<double>>();
      if (axis.values.empty()) throw ConfigError("config: empty sweep");
      cfg.sweep = std::move(axis);
    }
    if (j.contains("sim")) {
      const json& s = j.at("sim");
      cfg.trials = s.value("trials", cfg.trials);
      cfg.seed = s.value("seed", cfg.seed);
      cfg.premine_cycles = s.value("premine_cycles", cfg.premine_cycles);
      cfg.race_cutoff = s.value("race_cutoff", cfg.race_cutoff);
      cfg.threads = s.value("threads", cfg.threads);
    }
    if (j.contains("output")) {
      const json& o = j.at("output");
      cfg.output_path = o.value("path", std::string());
      const std::string f = o.value("format", std::string("csv"));
      if (f == "csv") {
        cfg.format = OutputFormat::kCsv;
      } else if (f == "json") {
        cfg.format = OutputFormat::kJson;
      } else {
        throw ConfigError("config: unknown format \"" + f + "\"");
      }
    }
    cfg.eps_tail = j.value("eps_tail", cfg.eps_tail);
    cfg.eps_residual = j.value("eps_residual", cfg.eps_residual);
    cfg.intermediates = j.value("intermediates", cfg.intermediates);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

int run(const RunConfig& config, std::ostream& diagnostics) {
  SweepAxis axis = config.sweep
                       ? *config.sweep
                       : SweepAxis{"k", {static_cast<double>(config.base.k)}};

  // Points are pure functions of (config, index); evaluate them in parallel
  // for bounds-only runs. Simulation parallelizes internally over trials.
  std::vector<PointResult> results(axis.values.size());
  if (config.mode == RunMode::kBounds && axis.values.size() > 1) {
    std::vector<std::future<PointResult>> futures;
    futures.reserve(axis.values.size());
    for (size_t i = 0; i < axis.values.size(); ++i) {
      futures.push_back(std::async(std::launch::async, evaluate_point,
                                   std::cref(config), std::cref(axis), i));
    }
    for (size_t i = 0; i < futures.size(); ++i) results[i] = futures[i].get();
  } else {
    for (size_t i = 0; i < axis.values.size(); ++i) {
      results[i] = evaluate_point(config, axis, i);
    }
  }

  bool any_error = false;
  std::vector<std::string> warned;
  for (const auto& r : results) {
    if (!r.error.empty()) {
      any_error = true;
      diagnostics << "point " << axis.name << "=" << fmt(r.value)
                  << " failed: " << r.error << "\n";
      continue;
    }
    if (r.bounds) {
      for (const auto& w : r.bounds->warnings) {
        if (std::find(warned.begin(), warned.end(), w) == warned.end()) {
          warned.push_back(w);
          diagnostics << "warning: " << w << "\n";
        }
      }
    }
  }

  std::ostringstream body;
  if (config.format == OutputFormat::kCsv) {
    write_csv(config, axis, results, body);
  } else {
    write_json(config, axis, results, body);
  }

  if (config.output_path.empty() || config.output_path == "-") {
    diagnostics.flush();
    std::fputs(body.str().c_str(), stdout);
  } else {
    std::ofstream out(config.output_path, std::ios::binary);
    if (!out) {
      diagnostics << "cannot write " << config.output_path << "\n";
      return 1;
    }
    out << body.str();
  }
  return any_error ? 1 : 0;
}

}  // namespace seclat
