#include "trichord/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "trichord/io.hpp"
#include "trichord/moser.hpp"

namespace trichord {

HillLabel parse_component(const std::string& s) {
  if (s == "moon" || s == "moon_component") return HillLabel::moon_component;
  if (s == "earth" || s == "earth_component") return HillLabel::earth_component;
  if (s == "exterior") return HillLabel::exterior;
  throw ConfigError("component", "expected moon, earth or exterior, got '" + s + "'");
}

namespace {

template <class T>
T get(const nlohmann::json& j, const char* field) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(field, "wrong type");
  }
}

}  // namespace

void apply_json(RunConfig& cfg, const std::string& text) {
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ConfigError("config", "not a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "mu") cfg.mu = get<double>(v, "mu");
    else if (key == "h") cfg.h = get<double>(v, "h");
    else if (key == "l1_delta" || key == "l1-delta") cfg.l1_delta = get<double>(v, "l1_delta");
    else if (key == "target") cfg.target = parse_target(get<std::string>(v, "target"));
    else if (key == "n") cfg.n = get<int>(v, "n");
    else if (key == "t_max") cfg.t_max = get<double>(v, "t_max");
    else if (key == "integration_tol") cfg.integration_tol = get<double>(v, "integration_tol");
    else if (key == "coarse_tol") cfg.coarse_tol = get<double>(v, "coarse_tol");
    else if (key == "refine_tol") cfg.refine_tol = get<double>(v, "refine_tol");
    else if (key == "dedup_pos_tol") cfg.dedup_pos_tol = get<double>(v, "dedup_pos_tol");
    else if (key == "dedup_time_tol") cfg.dedup_time_tol = get<double>(v, "dedup_time_tol");
    else if (key == "component") cfg.component = parse_component(get<std::string>(v, "component"));
    else if (key == "workers") cfg.workers = get<int>(v, "workers");
    else if (key == "output") cfg.output = get<std::string>(v, "output");
    else if (key == "seed") cfg.sampler_seed = get<std::uint64_t>(v, "seed");
    else if (key == "collision_guard") cfg.collision_guard = get<double>(v, "collision_guard");
    else if (key == "grid") {
      const auto r = get<std::vector<std::vector<double>>>(v, "grid");
      if (r.size() != 2 || r[0].size() != 2 || r[1].size() != 2)
        throw ConfigError("grid", "expected [[lo, hi], [lo, hi]]");
      cfg.ranges = std::array<GridRange, 2>{GridRange{r[0][0], r[0][1]}, GridRange{r[1][0], r[1][1]}};
    } else {
      throw ConfigError(key, "unknown configuration key");
    }
  }
}

void apply_json_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  apply_json(cfg, ss.str());
}

void apply_env(RunConfig& cfg) {
  const std::pair<const char*, double*> vars[] = {
      {"TRICHORD_INTEGRATION_TOL", &cfg.integration_tol}, {"TRICHORD_COARSE_TOL", &cfg.coarse_tol},
      {"TRICHORD_REFINE_TOL", &cfg.refine_tol},           {"TRICHORD_DEDUP_POS_TOL", &cfg.dedup_pos_tol},
      {"TRICHORD_DEDUP_TIME_TOL", &cfg.dedup_time_tol},
  };
  for (const auto& [name, slot] : vars) {
    const char* v = std::getenv(name);
    if (!v || !*v) continue;
    char* end = nullptr;
    const double x = std::strtod(v, &end);
    if (end == v || *end != '\0') throw ConfigError(name, fmt::format("not a number: '{}'", v));
    *slot = x;
  }
}

void validate(const RunConfig& cfg) {
  auto in = [](double x, double lo, double hi) { return std::isfinite(x) && x >= lo && x <= hi; };
  if (!(cfg.mu >= 0.0 && cfg.mu < 1.0)) throw ConfigError("mu", "must lie in [0, 1)");
  if (cfg.h && !std::isfinite(*cfg.h)) throw ConfigError("h", "must be finite");
  if (cfg.l1_delta && !std::isfinite(*cfg.l1_delta)) throw ConfigError("l1-delta", "must be finite");
  if (cfg.l1_delta && !cfg.h && cfg.mu == 0.0) throw ConfigError("l1-delta", "needs mu > 0");
  if (cfg.n < 1 || cfg.n > 10000) throw ConfigError("n", "must lie in [1, 10000]");
  if (!(cfg.t_max > 0.0) || !std::isfinite(cfg.t_max)) throw ConfigError("t_max", "must be positive");
  if (!in(cfg.integration_tol, 1e-14, 1e-6)) throw ConfigError("integration_tol", "must lie in [1e-14, 1e-6]");
  if (!in(cfg.coarse_tol, 1e-12, 1.0)) throw ConfigError("coarse_tol", "must lie in [1e-12, 1]");
  if (!in(cfg.refine_tol, 1e-14, 1e-4)) throw ConfigError("refine_tol", "must lie in [1e-14, 1e-4]");
  if (!in(cfg.dedup_pos_tol, 1e-14, 1e-1)) throw ConfigError("dedup_pos_tol", "must lie in [1e-14, 1e-1]");
  if (!in(cfg.dedup_time_tol, 1e-14, 1e-1)) throw ConfigError("dedup_time_tol", "must lie in [1e-14, 1e-1]");
  if (cfg.workers < 1 || cfg.workers > 1024) throw ConfigError("workers", "must lie in [1, 1024]");
  if (!(cfg.collision_guard > 0.0)) throw ConfigError("collision_guard", "must be positive");
  if (cfg.ranges) {
    for (const auto& r : *cfg.ranges)
      if (!(std::isfinite(r.lo) && std::isfinite(r.hi) && r.lo <= r.hi))
        throw ConfigError("grid", "ranges must be finite with lo <= hi");
  }
}

SystemParams make_params(const RunConfig& cfg) {
  try {
    return SystemParams(cfg.mu, cfg.collision_guard);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("mu", e.what());
  }
}

double resolve_h(const RunConfig& cfg, const SystemParams& params) {
  if (cfg.h) return *cfg.h;
  if (cfg.l1_delta) return lagrange_points(params).energies[0] - *cfg.l1_delta;
  throw ConfigError("h", "set --h or --l1-delta");
}

std::array<GridRange, 2> resolve_ranges(const RunConfig& cfg, const SystemParams& params, double h) {
  if (cfg.ranges) return *cfg.ranges;
  const auto b = component_bounds(cfg.component, h, params);
  if (b.empty) throw ConfigError("component", fmt::format("{} is empty at h = {}", to_string(cfg.component), h));
  if (cfg.target == ChordTarget::xz_plane) return {GridRange{b.q1_min, b.q1_max}, GridRange{-b.q3_max, b.q3_max}};
  return {GridRange{b.q1_min, b.q1_max}, GridRange{-std::numbers::pi, std::numbers::pi}};
}

FindConfig make_find_config(const RunConfig& cfg, const SystemParams& params, double h) {
  FindConfig f;
  f.grid.ranges = resolve_ranges(cfg, params, h);
  f.grid.n = cfg.n;
  f.grid.component = cfg.component;
  f.t_max = cfg.t_max;
  f.coarse_tol = cfg.coarse_tol;
  f.refine.tol = cfg.refine_tol;
  f.refine.int_tol = cfg.integration_tol;
  f.certify_tol = std::max(1e-14, std::min(1e-13, cfg.integration_tol * 0.1));
  f.dedup.pos_tol = cfg.dedup_pos_tol;
  f.dedup.time_tol = cfg.dedup_time_tol;
  f.workers = cfg.workers;
  return f;
}

std::string config_json(const RunConfig& cfg, const SystemParams& params, double h) {
  json::Object o;
  o.add("mu", cfg.mu);
  o.add("h", cfg.h ? json::num(*cfg.h) : "null");
  o.add("l1_delta", cfg.l1_delta ? json::num(*cfg.l1_delta) : "null");
  o.add("target", json::str(to_string(cfg.target)));
  std::vector<std::string> ranges;
  try {
    for (const auto& r : resolve_ranges(cfg, params, h)) ranges.push_back(json::arr(std::vector<double>{r.lo, r.hi}));
  } catch (const ConfigError&) {
  }
  o.add("grid", json::arr(ranges));
  o.add("n", std::to_string(cfg.n));
  o.add("t_max", cfg.t_max);
  o.add("integration_tol", cfg.integration_tol);
  o.add("coarse_tol", cfg.coarse_tol);
  o.add("refine_tol", cfg.refine_tol);
  o.add("dedup_pos_tol", cfg.dedup_pos_tol);
  o.add("dedup_time_tol", cfg.dedup_time_tol);
  o.add("component", json::str(to_string(cfg.component)));
  o.add("collision_guard", cfg.collision_guard);
  o.add("seed", std::to_string(cfg.sampler_seed));
  return o.dump();
}

std::string metadata_json(const RunConfig& cfg, const SystemParams& params, double h) {
  const auto log = page_sign_log();
  json::Object o;
  o.add("type", json::str("metadata"));
  o.add("version", json::str(TRICHORD_VERSION));
  o.add("config", config_json(cfg, params, h));
  o.add("mu", params.mu());
  o.add("h", h);
  o.add("c", -2.0 * h);
  o.add("H_L1", params.mu() > 0.0 ? json::num(lagrange_points(params).energies[0]) : "null");
  o.add("page_sign", json::Object()
                         .add("q3_sign", std::to_string(log.q3_sign))
                         .add("description", json::str(log.description))
                         .dump());
  o.add("convexity_caveat",
        json::str("(mu, c) accepted without a convexity-range test; no computable membership criterion is available"));
  return o.dump();
}

}  // namespace trichord
