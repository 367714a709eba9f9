#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "trichord/chords.hpp"

namespace trichord {

/// Settings shared by the search commands. Precedence: JSON file, then
/// TRICHORD_* environment variables (tolerances only), then flags.
struct RunConfig {
  double mu = kEarthMoonMu;  // Earth-Moon (conventional)
  std::optional<double> h;
  std::optional<double> l1_delta;  // h = H(L1) - l1_delta
  ChordTarget target = ChordTarget::xz_plane;
  std::optional<std::array<GridRange, 2>> ranges;  // default: bounding box of the component
  int n = 50;
  double t_max = 20.0;
  double integration_tol = 1e-12;
  double coarse_tol = 1e-2;
  double refine_tol = 1e-10;
  double dedup_pos_tol = 1e-6;
  double dedup_time_tol = 1e-6;
  HillLabel component = HillLabel::moon_component;
  int workers = 1;
  std::string output;
  std::uint64_t sampler_seed = 0;  // reserved for a randomized sampler
  double collision_guard = 1e-3;
};

HillLabel parse_component(const std::string& s);

/// Overlays the fields present in a JSON object; unknown keys are errors.
void apply_json(RunConfig& cfg, const std::string& text);
void apply_json_file(RunConfig& cfg, const std::string& path);
/// TRICHORD_INTEGRATION_TOL, TRICHORD_COARSE_TOL, TRICHORD_REFINE_TOL,
/// TRICHORD_DEDUP_POS_TOL, TRICHORD_DEDUP_TIME_TOL.
void apply_env(RunConfig& cfg);

/// Throws ConfigError naming the first offending field.
void validate(const RunConfig& cfg);

SystemParams make_params(const RunConfig& cfg);
/// Energy requested by h or l1_delta (h wins if both are set).
double resolve_h(const RunConfig& cfg, const SystemParams& params);
std::array<GridRange, 2> resolve_ranges(const RunConfig& cfg, const SystemParams& params, double h);
FindConfig make_find_config(const RunConfig& cfg, const SystemParams& params, double h);

/// Content-relevant settings only: the worker count and output path are left out
/// so catalogs do not depend on them.
std::string config_json(const RunConfig& cfg, const SystemParams& params, double h);
/// version, config, mu, h, c, H(L1), page-sign log and the convexity caveat.
std::string metadata_json(const RunConfig& cfg, const SystemParams& params, double h);

}  // namespace trichord
