#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trichord/dynamics.hpp"
#include "trichord/integrate.hpp"
#include "trichord/symmetry.hpp"

namespace trichord {

/// xz_plane: endpoints on Fix(rho2), residual (q2, p1, p3).
/// x_axis: endpoints on Fix(rho1), residual (q2, q3, p1).
enum class ChordTarget { xz_plane, x_axis };

const char* to_string(ChordTarget t);
ChordTarget parse_target(const std::string& s);
InvolutionKind involution_of(ChordTarget t);
std::array<double, 3> target_residual(ChordTarget t, const PhaseState& s);

using Chart = std::array<double, 2>;

/// A point of Fix(target) on the energy level h.
/// xz_plane chart (q1, q3): qdot = (0, branch * sqrt(2(h - U)), 0).
/// x_axis chart (q1, theta): qdot = (0, v cos theta, v sin theta), v = sqrt(2(h - U)).
struct Seed {
  PhaseState state;
  Chart chart{};
  std::array<int, 2> grid_index{};
  double h = 0.0;
  int branch = 1;
};

/// State for the given chart point, or nullopt where h < U_eff (forbidden).
std::optional<PhaseState> seed_state(ChordTarget target, const Chart& chart, double h, int branch,
                                     const SystemParams& params);
/// d(state)/d(chart), 6x2.
Eigen::Matrix<double, 6, 2> seed_jacobian(ChordTarget target, const Chart& chart, double h, int branch,
                                          const SystemParams& params);
/// Chart coordinates and branch of a state already on Fix(target).
std::pair<Chart, int> chart_of(ChordTarget target, const PhaseState& s);

struct GridRange {
  double lo = 0.0, hi = 0.0;
};

struct SeedGridSpec {
  std::array<GridRange, 2> ranges;
  int n = 50;  // nodes per axis, endpoints included
  HillLabel component = HillLabel::moon_component;
};

struct SeedGridResult {
  std::vector<Seed> seeds;  // ordered by (grid_index, branch)
  std::size_t nodes = 0, forbidden = 0, other_component = 0, guarded = 0;
  std::string summary() const;
};

SeedGridResult seed_grid(const SystemParams& params, double h, ChordTarget target,
                         const SeedGridSpec& spec);

struct Candidate {
  double t = 0.0;
  std::array<double, 3> residual{};
  double residual_norm = 0.0;
  int ordinal = 0;  // 1-based index of the q2 = 0 crossing
};

struct ShootResult {
  std::vector<Candidate> candidates;
  Termination termination = Termination::completed;
  std::size_t crossings_seen = 0;
};

/// Integrates from the seed for t_max and keeps every q2 = 0 crossing whose
/// target residual is within coarse_tol.
ShootResult shoot(const Seed& seed, ChordTarget target, const SystemParams& params, double t_max,
                  double coarse_tol, double int_tol = 1e-10);

/// One bi-normal trajectory segment.
struct Chord {
  PhaseState initial;
  PhaseState terminal;  // state at `duration`
  double duration = 0.0;
  ChordTarget target = ChordTarget::xz_plane;
  double residual_norm = 0.0;
  int crossings = 0;
  bool prime = true;
  bool spatial = false;
  Mat6 monodromy = Mat6::Identity();
  double h = 0.0, mu = 0.0;
  Chart chart{};
  int branch = 1;
  int iterations = 0;
  std::array<int, 2> grid_index{};

  /// Eigenvalue moduli of the monodromy, descending.
  std::vector<double> stability() const;
};

struct RefineOptions {
  double tol = 1e-10;
  double min_duration = 1e-3;
  int max_iterations = 50;
  int max_halvings = 12;
  double int_tol = 1e-12;        // final iterations and reported residual
  double loose_int_tol = 1e-10;  // while the residual is above switch_residual
  double switch_residual = 1e-6;
  double crossing_tol = 1e-6;  // interior crossings counted below this residual
  double spatial_threshold = 1e-6;
  double max_condition = 1e12;
};

enum class RefineFailure { invalid_start, divergence, singular_jacobian, degenerate_duration, forbidden_region };

const char* to_string(RefineFailure f);

class RefinementFailed : public Error {
 public:
  RefinementFailed(RefineFailure reason, std::string msg, std::vector<double> trace, double condition = 0.0)
      : Error(std::move(msg)), reason(reason), trace(std::move(trace)), condition(condition) {}
  RefineFailure reason;
  std::vector<double> trace;  // residual norm per iteration
  double condition;
};

/// Newton differential correction of (chart, t1) against the 3-residual.
Chord refine(const Seed& seed, double t1, ChordTarget target, const SystemParams& params,
             const RefineOptions& opts = {});

/// Re-evaluates residual, monodromy, crossings and the spatial flag of a
/// chord from its initial state at the given integration tolerance.
Chord evaluate_chord(const PhaseState& initial, double duration, ChordTarget target,
                     const SystemParams& params, double h, const RefineOptions& opts, double int_tol);

/// Max-norm gap between flow_T(rho(x(T))) and rho(x(0)).
double endpoint_symmetry_gap(const Chord& chord, const SystemParams& params, double tol = 1e-12);

/// Planar symmetric periodic orbit through a perpendicular x-axis crossing:
/// Newton on (q1, half period) against (q2, p1) with the velocity fixed along +-q2.
struct PlanarOrbit {
  PhaseState initial;
  double half_period = 0.0;
  double period() const { return 2.0 * half_period; }
  double h = 0.0;
  double residual_norm = 0.0;
};
PlanarOrbit find_planar_orbit(const SystemParams& params, double h, double q1_guess, int branch,
                              double half_period_guess, const RefineOptions& opts = {});

struct DedupOptions {
  double pos_tol = 1e-6;
  double time_tol = 1e-6;
};

/// Identifies chords equal up to the end swap, keeps the lexicographically
/// smallest initial state per class, and sorts by (duration, q1). A canonical
/// orientation not present among the inputs is re-refined from the far end.
std::vector<Chord> dedup(std::span<const Chord> chords, const SystemParams& params,
                         const DedupOptions& dopts = {}, const RefineOptions& ropts = {});

/// 12 hex characters of SHA-256 over the canonical initial state and duration.
std::string chord_id(const Chord& c);

enum class ContinuationParameter { h, mu };

struct Family {
  std::vector<Chord> chords;
  ContinuationParameter parameter = ContinuationParameter::h;
  std::vector<double> values;
  std::optional<std::string> failure;
};

struct ContinuationOptions {
  double min_step = 1e-6;
  RefineOptions refine;
};

/// Natural-parameter continuation with step halving on failure.
Family continue_family(const Chord& start, ContinuationParameter parameter, double step, int n_steps,
                       const SystemParams& start_params, const ContinuationOptions& opts = {});

struct FindConfig {
  SeedGridSpec grid;
  double t_max = 20.0;
  double shoot_int_tol = 1e-10;
  double coarse_tol = 1e-2;
  RefineOptions refine;
  DedupOptions dedup;
  double certify_tol = 1e-13;
  double symmetry_gap_tol = 1e-7;
  int workers = 1;
  bool parallel = true;  // false selects the serial reference path
};

struct FindSummary {
  std::size_t seeds = 0, candidates = 0, refined = 0, refine_failures = 0, rejected_certification = 0;
  std::map<std::string, std::size_t> failure_reasons;
  std::map<int, std::size_t> by_crossings;
  std::size_t prime = 0, non_prime = 0, spatial = 0;
  double min_duration = 0.0, max_duration = 0.0;
  double max_residual = 0.0, median_residual = 0.0;
  std::string grid_summary;
};

struct Catalog {
  double mu = 0.0, h = 0.0;
  ChordTarget target = ChordTarget::xz_plane;
  std::vector<Chord> chords;
  FindSummary summary;
};

/// seed_grid -> shoot -> refine -> dedup -> certify. Output does not depend on
/// the worker count.
Catalog find_chords(const SystemParams& params, double h, ChordTarget target, const FindConfig& config);

/// Per-seed shooting and refinement; results in seed order.
struct SeedOutcome {
  std::vector<Chord> chords;
  std::size_t candidates = 0;
  std::vector<RefineFailure> failures;
  Termination termination = Termination::completed;
};

namespace kernels {
std::vector<SeedOutcome> process_seeds_serial(std::span<const Seed> seeds, ChordTarget target,
                                              const SystemParams& params, const FindConfig& config);
std::vector<SeedOutcome> process_seeds_parallel(std::span<const Seed> seeds, ChordTarget target,
                                                const SystemParams& params, const FindConfig& config,
                                                int workers);
}  // namespace kernels

}  // namespace trichord
