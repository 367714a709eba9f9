#include <algorithm>
#include <cmath>

#include <omp.h>

#include "trichord/chords.hpp"

namespace trichord {

namespace {

SeedOutcome process_seed(const Seed& seed, ChordTarget target, const SystemParams& params, const FindConfig& cfg) {
  SeedOutcome out;
  ShootResult shot;
  try {
    shot = shoot(seed, target, params, cfg.t_max, cfg.coarse_tol, cfg.shoot_int_tol);
  } catch (const Error&) {
    out.termination = Termination::step_underflow;
    return out;
  }
  out.termination = shot.termination;
  out.candidates = shot.candidates.size();
  for (const auto& cand : shot.candidates) {
    try {
      Chord c = refine(seed, cand.t, target, params, cfg.refine);
      out.chords.push_back(std::move(c));
    } catch (const RefinementFailed& e) {
      out.failures.push_back(e.reason);
    } catch (const GuardViolation&) {
      out.failures.push_back(RefineFailure::forbidden_region);
    } catch (const Error&) {
      out.failures.push_back(RefineFailure::divergence);
    }
  }
  return out;
}

}  // namespace

namespace kernels {

std::vector<SeedOutcome> process_seeds_serial(std::span<const Seed> seeds, ChordTarget target,
                                              const SystemParams& params, const FindConfig& config) {
  std::vector<SeedOutcome> out;
  out.reserve(seeds.size());
  for (const auto& s : seeds) out.push_back(process_seed(s, target, params, config));
  return out;
}

std::vector<SeedOutcome> process_seeds_parallel(std::span<const Seed> seeds, ChordTarget target,
                                                const SystemParams& params, const FindConfig& config,
                                                int workers) {
  std::vector<SeedOutcome> out(seeds.size());
  const long n = static_cast<long>(seeds.size());
#pragma omp parallel for schedule(dynamic, 16) num_threads(std::max(1, workers))
  for (long i = 0; i < n; ++i) out[i] = process_seed(seeds[i], target, params, config);
  return out;
}

}  // namespace kernels

Catalog find_chords(const SystemParams& params, double h, ChordTarget target, const FindConfig& config) {
  Catalog cat;
  cat.mu = params.mu();
  cat.h = h;
  cat.target = target;
  FindSummary& sum = cat.summary;

  const SeedGridResult grid = seed_grid(params, h, target, config.grid);
  sum.seeds = grid.seeds.size();
  sum.grid_summary = grid.summary();

  const auto outcomes = config.parallel
                            ? kernels::process_seeds_parallel(grid.seeds, target, params, config, config.workers)
                            : kernels::process_seeds_serial(grid.seeds, target, params, config);

  std::vector<Chord> refined;
  for (const auto& o : outcomes) {
    sum.candidates += o.candidates;
    for (auto f : o.failures) {
      ++sum.refine_failures;
      ++sum.failure_reasons[to_string(f)];
    }
    for (const auto& c : o.chords) refined.push_back(c);
  }
  sum.refined = refined.size();

  const auto unique = dedup(refined, params, config.dedup, config.refine);

  // Certification: re-integrate at a tighter tolerance and check the end swap.
  std::vector<Chord> certified(unique.size());
  std::vector<char> keep(unique.size(), 0);
  const long n = static_cast<long>(unique.size());
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, config.parallel ? config.workers : 1))
  for (long i = 0; i < n; ++i) {
    try {
      Chord c = unique[i];
      // The recorded residual must be reproduced, within 10x, by a tighter
      // re-integration. The 1e-12 floor is the integration noise level.
      const Chord tight = evaluate_chord(c.initial, c.duration, target, params, h, config.refine, config.certify_tol);
      const bool reproduced = tight.residual_norm <= 10.0 * std::max(c.residual_norm, 1e-12);
      if (reproduced && endpoint_symmetry_gap(c, params) <= config.symmetry_gap_tol) {
        certified[i] = std::move(c);
        keep[i] = 1;
      }
    } catch (const Error&) {
    }
  }
  for (long i = 0; i < n; ++i) {
    if (keep[i])
      cat.chords.push_back(std::move(certified[i]));
    else
      ++sum.rejected_certification;
  }

  std::vector<double> residuals;
  for (const auto& c : cat.chords) {
    ++sum.by_crossings[c.crossings];
    (c.prime ? sum.prime : sum.non_prime)++;
    if (c.spatial) ++sum.spatial;
    residuals.push_back(c.residual_norm);
  }
  if (!cat.chords.empty()) {
    sum.min_duration = cat.chords.front().duration;
    sum.max_duration = cat.chords.back().duration;
    std::sort(residuals.begin(), residuals.end());
    sum.max_residual = residuals.back();
    sum.median_residual = residuals[residuals.size() / 2];
  }
  return cat;
}

}  // namespace trichord
