#pragma once

#include <string>
#include <vector>

namespace trichord {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// The invariant suite behind `trichord verify`: symmetry algebra, energy
/// conservation, chart round trips, fixed-locus transport, equilibria, STM
/// accuracy, reversibility and the Kepler-limit oracles. Deterministic.
std::vector<CheckResult> run_invariant_suite();

}  // namespace trichord
