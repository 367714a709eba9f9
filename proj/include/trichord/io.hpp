#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trichord/chords.hpp"
#include "trichord/moser.hpp"
#include "trichord/section.hpp"

namespace trichord {

/// Minimal JSON emitter. Floats are printed with 17 significant digits,
/// which nlohmann's shortest-round-trip output does not offer.
namespace json {
std::string num(double v);  // non-finite values become null
std::string str(const std::string& s);
std::string boolean(bool b);
std::string arr(std::span<const double> v);
std::string arr(const std::vector<std::string>& raw);

class Object {
 public:
  Object& add(const std::string& key, std::string raw);
  Object& add(const std::string& key, double v) { return add(key, num(v)); }
  std::string dump() const;

 private:
  std::vector<std::pair<std::string, std::string>> fields_;
};
}  // namespace json

/// Header t,q1,q2,q3,p1,p2,p3,H.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const SystemParams& params);

std::string chord_json(const Chord& c);

/// Line 1 metadata, line 2 timestamp, then one chord per line.
void write_catalog(std::ostream& out, const std::vector<Chord>& chords, const std::string& metadata_json,
                   const std::string& timestamp);

/// Chord lines of a catalog file (metadata and timestamp lines skipped).
struct CatalogEntry {
  std::string id;
  double mu = 0.0, h = 0.0, duration = 0.0;
  ChordTarget target = ChordTarget::xz_plane;
  PhaseState state;
};
std::vector<CatalogEntry> read_catalog(std::istream& in);

std::string summary_json(const FindSummary& s);
std::string lagrange_json(const EquilibriumSet& eq, const SystemParams& params);
std::string regularize_json(const PhaseState& s);
std::string section_json(const std::vector<SectionRow>& rows);
std::string twist_json(const TwistReport& rep);
std::string family_json(const Family& fam);

std::string utc_timestamp();

}  // namespace trichord
