#include "trichord/io.hpp"

#include <chrono>
#include <cmath>
#include <istream>
#include <ostream>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace trichord {

namespace json {

std::string num(double v) { return std::isfinite(v) ? fmt::format("{:.17g}", v) : "null"; }

std::string str(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20)
          out += fmt::format("\\u{:04x}", static_cast<int>(c));
        else
          out += c;
    }
  }
  return out + "\"";
}

std::string boolean(bool b) { return b ? "true" : "false"; }

std::string arr(std::span<const double> v) {
  std::vector<std::string> raw;
  for (double x : v) raw.push_back(num(x));
  return arr(raw);
}

std::string arr(const std::vector<std::string>& raw) { return "[" + fmt::format("{}", fmt::join(raw, ",")) + "]"; }

Object& Object::add(const std::string& key, std::string raw) {
  fields_.emplace_back(key, std::move(raw));
  return *this;
}

std::string Object::dump() const {
  std::string out = "{";
  for (std::size_t i = 0; i < fields_.size(); ++i) {
    if (i) out += ",";
    out += str(fields_[i].first) + ":" + fields_[i].second;
  }
  return out + "}";
}

}  // namespace json

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const SystemParams& params) {
  out << "t,q1,q2,q3,p1,p2,p3,H\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const auto& s = traj.states[i];
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", traj.times[i], s.q[0],
                       s.q[1], s.q[2], s.p[0], s.p[1], s.p[2], hamiltonian(s, params));
  }
}

std::string chord_json(const Chord& c) {
  const auto st = c.stability();
  return json::Object()
      .add("id", json::str(chord_id(c)))
      .add("mu", c.mu)
      .add("h", c.h)
      .add("target", json::str(to_string(c.target)))
      .add("q", json::arr(c.initial.q))
      .add("p", json::arr(c.initial.p))
      .add("duration", c.duration)
      .add("residual_norm", c.residual_norm)
      .add("crossings", std::to_string(c.crossings))
      .add("prime", json::boolean(c.prime))
      .add("spatial", json::boolean(c.spatial))
      .add("stability", json::arr(st))
      .dump();
}

void write_catalog(std::ostream& out, const std::vector<Chord>& chords, const std::string& metadata_json,
                   const std::string& timestamp) {
  out << metadata_json << "\n";
  out << json::Object().add("timestamp", json::str(timestamp)).dump() << "\n";
  for (const auto& c : chords) out << chord_json(c) << "\n";
}

std::vector<CatalogEntry> read_catalog(std::istream& in) {
  std::vector<CatalogEntry> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ConfigError("catalog", fmt::format("line {} is not valid JSON", lineno));
    if (!j.contains("id")) continue;
    CatalogEntry e;
    e.id = j.at("id").get<std::string>();
    e.mu = j.at("mu").get<double>();
    e.h = j.at("h").get<double>();
    e.duration = j.at("duration").get<double>();
    e.target = parse_target(j.at("target").get<std::string>());
    for (int i = 0; i < 3; ++i) {
      e.state.q[i] = j.at("q").at(i).get<double>();
      e.state.p[i] = j.at("p").at(i).get<double>();
    }
    out.push_back(e);
  }
  return out;
}

std::string summary_json(const FindSummary& s) {
  std::vector<std::string> reasons, crossings;
  json::Object fr, bc;
  for (const auto& [k, v] : s.failure_reasons) fr.add(k, std::to_string(v));
  for (const auto& [k, v] : s.by_crossings) bc.add(std::to_string(k), std::to_string(v));
  return json::Object()
      .add("seeds", std::to_string(s.seeds))
      .add("candidates", std::to_string(s.candidates))
      .add("refined", std::to_string(s.refined))
      .add("refine_failures", std::to_string(s.refine_failures))
      .add("failure_reasons", fr.dump())
      .add("rejected_certification", std::to_string(s.rejected_certification))
      .add("by_crossings", bc.dump())
      .add("prime", std::to_string(s.prime))
      .add("non_prime", std::to_string(s.non_prime))
      .add("spatial", std::to_string(s.spatial))
      .add("min_duration", s.min_duration)
      .add("max_duration", s.max_duration)
      .add("max_residual", s.max_residual)
      .add("median_residual", s.median_residual)
      .add("grid", json::str(s.grid_summary))
      .dump();
}

std::string lagrange_json(const EquilibriumSet& eq, const SystemParams& params) {
  std::vector<std::string> pts;
  for (int i = 0; i < 5; ++i) {
    const PhaseState s = at_rest(eq.points[i]);
    const Vec3 g = effective_potential_gradient(eq.points[i], params);
    pts.push_back(json::Object()
                      .add("label", json::str(fmt::format("L{}", i + 1)))
                      .add("q", json::arr(eq.points[i]))
                      .add("p", json::arr(s.p))
                      .add("H", eq.energies[i])
                      .add("c", -2.0 * eq.energies[i])
                      .add("gradient_norm", norm(g))
                      .dump());
  }
  return json::Object().add("mu", params.mu()).add("points", json::arr(pts)).dump();
}

std::string regularize_json(const PhaseState& s) {
  const auto rs = to_regularized(s);
  const auto [c1, c2] = rs.constraint_residuals();
  json::Object loci;
  for (LocusTag tag : {LocusTag::f1_tilde, LocusTag::f2_tilde, LocusTag::page_w, LocusTag::binding, LocusTag::l2}) {
    const auto r = locus_residual(tag, rs);
    json::Object o;
    o.add("residual", json::arr(r.values)).add("norm", r.norm());
    o.add("sign_ok", r.sign_ok ? json::boolean(*r.sign_ok) : "null");
    o.add("member", json::boolean(r.member(1e-10)));
    loci.add(to_string(tag), o.dump());
  }
  const auto log = page_sign_log();
  return json::Object()
      .add("q", json::arr(s.q))
      .add("p", json::arr(s.p))
      .add("xi", json::arr(rs.xi))
      .add("eta", json::arr(rs.eta))
      .add("constraints", json::arr(std::vector<double>{c1, c2}))
      .add("loci", loci.dump())
      .add("page_sign", json::Object()
                            .add("q3_sign", std::to_string(log.q3_sign))
                            .add("description", json::str(log.description))
                            .dump())
      .dump();
}

namespace {
std::string point_json(const SectionPoint& p, const SystemParams* params) {
  json::Object o;
  o.add("t", p.t).add("q", json::arr(p.state.q)).add("p", json::arr(p.state.p));
  if (params) o.add("H", hamiltonian(p.state, *params));
  return o.dump();
}
}  // namespace

std::string section_json(const std::vector<SectionRow>& rows) {
  std::vector<std::string> out;
  for (const auto& row : rows) {
    std::vector<std::string> its;
    for (const auto& p : row.iterates) its.push_back(point_json(p, nullptr));
    out.push_back(json::Object()
                      .add("returned", json::boolean(row.returned))
                      .add("note", json::str(row.note))
                      .add("max_energy_drift", row.max_energy_drift)
                      .add("iterates", json::arr(its))
                      .dump());
  }
  return json::Object().add("rows", json::arr(out)).dump();
}

std::string twist_json(const TwistReport& rep) {
  std::vector<std::string> samples;
  for (const auto& s : rep.samples) {
    samples.push_back(json::Object()
                          .add("amplitude", s.amplitude)
                          .add("angle", s.angle)
                          .add("unwrapped", s.unwrapped)
                          .add("determinant", s.determinant)
                          .add("half_trace", s.half_trace)
                          .add("degenerate", json::boolean(s.degenerate))
                          .add("eigen_note", json::str(s.eigen_note))
                          .dump());
  }
  return json::Object()
      .add("orbit_id", json::str(rep.orbit_id))
      .add("orbit", json::Object()
                        .add("q", json::arr(rep.orbit.initial.q))
                        .add("p", json::arr(rep.orbit.initial.p))
                        .add("period", rep.orbit.period())
                        .add("h", rep.orbit.h)
                        .add("residual_norm", rep.orbit.residual_norm)
                        .dump())
      .add("returns_sampled", std::to_string(rep.returns_sampled))
      .add("vertical_rotation_per_return", json::arr(rep.vertical_rotation_per_return))
      .add("monotonicity_defect", rep.monotonicity_defect)
      .add("max_adjacent_gap", rep.max_adjacent_gap)
      .add("linearized", rep.linearized)
      .add("extrapolated", rep.extrapolated)
      .add("samples", json::arr(samples))
      .add("label", json::str("heuristic probe of the vertical twist; not an evaluation of the boundary condition"))
      .dump();
}

std::string family_json(const Family& fam) {
  std::vector<std::string> members;
  for (const auto& c : fam.chords) members.push_back(chord_json(c));
  return json::Object()
      .add("parameter", json::str(fam.parameter == ContinuationParameter::h ? "h" : "mu"))
      .add("values", json::arr(fam.values))
      .add("failure", fam.failure ? json::str(*fam.failure) : "null")
      .add("chords", json::arr(members))
      .dump();
}

std::string utc_timestamp() {
  const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", now);
}

}  // namespace trichord
