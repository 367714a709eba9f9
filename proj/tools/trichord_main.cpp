// trichord: command-line front end.
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "trichord/config.hpp"
#include "trichord/io.hpp"
#include "trichord/verify.hpp"

using namespace trichord;

namespace {

PhaseState parse_state(const std::vector<double>& v, const char* field) {
  if (v.size() != 6) throw ConfigError(field, "expected six numbers q1 q2 q3 p1 p2 p3");
  return PhaseState{{v[0], v[1], v[2]}, {v[3], v[4], v[5]}};
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

// Flags shared by the search commands. Unset optionals leave the file and
// environment values alone.
struct CommonFlags {
  std::string config_path;
  std::optional<double> mu, h, l1_delta, t_max, integration_tol, coarse_tol, refine_tol, pos_tol, time_tol, guard;
  std::optional<std::string> target, component, output;
  std::optional<int> n, workers;
  std::optional<std::uint64_t> seed;
  std::vector<double> grid;

  void attach(CLI::App* app, bool search) {
    app->add_option("--config", config_path, "JSON configuration file (flags override it)");
    app->add_option("--mu", mu, "mass ratio (default 0.0121505856, Earth-Moon conventional)");
    app->add_option("--h", h, "energy level");
    app->add_option("--l1-delta", l1_delta, "energy below H(L1): h = H(L1) - delta");
    app->add_option("--integration-tol", integration_tol, "integration tolerance");
    app->add_option("--collision-guard", guard, "minimum distance to a primary");
    app->add_option("-o,--output", output, "output path (default stdout)");
    if (!search) return;
    app->add_option("--target", target, "xz-plane or x-axis");
    app->add_option("--grid", grid, "q1_lo q1_hi a_lo a_hi (a = q3 or theta)")->expected(4);
    app->add_option("--n", n, "grid nodes per axis");
    app->add_option("--t-max", t_max, "shooting horizon");
    app->add_option("--coarse-tol", coarse_tol, "candidate residual threshold");
    app->add_option("--refine-tol", refine_tol, "Newton residual tolerance");
    app->add_option("--dedup-pos-tol", pos_tol, "dedup state tolerance");
    app->add_option("--dedup-time-tol", time_tol, "dedup duration tolerance");
    app->add_option("--component", component, "moon, earth or exterior");
    app->add_option("--workers", workers, "OpenMP worker count");
    app->add_option("--seed", seed, "reserved sampler seed");
  }

  RunConfig resolve() const {
    RunConfig c;
    if (!config_path.empty()) apply_json_file(c, config_path);
    apply_env(c);
    if (mu) c.mu = *mu;
    if (h) c.h = *h;
    if (l1_delta) c.l1_delta = *l1_delta;
    if (t_max) c.t_max = *t_max;
    if (integration_tol) c.integration_tol = *integration_tol;
    if (coarse_tol) c.coarse_tol = *coarse_tol;
    if (refine_tol) c.refine_tol = *refine_tol;
    if (pos_tol) c.dedup_pos_tol = *pos_tol;
    if (time_tol) c.dedup_time_tol = *time_tol;
    if (guard) c.collision_guard = *guard;
    if (target) c.target = parse_target(*target);
    if (component) c.component = parse_component(*component);
    if (output) c.output = *output;
    if (n) c.n = *n;
    if (workers) c.workers = *workers;
    if (seed) c.sampler_seed = *seed;
    if (!grid.empty()) c.ranges = std::array<GridRange, 2>{GridRange{grid[0], grid[1]}, GridRange{grid[2], grid[3]}};
    validate(c);
    return c;
  }
};

int run(int argc, char** argv) {
  CLI::App app{"Bi-normal chords of the spatial circular restricted three-body problem"};
  app.set_help_flag("--help", "Print this help message and exit");  // -h would clash with --h
  app.require_subcommand(1);
  app.set_version_flag("--version", TRICHORD_VERSION);

  // lagrange
  auto* lag = app.add_subcommand("lagrange", "Lagrange points and their energies as JSON");
  CommonFlags lag_f;
  lag_f.attach(lag, false);

  // integrate
  auto* integ = app.add_subcommand("integrate", "Integrate one state and write a CSV trajectory");
  CommonFlags int_f;
  int_f.attach(integ, false);
  std::vector<double> int_state;
  double t0 = 0.0, t1 = 1.0;
  integ->add_option("--state", int_state, "q1 q2 q3 p1 p2 p3")->expected(6)->required();
  integ->add_option("--t0", t0, "start time");
  integ->add_option("--t1", t1, "end time (may precede t0)")->required();

  // regularize
  auto* reg = app.add_subcommand("regularize", "Moser chart image and locus residuals as JSON");
  std::vector<double> reg_state;
  std::string reg_out;
  reg->add_option("--state", reg_state, "q1 q2 q3 p1 p2 p3")->expected(6)->required();
  reg->add_option("-o,--output", reg_out, "output path");

  // chords find / continue
  auto* chords = app.add_subcommand("chords", "Chord search and continuation");
  chords->require_subcommand(1);
  auto* find = chords->add_subcommand("find", "Grid search, refinement and deduplication; writes a JSONL catalog");
  CommonFlags find_f;
  find_f.attach(find, true);
  std::string summary_path;
  bool serial = false;
  find->add_option("--summary", summary_path, "write the search summary here (default stderr)");
  find->add_flag("--serial", serial, "use the serial reference kernel");

  auto* cont = chords->add_subcommand("continue", "Continue a cataloged chord in h or mu");
  CommonFlags cont_f;
  cont_f.attach(cont, false);
  std::string cat_path, chord_sel, parameter = "h";
  double step = 1e-3;
  int steps = 10;
  cont->add_option("--catalog", cat_path, "catalog JSONL")->required();
  cont->add_option("--id", chord_sel, "chord id or 0-based index (default first)");
  cont->add_option("--parameter", parameter, "h or mu")->check(CLI::IsMember({"h", "mu"}));
  cont->add_option("--step", step, "parameter step");
  cont->add_option("--steps", steps, "number of steps");

  // section map / twist
  auto* section = app.add_subcommand("section", "Page return map and vertical twist diagnostic");
  section->require_subcommand(1);
  auto* smap = section->add_subcommand("map", "Iterate the return map to {p3 = 0, q3 minimum}");
  CommonFlags map_f;
  map_f.attach(smap, false);
  std::vector<double> map_state;
  std::vector<double> map_q1;
  double map_amp = 1e-3;
  int iterations = 10, page_sign = 0;
  double map_tmax = 100.0;
  smap->add_option("--state", map_state, "start state q1 q2 q3 p1 p2 p3 (energy taken from it)")->expected(6);
  smap->add_option("--q1", map_q1, "start on the xz-plane at these q1 values, q3 = -amplitude");
  smap->add_option("--amplitude", map_amp, "vertical offset of --q1 starts");
  smap->add_option("--iterations", iterations, "returns per point");
  smap->add_option("--page-sign", page_sign, "override the q3 side of the page (+1 or -1)");
  smap->add_option("--t-max", map_tmax, "give up on a return after this time");

  auto* twist = section->add_subcommand("twist", "Vertical rotation per period of a planar symmetric orbit");
  CommonFlags tw_f;
  tw_f.attach(twist, false);
  std::optional<double> radius, q1_guess, half_guess;
  int branch = 1;
  std::vector<double> amplitudes = default_amplitudes();
  twist->add_option("--radius", radius, "mu = 0 only: circular orbit of this radius (sets h and guesses)");
  twist->add_option("--q1-guess", q1_guess, "x-axis crossing guess");
  twist->add_option("--half-period-guess", half_guess, "half period guess");
  twist->add_option("--branch", branch, "sign of qdot2 at the crossing");
  twist->add_option("--amplitudes", amplitudes, "vertical amplitude ladder");

  auto* verify = app.add_subcommand("verify", "Run the invariant suite; exit 0 iff every check passes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (lag->parsed()) {
    const RunConfig cfg = lag_f.resolve();
    const SystemParams params = make_params(cfg);
    if (!(params.mu() > 0.0)) throw ConfigError("mu", "lagrange needs mu > 0");
    emit(cfg.output, lagrange_json(lagrange_points(params), params) + "\n");
    return 0;
  }

  if (integ->parsed()) {
    const RunConfig cfg = int_f.resolve();
    const SystemParams params = make_params(cfg);
    const PhaseState s0 = parse_state(int_state, "state");
    if (t1 == t0) throw ConfigError("t1", "must differ from t0");
    IntegrateOptions o;
    o.tol = cfg.integration_tol;
    const auto res = integrate(s0, t0, t1, params, o);
    std::ostringstream csv;
    write_trajectory_csv(csv, res.trajectory, params);
    emit(cfg.output, csv.str());
    std::cerr << json::Object()
                     .add("termination", json::str(to_string(res.trajectory.termination)))
                     .add("steps", std::to_string(res.trajectory.steps))
                     .add("max_energy_drift", res.trajectory.max_energy_drift)
                     .dump()
              << "\n";
    return res.trajectory.termination == Termination::completed ? 0 : 1;
  }

  if (reg->parsed()) {
    emit(reg_out, regularize_json(parse_state(reg_state, "state")) + "\n");
    return 0;
  }

  if (find->parsed()) {
    const RunConfig cfg = find_f.resolve();
    const SystemParams params = make_params(cfg);
    const double h = resolve_h(cfg, params);
    FindConfig fc = make_find_config(cfg, params, h);
    fc.parallel = !serial;
    const Catalog cat = find_chords(params, h, cfg.target, fc);
    std::ostringstream out;
    write_catalog(out, cat.chords, metadata_json(cfg, params, h), utc_timestamp());
    emit(cfg.output, out.str());
    const std::string sum = summary_json(cat.summary) + "\n";
    if (summary_path.empty())
      std::cerr << sum;
    else
      emit(summary_path, sum);
    return 0;
  }

  if (cont->parsed()) {
    const RunConfig cfg = cont_f.resolve();
    std::ifstream in(cat_path);
    if (!in) throw ConfigError("catalog", "cannot open '" + cat_path + "'");
    const auto entries = read_catalog(in);
    if (entries.empty()) throw ConfigError("catalog", "no chords in '" + cat_path + "'");
    const CatalogEntry* pick = &entries.front();
    if (!chord_sel.empty()) {
      pick = nullptr;
      for (const auto& e : entries)
        if (e.id == chord_sel) pick = &e;
      if (!pick) {
        std::size_t idx = 0;
        try {
          idx = std::stoul(chord_sel);
        } catch (const std::exception&) {
          throw ConfigError("id", "no chord '" + chord_sel + "'");
        }
        if (idx >= entries.size()) throw ConfigError("id", "index out of range");
        pick = &entries[idx];
      }
    }
    const SystemParams params(pick->mu, cfg.collision_guard);
    RefineOptions ro;
    ro.int_tol = cfg.integration_tol;
    ro.tol = cfg.refine_tol;
    Chord start = evaluate_chord(pick->state, pick->duration, pick->target, params, pick->h, ro, ro.int_tol);
    ContinuationOptions co;
    co.refine = ro;
    const Family fam = continue_family(start, parameter == "h" ? ContinuationParameter::h : ContinuationParameter::mu,
                                       step, steps, params, co);
    emit(cfg.output, family_json(fam) + "\n");
    return fam.failure ? 1 : 0;
  }

  if (smap->parsed()) {
    const RunConfig cfg = map_f.resolve();
    const SystemParams params = make_params(cfg);
    SectionOptions so;
    so.tol = cfg.integration_tol;
    so.t_max = map_tmax;
    so.page_sign = page_sign != 0 ? (page_sign > 0 ? 1 : -1) : page_sign_log().q3_sign;
    std::vector<SectionPoint> pts;
    double h = 0.0;
    if (!map_state.empty()) {
      const PhaseState s = parse_state(map_state, "state");
      h = hamiltonian(s, params);
      pts.push_back({s, h, 0.0, false});
    } else {
      if (map_q1.empty()) throw ConfigError("q1", "give --state or --q1");
      h = resolve_h(cfg, params);
      for (double q1 : map_q1) {
        const auto s = seed_state(ChordTarget::xz_plane, {q1, so.page_sign * map_amp}, h, 1, params);
        if (!s) throw ConfigError("q1", fmt::format("q1 = {} is outside the Hill region", q1));
        pts.push_back({*s, h, 0.0, false});
      }
    }
    const auto rows = return_map_samples(pts, iterations, params, h, so);
    emit(cfg.output, section_json(rows) + "\n");
    for (const auto& r : rows)
      if (!r.returned) return 1;
    return 0;
  }

  if (twist->parsed()) {
    const RunConfig cfg = tw_f.resolve();
    const SystemParams params = make_params(cfg);
    double h = 0.0, q1 = 0.0, half = 0.0;
    int br = branch >= 0 ? 1 : -1;
    if (radius) {
      if (params.mu() != 0.0) throw ConfigError("radius", "only valid with mu = 0");
      const double r = *radius, n = std::pow(r, -1.5);
      h = -1.0 / (2.0 * r) - std::sqrt(r);
      q1 = r;
      half = std::numbers::pi / std::abs(n - 1.0);
      br = -1;
    } else {
      if (!q1_guess || !half_guess) throw ConfigError("q1-guess", "give --radius or both guesses");
      h = resolve_h(cfg, params);
      q1 = *q1_guess;
      half = *half_guess;
    }
    const auto orbit = find_planar_orbit(params, h, q1_guess.value_or(q1), br, half_guess.value_or(half));
    const auto rep = twist_diagnostic(orbit, amplitudes, params, cfg.integration_tol);
    emit(cfg.output, twist_json(rep) + "\n");
    return 0;
  }

  if (verify->parsed()) {
    const auto results = run_invariant_suite();
    bool all = true;
    for (const auto& r : results) {
      std::cout << fmt::format("[{}] {} ({:.2f} s): {}\n", r.pass ? "PASS" : "FAIL", r.name, r.seconds, r.detail);
      all = all && r.pass;
    }
    return all ? 0 : 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
