#pragma once

#include "chernlab/bloch.hpp"
#include "chernlab/bounds.hpp"
#include "chernlab/io.hpp"
#include "chernlab/probes.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace chernlab {

inline const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> c{"bloch",  "chern",    "marker", "spectrum", "thresholds",   "wegner",
                                          "msa-probe", "decay", "ids",    "moments",  "phase-diagram"};
  return c;
}

// Every constant of the explicit-bounds pipeline for a model and a disorder law.
inline json threshold_report(const HoppingModel& m, const DistributionSpec& d, long k_grid, double s = 0.25,
                             double t = 1.0, double q = 2.0) {
  json r;
  const HolderData hd = holder_constant(d);
  r["holder"] = {{"tau", hd.tau}, {"C_tau", hd.C_tau}};
  const ThresholdReport th = strong_disorder_threshold(m, d);
  double mass = 1.0;
  if (d.kind == DistKind::truncated_gaussian) mass = gaussian_mass(d.a);
  r["strong_disorder"] = {{"lambda_rho", th.value},
                          {"s", th.s},
                          {"mu", th.mu},
                          {"grid_s", th.grid_s},
                          {"grid_mu", th.grid_mu},
                          {"density_l1_norm", mass},
                          {"coefficient", th.value * mass}};
  if (m.B != 0.0 || m.n < 2) return r;
  const BandStructure bs = band_structure(m, k_grid);
  json bands = json::array();
  for (const auto& b : bs.bands) bands.push_back({b[0], b[1]});
  r["bands"] = bands;
  r["gaps"] = bs.gaps;
  if (!bs.gap_open[0]) return r;
  const double gap = bs.gaps[0];
  const SalphaOverbound ob = salpha_overbound(m);
  const double alpha = alpha_for_gap(ob, gap);
  r["combes_thomas"] = {{"overbound_coefficient", ob.coefficient},
                        {"r_max", ob.r_max},
                        {"alpha", alpha},
                        {"S_alpha_overbound", ob(alpha)},
                        {"S_alpha_exact", combes_thomas_salpha(m, alpha)}};
  const MomentData md = d.kind == DistKind::truncated_gaussian ? truncated_gaussian_moment_bounds(q) : moment_data(d, q, t);
  const DsBound ds = d_s1_bound(md.B, md.C, s, t, q);
  const double Csa = c_s_alpha(m.n, gap, s, alpha);
  const double a0 = a_zero(gap, s, Csa, ds.K);
  r["weak_disorder"] = {{"s", s},     {"t", t},         {"q", q},     {"B", md.B},
                        {"C_q", md.C}, {"K", ds.K},     {"p", ds.p},  {"C_pq", ds.C_pq},
                        {"C_s_alpha", Csa}, {"a0", a0}, {"lambda_floor", gap / (2 * a0)}};
  return r;
}

namespace detail {

inline Table base_table(const ExperimentConfig& c, std::vector<std::string> columns) {
  Table t;
  t.columns = std::move(columns);
  t.meta = {{"command", c.command}, {"master_seed", std::to_string(c.master_seed)}};
  return t;
}

inline EnsembleConfig ensemble(const ExperimentConfig& c, const HoppingModel& m, const DistributionSpec& d) {
  EnsembleConfig e{m, d, c.lambda, c.box_L, parse_bc(c.bc), c.n_realizations, c.master_seed, c.threads};
  e.validate();
  return e;
}

}  // namespace detail

struct RunOutput {
  std::vector<std::filesystem::path> files;
  json summary = json::object();
};

// Executes one subcommand; writes <out>/<command>*.csv plus a JSON sidecar.
inline RunOutput run(const ExperimentConfig& c) {
  const std::string& cmd = c.command;
  if (std::find(known_commands().begin(), known_commands().end(), cmd) == known_commands().end())
    throw Error("invalid config", "unknown command '" + cmd + "'");
  const HoppingModel m = model_from_json(c.model);
  const DistributionSpec d = distribution_from_json(c.distribution);
  const std::filesystem::path out(c.output);
  std::string stem = cmd;
  for (char& ch : stem)
    if (ch == '-') ch = '_';
  RunOutput res;
  std::vector<Table> tables;
  std::vector<std::string> names;
  auto emit = [&](Table t, const std::string& name) {
    tables.push_back(std::move(t));
    names.push_back(name);
  };

  if (cmd == "bloch") {
    const BandStructure bs = band_structure(m, c.k_grid);
    Table t = detail::base_table(c, {"band", "alpha", "beta", "gap_above", "gap_open"});
    for (std::size_t b = 0; b < bs.bands.size(); ++b) {
      const bool last = b + 1 == bs.bands.size();
      t.add({(long long)(b + 1), bs.bands[b][0], bs.bands[b][1], last ? 0.0 : bs.gaps[b],
             (long long)(last ? 0 : bs.gap_open[b])});
    }
    emit(t, stem);
  } else if (cmd == "chern") {
    Table t = detail::base_table(c, {"gap_index", "chern", "grid", "max_plaquette"});
    for (int i = 1; i < m.n; ++i) {
      const ChernResult r = chern_number(m, i, std::min(c.k_grid, 96L));
      t.add({(long long)i, (long long)r.value, (long long)r.grid, r.max_plaquette});
    }
    emit(t, stem);
  } else if (cmd == "phase-diagram") {
    if (c.model.value("type", "") != "haldane") throw Error("invalid config", "phase-diagram needs a haldane model");
    HaldaneParams base;
    if (c.model.contains("t1")) base.t1 = c.model["t1"].get<double>();
    if (c.model.contains("t2")) base.t2 = c.model["t2"].get<double>();
    const auto pts = haldane_phase_diagram(base, c.grid_phi, c.grid_M, c.M_max, 24);
    Table t = detail::base_table(c, {"phi", "M_over_t2", "C", "gapless"});
    for (const auto& p : pts) t.add({p.phi, p.M_over_t2, (long long)p.chern, (long long)p.gapless});
    emit(t, stem);
  } else if (cmd == "marker") {
    const auto rows = averaged_marker_scan(detail::ensemble(c, m, d), c.E_grid, c.lambda_grid, c.window_L);
    Table t = detail::base_table(c, {"E", "lambda", "marker_mean", "marker_stderr", "n_realizations", "max_imag_residual"});
    for (const auto& r : rows) t.add({r.E, r.lambda, r.mean, r.stderr_, (long long)r.n, r.max_imag_residual});
    emit(t, stem);
  } else if (cmd == "spectrum") {
    // almost-sure spectrum: each clean band widened by [-a lambda, +b lambda]
    const BandStructure bs = band_structure(m, c.k_grid);
    Table t = detail::base_table(c, {"lambda", "band", "lower", "upper"});
    for (double lam : c.lambda_grid)
      for (std::size_t b = 0; b < bs.bands.size(); ++b)
        t.add({lam, (long long)(b + 1), bs.bands[b][0] - d.a * lam, bs.bands[b][1] + d.b * lam});
    emit(t, stem);
    const EnsembleConfig e = detail::ensemble(c, m, d);
    const VecD ev = eigvalsh(e.op(0).matrix);
    Table u = detail::base_table(c, {"index", "eigenvalue"});
    for (long i = 0; i < ev.size(); ++i) u.add({(long long)i, ev(i)});
    emit(u, stem + "_eigenvalues");
  } else if (cmd == "thresholds") {
    res.summary = threshold_report(m, d, c.k_grid);
  } else if (cmd == "wegner") {
    const EnsembleConfig e = detail::ensemble(c, m, d);
    Table t = detail::base_table(c, {"E", "eps", "hits", "n", "empirical", "wilson_upper", "bound", "pass"});
    for (double E : c.E_grid)
      for (const auto& r : wegner_empirical(e, E, c.eps_grid))
        t.add({E, r.eps, (long long)r.hits, (long long)r.n, r.empirical, r.wilson_upper, r.bound, (long long)r.pass});
    emit(t, stem);
  } else if (cmd == "msa-probe") {
    Table t = detail::base_table(c, {"E", "L", "theta", "successes", "n", "estimate", "wilson_lo", "wilson_hi",
                                     "resonant", "median_ratio"});
    std::vector<long> Ls = c.L_grid.empty() ? std::vector<long>{c.box_L} : c.L_grid;
    for (long L : Ls) {
      ExperimentConfig cc = c;
      cc.box_L = L;
      const EnsembleConfig e = detail::ensemble(cc, m, d);
      for (double E : c.E_grid) {
        const SuitableResult r = suitable_box_probability(e, E, c.theta, m.r);
        t.add({E, (long long)L, c.theta, (long long)r.successes, (long long)r.n, r.estimate, r.ci.lo, r.ci.hi,
               (long long)r.resonant, r.median_ratio});
      }
    }
    emit(t, stem);
  } else if (cmd == "decay") {
    const double lo = *std::min_element(c.E_grid.begin(), c.E_grid.end());
    const double hi = *std::max_element(c.E_grid.begin(), c.E_grid.end());
    const DecayProfile p = projection_decay(detail::ensemble(c, m, d), lo, hi);
    Table t = detail::base_table(c, {"distance", "kernel_norm", "stderr"});
    for (const auto& r : p.rows) t.add({r.distance, r.mean, r.stderr_});
    emit(t, stem);
    res.summary = {{"fit_C", p.C}, {"fit_mu", p.mu}, {"fit_r2", p.r2}, {"fit_points", p.fit_points}};
  } else if (cmd == "ids") {
    Table t = detail::base_table(c, {"E", "N", "stderr"});
    for (const auto& r : ids_estimate(detail::ensemble(c, m, d), c.E_grid)) t.add({r.E, r.N, r.stderr_});
    emit(t, stem);
  } else if (cmd == "moments") {
    const Bump g{c.window_centre, c.window_width};
    const MomentResult r = time_averaged_moment(detail::ensemble(c, m, d), c.moment_p, g, c.T_grid);
    Table t = detail::base_table(c, {"T", "moment", "stderr"});
    for (const auto& row : r.rows) t.add({row.T, row.M, row.stderr_});
    emit(t, stem);
    res.summary["slope"] = r.slope;
    if (c.lambda == 0 && c.moment_p == 2 && m.B == 0) {
      const MomentResult b = bloch_moment_p2(m, g, c.T_grid, 64, c.threads);
      Table u = detail::base_table(c, {"T", "moment"});
      for (const auto& row : b.rows) u.add({row.T, row.M});
      emit(u, stem + "_bloch");
      res.summary["bloch_slope"] = b.slope;
    }
  }

  for (std::size_t i = 0; i < tables.size(); ++i) {
    const auto p = out / (names[i] + ".csv");
    write_csv(p, tables[i]);
    res.files.push_back(p);
  }
  json side;
  side["config"] = to_json(c);
  side["seed"] = c.master_seed;
  json fl = json::array();
  for (const auto& f : res.files) fl.push_back(f.filename().string());
  side["files"] = fl;
  side["results"] = res.summary;
  const auto sp = out / (stem + ".json");
  write_json(sp, side);
  res.files.push_back(sp);
  return res;
}

}  // namespace chernlab
