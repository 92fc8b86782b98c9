// Acceptance suite: one PASS/FAIL line per criterion, CSV evidence under --out.
#include "chernlab/runner.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <set>

using namespace chernlab;
namespace fs = std::filesystem;

namespace {

// pinned tolerances
constexpr double kPhaseCurveMargin = 0.1;
constexpr double kPhaseRuntime = 60.0;
constexpr double kGapTarget = 2.0, kGapTol = 0.005;
constexpr double kKTarget = 22.96, kKTol = 0.05;
constexpr double kA0Target = 2.4e30, kFloorTarget = 4.1e-31, kFactor = 1.15;
constexpr double kCoeffMax = 39.98, kCoeffMin = 35.0, kPipelineRuntime = 10.0;
constexpr double kMarkerTol = 0.15;
constexpr double kIdentityTol = 1e-6, kBlochTol = 1e-9;
constexpr double kWeakMarkerTol = 0.2, kStrongMarkerTol = 0.25, kJumpMin = 0.5;
constexpr double kSuitableMin = 0.9;
constexpr double kBallisticMin = 1.5, kLocalizedMax = 0.3;

struct Clock {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
};

std::string fmt(const char* f, double x) {
  char b[64];
  std::snprintf(b, sizeof b, f, x);
  return b;
}

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::cout << "criterion " << id << " [" << name << "]: " << (ok ? "PASS" : "FAIL") << "  " << detail << std::endl;
  failures += !ok;
}

Table table(std::vector<std::string> cols, const std::string& criterion) {
  Table t;
  t.columns = std::move(cols);
  t.meta = {{"criterion", criterion}};
  return t;
}

void save(const fs::path& out, const std::string& name, Table t, double runtime) {
  t.meta.push_back({"runtime_seconds", fmt("%.3f", runtime)});
  write_csv(out / (name + ".csv"), t);
}

// Distance in the (phi, M/t2) plane to the curve M/t2 = +-3 sqrt(3) sin(phi).
double distance_to_phase_curve(double phi, double mt) {
  double best = 1e300;
  const int K = 20000;
  for (int k = 0; k <= K; ++k) {
    const double p = -kPi + 2 * kPi * k / K;
    const double m = 3 * std::sqrt(3.0) * std::sin(p);
    best = std::min({best, std::hypot(phi - p, mt - m), std::hypot(phi - p, mt + m)});
  }
  return best;
}

long expected_chern(double phi, double mt) {
  const double edge = 3 * std::sqrt(3.0) * std::abs(std::sin(phi));
  if (std::abs(mt) >= edge) return 0;
  return std::sin(phi) > 0 ? -1 : 1;
}

void criterion1(const fs::path& out) {
  Clock c;
  const auto pts = haldane_phase_diagram(HaldaneParams{}, 41, 41, 6.0, 24);
  const double rt = c.seconds();
  Table t = table({"phi", "M_over_t2", "C", "gapless", "expected", "distance_to_curve"}, "1");
  long far = 0, ok = 0, bad_value = 0;
  for (const auto& p : pts) {
    const double dist = distance_to_phase_curve(p.phi, p.M_over_t2);
    const long ex = expected_chern(p.phi, p.M_over_t2);
    bad_value += p.chern < -1 || p.chern > 1;
    if (dist > kPhaseCurveMargin) {
      ++far;
      ok += !p.gapless && p.chern == ex;
    }
    t.add({p.phi, p.M_over_t2, (long long)p.chern, (long long)p.gapless, (long long)ex, dist});
  }
  save(out, "c1_phase_diagram", t, rt);
  const bool pass = far > 0 && ok == far && bad_value == 0 && rt < kPhaseRuntime;
  report(1, "phase diagram", pass,
         std::to_string(ok) + "/" + std::to_string(far) + " far points correct, runtime " + fmt("%.1f", rt) + " s");
}

void criterion2(const fs::path& out) {
  Clock c;
  const BandStructure bs = band_structure(haldane_model(HaldaneParams{}), 201);
  Table t = table({"band", "alpha", "beta"}, "2");
  for (std::size_t b = 0; b < bs.bands.size(); ++b) t.add({(long long)(b + 1), bs.bands[b][0], bs.bands[b][1]});
  save(out, "c2_bands", t, c.seconds());
  const double g = bs.gap(1);
  report(2, "gap size", std::abs(g - kGapTarget) <= kGapTol, "gap " + fmt("%.6f", g));
}

void criterion3(const fs::path& out) {
  Clock c;
  const WorkedExample w = worked_example(HaldaneParams{}, 2.0);
  const double rt = c.seconds();
  Table t = table({"name", "value"}, "3");
  for (const auto& [k, v] : std::vector<std::pair<std::string, double>>{{"gap", w.gap},
                                                                         {"alpha", w.alpha},
                                                                         {"S_alpha_exact", w.S_alpha_exact},
                                                                         {"K", w.ds.K},
                                                                         {"p", w.ds.p},
                                                                         {"C_pq", w.ds.C_pq},
                                                                         {"C_s_alpha", w.C_s_alpha},
                                                                         {"a0", w.a0},
                                                                         {"lambda_floor", w.lambda_floor},
                                                                         {"threshold", w.threshold.value},
                                                                         {"threshold_s", w.threshold.s},
                                                                         {"coefficient", w.threshold_coefficient}})
    t.add({k, v});
  save(out, "c3_constants", t, rt);
  const bool kok = std::abs(w.ds.K - kKTarget) <= kKTol;
  const bool aok = w.a0 / kA0Target <= kFactor && kA0Target / w.a0 <= kFactor;
  const bool fok = w.lambda_floor / kFloorTarget <= kFactor && kFloorTarget / w.lambda_floor <= kFactor;
  const bool cok = w.threshold_coefficient <= kCoeffMax && w.threshold_coefficient >= kCoeffMin;
  report(3, "explicit constants", kok && aok && fok && cok && rt < kPipelineRuntime,
         "K " + fmt("%.4f", w.ds.K) + ", a0 " + fmt("%.4g", w.a0) + ", floor " + fmt("%.4g", w.lambda_floor) +
             ", coefficient " + fmt("%.3f", w.threshold_coefficient) + ", runtime " + fmt("%.2f", rt) + " s");
}

void criterion4(const fs::path& out) {
  Clock c;
  Table t = table({"phi", "marker", "chern_number", "imag_residual"}, "4");
  bool pass = true;
  std::vector<double> markers;
  for (double phi : {kPi / 2, -kPi / 2}) {
    HaldaneParams hp;
    hp.phi = phi;
    const HoppingModel m = haldane_model(hp);
    const Box box(24);
    const Eigensystem es = eigh(restrict_periodic(m, zero_sample(box, 2), 0.0, box).matrix);
    const long k = count_below(es.values, 0.0);
    const MarkerResult mk = chern_marker(MatC(es.vectors.leftCols(k)), box, 2, 8);
    const long cn = chern_number(m, 1, 48).value;
    pass = pass && std::abs(mk.value - double(cn)) <= kMarkerTol;
    markers.push_back(mk.value);
    t.add({phi, mk.value, (long long)cn, mk.imag_residual});
  }
  pass = pass && markers[0] * markers[1] < 0;
  save(out, "c4_marker", t, c.seconds());
  report(4, "marker vs Chern number", pass, "marker(+pi/2) " + fmt("%.5f", markers[0]) + ", marker(-pi/2) " +
                                                fmt("%.5f", markers[1]));
}

void criterion5(const fs::path& out) {
  Clock c;
  Table t = table({"check", "value"}, "5");
  const HoppingModel m = haldane_model(HaldaneParams{});
  // (a) commutator marker against triple sum, clean and disordered, full-box window
  double id_err = 0;
  for (double lam : {0.0, 1.0}) {
    const Box box(10);
    const DisorderSample s = sample_potential(truncated_gaussian(2.0), box, 2, 55, 0);
    const FiniteOperator op = restrict_simple(m, s, lam, box);
    const ProjectionMatrix P = spectral_projection(op, 0.0);
    const double a = chern_marker(P, 10).value, b = chern_marker_triple(P, 10);
    id_err = std::max(id_err, std::abs(a - b));
    t.add({"marker_minus_triple_lambda_" + fmt("%g", lam), a - b});
  }
  // (b) periodic and simple restrictions agree entry by entry on rows away from the edge
  HoppingModel mag = m;
  mag.B = 2 * kPi / 4;
  long mismatched = 0, compared = 0;
  for (const HoppingModel* mm : {&m, static_cast<const HoppingModel*>(&mag)}) {
    const Box box(12);
    const DisorderSample s = sample_potential(truncated_gaussian(2.0), box, 2, 56, 0);
    const FiniteOperator ps = restrict_simple(*mm, s, 1.0, box), pp = restrict_periodic(*mm, s, 1.0, box);
    for (std::size_t k = 0; k < box.size(); ++k) {
      const LatticePoint x = box[k];
      if (x.g1 - mm->r < box.lo() || x.g1 + mm->r > box.hi() || x.g2 - mm->r < box.lo() || x.g2 + mm->r > box.hi())
        continue;
      for (long j = 0; j < ps.dim(); ++j)
        for (int i = 0; i < 2; ++i) {
          ++compared;
          mismatched += ps.matrix(long(k) * 2 + i, j) != pp.matrix(long(k) * 2 + i, j);
        }
    }
  }
  t.add({"interior_entries_compared", double(compared)});
  t.add({"interior_entries_mismatched", double(mismatched)});
  // (c) clean periodic eigenvalues equal the Bloch spectrum sampled on the box's k-grid
  const Box box(12);
  const VecD ev = eigvalsh(restrict_periodic(m, zero_sample(box, 2), 0.0, box).matrix);
  std::vector<double> oracle;
  for (long i = 0; i < 12; ++i)
    for (long j = 0; j < 12; ++j) {
      MatC H = MatC::Zero(2, 2);
      for (const auto& [d, h] : m.hoppings) H += std::polar(1.0, 2 * kPi * (double(i * d.g1) + double(j * d.g2)) / 12) * h;
      Eigen::SelfAdjointEigenSolver<MatC> se(H);
      for (int b = 0; b < 2; ++b) oracle.push_back(se.eigenvalues()(b));
    }
  std::sort(oracle.begin(), oracle.end());
  const BandStructure bs = band_structure(m, 201);
  double dev = 0, outside = 0;
  for (long i = 0; i < ev.size(); ++i) {
    dev = std::max(dev, std::abs(ev(i) - oracle[std::size_t(i)]));
    double d = 1e300;
    for (const auto& b : bs.bands) d = std::min(d, std::max({0.0, b[0] - ev(i), ev(i) - b[1]}));
    outside = std::max(outside, d);
  }
  t.add({"bloch_grid_max_deviation", dev});
  t.add({"max_distance_outside_bands", outside});
  save(out, "c5_identities", t, c.seconds());
  const bool pass = id_err <= kIdentityTol && mismatched == 0 && compared > 0 && dev <= kBlochTol && outside <= kBlochTol;
  report(5, "exact identities", pass,
         "marker-triple " + fmt("%.2e", id_err) + ", mismatched entries " + std::to_string(mismatched) + "/" +
             std::to_string(compared) + ", Bloch deviation " + fmt("%.2e", dev) + ", outside bands " +
             fmt("%.2e", outside));
}

void criterion6(const fs::path& out, int threads) {
  Clock c;
  const EnsembleConfig cfg{haldane_model(HaldaneParams{}), uniform_dist(1, 1), 2.0, 8, BC::periodic, 3000, 6006, threads};
  const auto rows = wegner_empirical(cfg, 0.0, {1e-2, 1e-3, 1e-4});
  Table t = table({"eps", "hits", "n", "empirical", "wilson_upper", "bound"}, "6");
  bool pass = true;
  std::string detail;
  for (const auto& r : rows) {
    t.add({r.eps, (long long)r.hits, (long long)r.n, r.empirical, r.wilson_upper, r.bound});
    pass = pass && r.wilson_upper <= r.bound;
    detail += "eps " + fmt("%g", r.eps) + ": " + fmt("%.4f", r.wilson_upper) + " <= " + fmt("%.4f", r.bound) + "; ";
  }
  save(out, "c6_wegner", t, c.seconds());
  report(6, "Wegner estimate", pass, detail);
}

double strong_threshold() {
  return strong_disorder_threshold(haldane_model(HaldaneParams{}), truncated_gaussian(2.0)).value;
}

void criterion7(const fs::path& out, int threads) {
  Clock c;
  const double lam_hi = 1.5 * strong_threshold();
  EnsembleConfig cfg{haldane_model(HaldaneParams{}), truncated_gaussian(2.0), 0.0, 18, BC::periodic, 200, 7007, threads};
  const auto rows = averaged_marker_scan(cfg, {0.0}, {0.1, lam_hi}, 6);
  Table t = table({"E", "lambda", "marker_mean", "marker_stderr", "n_realizations"}, "7");
  for (const auto& r : rows) t.add({r.E, r.lambda, r.mean, r.stderr_, (long long)r.n});
  save(out, "c7_marker_scan", t, c.seconds());
  const double weak = rows[0].mean, strong = rows[1].mean;
  const bool pass = std::abs(weak + 1) <= kWeakMarkerTol && std::abs(strong) <= kStrongMarkerTol &&
                    std::abs(weak - strong) >= kJumpMin && rows[0].n >= 200 && rows[1].n >= 200;
  report(7, "marker jump", pass,
         "lambda 0.1: " + fmt("%.4f", weak) + ", lambda " + fmt("%.2f", lam_hi) + ": " + fmt("%.4f", strong));
}

void criterion8(const fs::path& out, int threads) {
  Clock c;
  const double lam = 0.5, theta = 3.0;
  const DistributionSpec d = truncated_gaussian(2.0);
  const HoppingModel m = haldane_model(HaldaneParams{});
  const double E = band_structure(m, 201).bands.front()[0] - d.a * lam;  // lower edge of the almost-sure spectrum
  Table t = table({"L", "E", "theta", "successes", "n", "estimate", "wilson_lo", "wilson_hi", "median_ratio"}, "8");
  std::vector<double> est;
  for (long L : {7L, 13L, 19L}) {
    const EnsembleConfig cfg{m, d, lam, L, BC::simple, 500, 8008, threads};
    const SuitableResult r = suitable_box_probability(cfg, E, theta, m.r);
    est.push_back(r.estimate);
    t.add({(long long)L, E, theta, (long long)r.successes, (long long)r.n, r.estimate, r.ci.lo, r.ci.hi, r.median_ratio});
  }
  save(out, "c8_suitable_boxes", t, c.seconds());
  const bool pass = est[0] <= est[1] && est[1] <= est[2] && est[2] >= kSuitableMin;
  report(8, "suitable-box trend", pass,
         "P(L=7,13,19) = " + fmt("%.3f", est[0]) + ", " + fmt("%.3f", est[1]) + ", " + fmt("%.3f", est[2]));
}

void criterion9(const fs::path& out, int threads) {
  Clock c;
  const HoppingModel m = haldane_model(HaldaneParams{});
  const Bump g{-2.0, 2.4};  // lower band
  const std::vector<double> Ts{1, 2, 5, 10, 20, 50, 100};
  const MomentResult clean = bloch_moment_p2(m, g, Ts, 64, threads);
  const double lam = 2 * strong_threshold();
  const EnsembleConfig cfg{m, truncated_gaussian(2.0), lam, 20, BC::periodic, 100, 9009, threads};
  const MomentResult dl = time_averaged_moment(cfg, 2.0, g, Ts);
  Table t = table({"T", "clean_moment", "disordered_moment", "disordered_stderr"}, "9");
  for (std::size_t i = 0; i < Ts.size(); ++i) t.add({Ts[i], clean.rows[i].M, dl.rows[i].M, dl.rows[i].stderr_});
  t.meta.push_back({"lambda_disordered", format_double(lam)});
  save(out, "c9_moments", t, c.seconds());
  report(9, "transport contrast", clean.slope >= kBallisticMin && dl.slope <= kLocalizedMax,
         "clean slope " + fmt("%.3f", clean.slope) + ", slope at lambda " + fmt("%.2f", lam) + ": " +
             fmt("%.3f", dl.slope));
}

int compare(const fs::path& a, const fs::path& b) {
  std::set<std::string> na, nb;
  for (const auto& e : fs::directory_iterator(a))
    if (e.path().extension() == ".csv") na.insert(e.path().filename().string());
  for (const auto& e : fs::directory_iterator(b))
    if (e.path().extension() == ".csv") nb.insert(e.path().filename().string());
  long differing = 0;
  for (const auto& f : na)
    if (!nb.count(f) || csv_body(read_text(a / f)) != csv_body(read_text(b / f))) ++differing;
  const bool pass = !na.empty() && na == nb && differing == 0;
  report(10, "determinism", pass,
         std::to_string(na.size()) + " CSV files compared, " + std::to_string(differing) + " differ");
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  pin_blas_single_thread();
  CLI::App app{"acceptance suite"};
  int threads = 1;
  std::string out = "acceptance_out";
  std::vector<std::string> cmp;
  std::vector<int> only;
  app.add_option("--threads", threads, "worker threads (0 = auto)");
  app.add_option("--out", out, "directory for CSV evidence");
  app.add_option("--compare", cmp, "compare CSV bodies of two earlier runs")->expected(2);
  app.add_option("--only", only, "run a subset of criteria");
  CLI11_PARSE(app, argc, argv);
  try {
    if (!cmp.empty()) return compare(cmp[0], cmp[1]);
    const fs::path o(out);
    fs::create_directories(o);
    auto want = [&](int k) { return only.empty() || std::find(only.begin(), only.end(), k) != only.end(); };
    if (want(1)) criterion1(o);
    if (want(2)) criterion2(o);
    if (want(3)) criterion3(o);
    if (want(4)) criterion4(o);
    if (want(5)) criterion5(o);
    if (want(6)) criterion6(o, threads);
    if (want(7)) criterion7(o, threads);
    if (want(8)) criterion8(o, threads);
    if (want(9)) criterion9(o, threads);
  } catch (const std::exception& e) {
    std::cout << "acceptance aborted: " << e.what() << std::endl;
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
