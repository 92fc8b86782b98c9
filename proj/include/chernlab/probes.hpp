#pragma once

#include "chernlab/bloch.hpp"
#include "chernlab/bounds.hpp"
#include "chernlab/core.hpp"
#include "chernlab/disorder.hpp"
#include "chernlab/finite_volume.hpp"
#include "chernlab/linalg.hpp"
#include "chernlab/stats.hpp"
#include "chernlab/topology.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

namespace chernlab {

struct EnsembleConfig {
  HoppingModel model;
  DistributionSpec spec;
  double lambda = 0;
  long box_L = 8;
  BC bc = BC::periodic;
  long n_realizations = 1;
  std::uint64_t master_seed = 0;
  int threads = 1;

  void validate() const {
    require(n_realizations >= 1, "invalid config", "need at least one realization");
    require(box_L >= 1, "invalid config", "box side must be positive");
    require(lambda >= 0, "invalid config", "lambda must be nonnegative");
  }
  Box box() const { return Box(box_L); }
  DisorderSample sample(std::uint64_t idx) const {
    return sample_potential(spec, box(), model.n, master_seed, idx);
  }
  FiniteOperator op(std::uint64_t idx, double lam) const { return restrict_box(model, sample(idx), lam, box(), bc); }
  FiniteOperator op(std::uint64_t idx) const { return op(idx, lambda); }
};

// sum of singular values of an n x n block
inline double trace_abs(const MatC& A) { return Eigen::JacobiSVD<MatC>(A).singularValues().sum(); }

// ---- Wegner ----

struct WegnerRow {
  double eps;
  long hits, n;
  double empirical, wilson_upper, bound;
  bool pass;
};

inline std::vector<WegnerRow> wegner_empirical(const EnsembleConfig& cfg, double E, const std::vector<double>& eps_grid) {
  cfg.validate();
  require(cfg.lambda > 0, "invalid config", "Wegner probe needs lambda > 0");
  const auto dist = parallel_map<double>(cfg.n_realizations, cfg.threads, [&](long i) {
    const VecD ev = eigvalsh(cfg.op(std::uint64_t(i)).matrix);
    return (ev.array() - E).abs().minCoeff();
  });
  const HolderData hd = holder_constant(cfg.spec);
  std::vector<WegnerRow> rows;
  for (double eps : eps_grid) {
    long hits = 0;
    for (double d : dist) hits += d < eps;
    const Interval ci = wilson(hits, cfg.n_realizations);
    const double bound = wegner_bound(cfg.model.n, hd.C_tau, hd.tau, cfg.box_L, eps, cfg.lambda);
    rows.push_back({eps, hits, cfg.n_realizations, double(hits) / double(cfg.n_realizations), ci.hi, bound,
                    ci.hi <= bound});
  }
  return rows;
}

// ---- suitable boxes ----

struct SuitableResult {
  long successes = 0, n = 0, resonant = 0;
  double estimate = 0;
  Interval ci{0, 1};
  double median_ratio = 0;  // median over realizations of max ||G|| * L^theta
};

inline SuitableResult suitable_box_probability(const EnsembleConfig& cfg, double E, double theta, long r) {
  cfg.validate();
  const Box box = cfg.box();
  const Box core = core_sites(box, r);
  const int n = cfg.model.n;
  std::vector<long> bcols, core_rows;
  const auto bnd = inner_boundary(box, r);
  for (const auto& x : bnd)
    for (int i = 0; i < n; ++i) bcols.push_back(box.rank(x) * n + i);
  for (const auto& x : core.sites()) core_rows.push_back(box.rank(x));
  const double thr = std::pow(double(box.L()), -theta);
  // ratio = max block norm / threshold, +inf on resonance
  const auto ratio = parallel_map<double>(cfg.n_realizations, cfg.threads, [&](long i) {
    const FiniteOperator op = cfg.op(std::uint64_t(i));
    MatC X;
    try {
      X = resolvent_columns(op, E, bcols);
    } catch (const Error& e) {
      if (e.label() != "resonant energy") throw;
      return std::numeric_limits<double>::infinity();
    }
    double worst = 0;
    for (long c : core_rows)
      for (std::size_t b = 0; b < bnd.size(); ++b)
        worst = std::max(worst, block_norm(X.block(c * n, long(b) * n, n, n)));
    return worst / thr;
  });
  SuitableResult res;
  res.n = cfg.n_realizations;
  for (double q : ratio) {
    res.successes += q <= 1.0;
    res.resonant += std::isinf(q);
  }
  res.estimate = double(res.successes) / double(res.n);
  res.ci = wilson(res.successes, res.n);
  std::vector<double> s = ratio;
  std::nth_element(s.begin(), s.begin() + long(s.size() / 2), s.end());
  res.median_ratio = s[s.size() / 2];
  return res;
}

// ---- projection kernel decay ----

struct DecayRow {
  double distance;
  double mean, stderr_;
};

struct DecayProfile {
  std::vector<DecayRow> rows;
  double C = 0, mu = 0, r2 = 0;  // fit mean ~ C exp(-mu d)
  long fit_points = 0;
};

namespace detail {

inline std::vector<long> centre_ranks(const Box& box, BC bc, long stride) {
  std::vector<long> out;
  const long margin = bc == BC::periodic ? 0 : box.L() / 4;
  for (std::size_t k = 0; k < box.size(); ++k) {
    const auto& x = box[k];
    if (x.g1 < box.lo() + margin || x.g1 > box.hi() - margin || x.g2 < box.lo() + margin || x.g2 > box.hi() - margin)
      continue;
    if (pos_mod(x.g1, stride) == 0 && pos_mod(x.g2, stride) == 0) out.push_back(long(k));
  }
  return out;
}

inline LatticePoint displacement(const Box& box, BC bc, LatticePoint from, LatticePoint to) {
  return bc == BC::periodic ? box.min_image(to - from) : to - from;
}

}  // namespace detail

inline DecayProfile projection_decay(const EnsembleConfig& cfg, double E_lo, double E_hi, int n_energies = 16,
                                     long centre_stride = 4, double floor = 1e-13) {
  cfg.validate();
  const Box box = cfg.box();
  const int n = cfg.model.n;
  const auto centres = detail::centre_ranks(box, cfg.bc, centre_stride);
  require(!centres.empty(), "invalid config", "no admissible centres");
  std::vector<double> Es;
  for (int k = 0; k < n_energies; ++k)
    Es.push_back(n_energies == 1 ? E_lo : E_lo + (E_hi - E_lo) * k / double(n_energies - 1));
  // distance classes keyed by |gamma|^2
  std::map<long, std::size_t> cls;
  for (long c : centres)
    for (std::size_t k = 0; k < box.size(); ++k) {
      const LatticePoint d = detail::displacement(box, cfg.bc, box[std::size_t(c)], box[k]);
      cls.try_emplace(d.g1 * d.g1 + d.g2 * d.g2, 0);
    }
  std::size_t idx = 0;
  for (auto& [k, v] : cls) v = idx++;
  const auto per = parallel_map<std::vector<double>>(cfg.n_realizations, cfg.threads, [&](long i) {
    const Eigensystem es = eigh(cfg.op(std::uint64_t(i)).matrix);
    std::vector<double> sum(cls.size(), 0.0), cnt(cls.size(), 0.0);
    for (long c : centres) {
      // sup over the energy grid per (centre, gamma)
      std::vector<double> best(box.size(), 0.0);
      for (double E : Es) {
        const long k = count_below(es.values, E);
        if (k == 0) continue;
        const MatC col = es.vectors.leftCols(k) * es.vectors.leftCols(k).middleRows(c * n, n).adjoint();
        for (std::size_t g = 0; g < box.size(); ++g)
          best[g] = std::max(best[g], trace_abs(col.middleRows(long(g) * n, n)));
      }
      for (std::size_t g = 0; g < box.size(); ++g) {
        const LatticePoint d = detail::displacement(box, cfg.bc, box[std::size_t(c)], box[g]);
        const std::size_t j = cls.at(d.g1 * d.g1 + d.g2 * d.g2);
        sum[j] += best[g];
        cnt[j] += 1;
      }
    }
    for (std::size_t j = 0; j < sum.size(); ++j) sum[j] = cnt[j] > 0 ? sum[j] / cnt[j] : 0;
    return sum;
  });
  DecayProfile prof;
  std::vector<double> fx, fy;
  for (const auto& [d2, j] : cls) {
    std::vector<double> xs;
    for (const auto& v : per) xs.push_back(v[j]);
    const MeanErr me = mean_stderr(xs);
    const double d = std::sqrt(double(d2));
    prof.rows.push_back({d, me.mean, me.stderr_});
    if (d2 > 0 && me.mean > floor) {
      fx.push_back(d);
      fy.push_back(std::log(me.mean));
    }
  }
  if (fx.size() >= 2) {
    const LinearFit f = linear_fit(fx, fy);
    prof.mu = -f.slope;
    prof.C = std::exp(f.intercept);
    prof.r2 = f.r2;
    prof.fit_points = long(fx.size());
  }
  return prof;
}

// ---- integrated density of states ----

struct IdsRow {
  double E, N, stderr_;
};

// Translation average over all sites of Tr P(x,x) equals rank / |box|.
inline std::vector<IdsRow> ids_estimate(const EnsembleConfig& cfg, const std::vector<double>& Es) {
  cfg.validate();
  const auto spectra = parallel_map<VecD>(cfg.n_realizations, cfg.threads,
                                          [&](long i) { return eigvalsh(cfg.op(std::uint64_t(i)).matrix); });
  const double vol = double(cfg.box_L * cfg.box_L);
  std::vector<IdsRow> rows;
  for (double E : Es) {
    std::vector<double> xs;
    for (const auto& ev : spectra) xs.push_back(double(count_below(ev, E)) / vol);
    const MeanErr me = mean_stderr(xs);
    rows.push_back({E, me.mean, me.stderr_});
  }
  return rows;
}

struct ContinuityCheck {
  double lhs = 0, lhs_upper = 0, rhs = 0;
  bool pass = false;
  double offdiag_lhs = 0, offdiag_upper = 0, offdiag_rhs = 0;
  bool offdiag_pass = false;
};

inline ContinuityCheck ids_continuity_check(const EnsembleConfig& cfg, double E1, double E2, long centre_stride = 4) {
  cfg.validate();
  require(cfg.lambda > 0, "invalid config", "IDS continuity needs lambda > 0");
  require(E2 >= E1, "invalid argument", "need E2 >= E1");
  const Box box = cfg.box();
  const int n = cfg.model.n;
  const auto centres = detail::centre_ranks(box, cfg.bc, centre_stride);
  struct Per {
    double diag = 0;
    std::map<std::pair<long, long>, double> off;  // displacement -> centre average
  };
  const auto per = parallel_map<Per>(cfg.n_realizations, cfg.threads, [&](long i) {
    const Eigensystem es = eigh(cfg.op(std::uint64_t(i)).matrix);
    Per p;
    const long k1 = count_below(es.values, E1), k2 = count_below(es.values, E2);
    p.diag = double(k2 - k1) / double(box.size());
    if (k2 > k1) {
      const auto W = es.vectors.middleCols(k1, k2 - k1);
      for (long c : centres) {
        const MatC col = W * W.middleRows(c * n, n).adjoint();
        for (std::size_t g = 0; g < box.size(); ++g) {
          const LatticePoint d = detail::displacement(box, cfg.bc, box[std::size_t(c)], box[g]);
          p.off[{d.g1, d.g2}] += trace_abs(col.middleRows(long(g) * n, n)) / double(centres.size());
        }
      }
    }
    return p;
  });
  const HolderData hd = holder_constant(cfg.spec);
  const double scale = std::pow(std::abs(E2 - E1) / cfg.lambda, hd.tau);
  ContinuityCheck r;
  std::vector<double> xs;
  for (const auto& p : per) xs.push_back(p.diag);
  MeanErr me = mean_stderr(xs);
  r.lhs = me.mean;
  r.lhs_upper = me.mean + kZ99 * me.stderr_;
  r.rhs = std::pow(2.0, 2 - hd.tau) * n * kPi * hd.C_tau * scale;
  r.pass = r.lhs_upper <= r.rhs;
  std::map<std::pair<long, long>, std::vector<double>> acc;
  for (const auto& p : per)
    for (const auto& [d, v] : p.off) acc[d];
  for (const auto& p : per)
    for (auto& [d, v] : acc) {
      auto it = p.off.find(d);
      v.push_back(it == p.off.end() ? 0.0 : it->second);
    }
  for (const auto& [d, v] : acc) {
    me = mean_stderr(v);
    if (me.mean + kZ99 * me.stderr_ > r.offdiag_upper) {
      r.offdiag_upper = me.mean + kZ99 * me.stderr_;
      r.offdiag_lhs = me.mean;
    }
  }
  r.offdiag_rhs = std::pow(2.0, 2 - hd.tau) * n * n * kPi * hd.C_tau * scale;
  r.offdiag_pass = r.offdiag_upper <= r.offdiag_rhs;
  return r;
}

// ---- continuity in the disorder strength ----

struct DisorderContinuity {
  std::vector<std::array<double, 2>> ladder;  // (d lambda, sup_gamma E Tr|dP(0,gamma)|)
  double exponent = 0;
  double target = 0;
  bool pass = false;
};

inline DisorderContinuity disorder_continuity_check(const EnsembleConfig& cfg, double lambda1, double lambda2, double E,
                                                    int rungs = 6, long centre_stride = 4) {
  cfg.validate();
  require(lambda1 >= 0 && lambda2 >= lambda1, "invalid argument", "need 0 <= lambda1 <= lambda2");
  const Box box = cfg.box();
  const int n = cfg.model.n;
  const auto centres = detail::centre_ranks(box, cfg.bc, centre_stride);
  std::vector<double> dl;
  for (int k = 0; k < rungs; ++k) dl.push_back((lambda2 - lambda1) * std::pow(0.5, k));
  // per realization, per rung: map displacement -> centre-averaged Tr|dP|
  using Rung = std::map<std::pair<long, long>, double>;
  const auto per = parallel_map<std::vector<Rung>>(cfg.n_realizations, cfg.threads, [&](long i) {
    const DisorderSample s = cfg.sample(std::uint64_t(i));
    auto proj_cols = [&](double lam) {
      const Eigensystem es = eigh(restrict_box(cfg.model, s, lam, box, cfg.bc).matrix);
      const long k = count_below(es.values, E);
      std::vector<MatC> cols;
      for (long c : centres) cols.push_back(es.vectors.leftCols(k) * es.vectors.leftCols(k).middleRows(c * n, n).adjoint());
      return cols;
    };
    const auto base = proj_cols(lambda1);
    std::vector<Rung> out;
    for (double d : dl) {
      const auto other = proj_cols(lambda1 + d);
      Rung r;
      for (std::size_t ci = 0; ci < centres.size(); ++ci) {
        const MatC diff = other[ci] - base[ci];
        for (std::size_t g = 0; g < box.size(); ++g) {
          const LatticePoint dd = detail::displacement(box, cfg.bc, box[std::size_t(centres[ci])], box[g]);
          r[{dd.g1, dd.g2}] += trace_abs(diff.middleRows(long(g) * n, n)) / double(centres.size());
        }
      }
      out.push_back(std::move(r));
    }
    return out;
  });
  DisorderContinuity res;
  const HolderData hd = holder_constant(cfg.spec);
  res.target = hd.tau / (hd.tau + 2);
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < dl.size(); ++k) {
    std::map<std::pair<long, long>, double> mean;
    for (const auto& p : per)
      for (const auto& [d, v] : p[k]) mean[d] += v / double(per.size());
    double sup = 0;
    for (const auto& [d, v] : mean) sup = std::max(sup, v);
    res.ladder.push_back({dl[k], sup});
    if (sup > 0) xs.push_back(dl[k]), ys.push_back(sup);
  }
  if (xs.size() >= 2) res.exponent = loglog_fit(xs, ys).slope;
  else res.exponent = std::numeric_limits<double>::infinity();  // identically zero differences
  res.pass = res.exponent >= res.target - 0.1;
  return res;
}

// ---- disorder-averaged marker ----

struct MarkerRow {
  double E, lambda, mean, stderr_;
  long n;
  double max_imag_residual;
};

inline std::vector<MarkerRow> averaged_marker_scan(const EnsembleConfig& base, const std::vector<double>& Es,
                                                   const std::vector<double>& lambdas, long window_L) {
  base.validate();
  const Box box = base.box();
  const int n = base.model.n;
  std::vector<MarkerRow> rows;
  for (double lam : lambdas) {
    const long R = lam == 0 ? 1 : base.n_realizations;
    const auto per = parallel_map<std::vector<MarkerResult>>(R, base.threads, [&](long i) {
      const Eigensystem es = eigh(base.op(std::uint64_t(i), lam).matrix);
      std::vector<MarkerResult> v;
      for (double E : Es) {
        const long k = count_below(es.values, E);
        v.push_back(chern_marker(MatC(es.vectors.leftCols(k)), box, n, window_L));
      }
      return v;
    });
    for (std::size_t e = 0; e < Es.size(); ++e) {
      std::vector<double> xs;
      double res = 0;
      for (const auto& p : per) xs.push_back(p[e].value), res = std::max(res, p[e].imag_residual);
      const MeanErr me = mean_stderr(xs);
      rows.push_back({Es[e], lam, me.mean, me.stderr_, me.n, res});
    }
  }
  return rows;
}

// ---- transport moments ----

// (1 - u^2)^4 on |u| < 1 with u = (E - centre) / half_width.
struct Bump {
  double centre = 0;
  double width = 1;
  double operator()(double E) const {
    const double u = (E - centre) / (0.5 * width);
    return std::abs(u) < 1 ? std::pow(1 - u * u, 4) : 0.0;
  }
  double derivative(double E) const {
    const double h = 0.5 * width, u = (E - centre) / h;
    return std::abs(u) < 1 ? 4 * std::pow(1 - u * u, 3) * (-2 * u) / h : 0.0;
  }
};

struct MomentRow {
  double T, M, stderr_;
};

struct MomentResult {
  std::vector<MomentRow> rows;
  double slope = 0;  // least-squares slope of log M against log T
};

// (2/T) int_0^inf e^{-2t/T} t^m e^{-i w t} dt
inline cplx time_average_kernel(double T, double w, int m) {
  const cplx z(2 / T, w);
  double fact = 1;
  for (int k = 2; k <= m; ++k) fact *= k;
  return (2 / T) * fact / std::pow(z, m + 1);
}

inline MomentResult time_averaged_moment(const EnsembleConfig& cfg, double p, const Bump& g, const std::vector<double>& Ts) {
  cfg.validate();
  require(p >= 0, "invalid argument", "moment order must be nonnegative");
  const Box box = cfg.box();
  const int n = cfg.model.n;
  const long N = long(box.size()) * n;
  VecD wx(N);
  double maxlog = 0;
  for (std::size_t k = 0; k < box.size(); ++k) {
    const LatticePoint d = detail::displacement(box, cfg.bc, LatticePoint{0, 0}, box[k]);
    const double x2 = 1 + double(d.g1 * d.g1 + d.g2 * d.g2);
    maxlog = std::max(maxlog, 0.5 * p * std::log10(x2));
    for (int i = 0; i < n; ++i) wx(long(k) * n + i) = std::pow(x2, 0.5 * p);
  }
  require(maxlog < 300, "overflow", "p times log box size exceeds double range");
  const long origin = box.rank({0, 0});
  const auto per = parallel_map<std::vector<double>>(cfg.n_realizations, cfg.threads, [&](long r) {
    const Eigensystem es = eigh(cfg.op(std::uint64_t(r)).matrix);
    std::vector<long> sel;
    for (long a = 0; a < N; ++a)
      if (g(es.values(a)) > 0) sel.push_back(a);
    std::vector<double> out(Ts.size(), 0.0);
    if (sel.empty()) return out;
    const long m = long(sel.size());
    MatC Vs(N, m);
    VecD Es(m);
    for (long j = 0; j < m; ++j) Vs.col(j) = es.vectors.col(sel[std::size_t(j)]), Es(j) = es.values(sel[std::size_t(j)]);
    for (int i = 0; i < n; ++i) {
      // U(x,a) = psi_a(x) g(E_a) conj(psi_a(origin,i))
      MatC U(N, m);
      for (long j = 0; j < m; ++j) U.col(j) = Vs.col(j) * (g(Es(j)) * std::conj(Vs(origin * n + i, j)));
      const MatC WU = wx.asDiagonal() * U;
      const MatC G = U.adjoint() * WU;  // G(b,a) = sum_x w_x conj(U(x,b)) U(x,a)
      for (std::size_t t = 0; t < Ts.size(); ++t) {
        cplx acc = 0;
        for (long a = 0; a < m; ++a)
          for (long b = 0; b < m; ++b) acc += G(b, a) * time_average_kernel(Ts[t], Es(a) - Es(b), 0);
        out[t] += acc.real();
      }
    }
    return out;
  });
  MomentResult res;
  std::vector<double> xs, ys;
  for (std::size_t t = 0; t < Ts.size(); ++t) {
    std::vector<double> v;
    for (const auto& p : per) v.push_back(p[t]);
    const MeanErr me = mean_stderr(v);
    res.rows.push_back({Ts[t], me.mean, me.stderr_});
    if (me.mean > 0) xs.push_back(Ts[t]), ys.push_back(me.mean);
  }
  if (xs.size() >= 2) res.slope = loglog_fit(xs, ys).slope;
  return res;
}

// Infinite-volume p = 2 moment of a clean periodic model from Bloch data:
// sum_x (1+|x|^2)|psi_t(x)|^2 = int dk/(2pi)^2 (|phi_t|^2 + |d1 phi_t|^2 + |d2 phi_t|^2),
// with d_j of the matrix function from divided differences and the time
// average of t^m e^{-iwt} taken in closed form.
inline MomentResult bloch_moment_p2(const HoppingModel& m, const Bump& g, const std::vector<double>& Ts, long nk = 64,
                                    int threads = 1) {
  require(m.B == 0.0, "flux", "Bloch moment needs B = 0");
  const int n = m.n;
  auto dH = [&](KPoint k, int j) {
    MatC D = m.zero();
    for (const auto& [d, h] : m.hoppings) {
      const double dj = double(j == 0 ? d.g1 : d.g2);
      if (dj != 0) D += cplx(0, dj) * std::polar(1.0, k[0] * double(d.g1) + k[1] * double(d.g2)) * h;
    }
    return D;
  };
  const auto rows = parallel_map<std::vector<double>>(nk, threads, [&](long i1) {
    std::vector<double> acc(Ts.size(), 0.0);
    for (long i2 = 0; i2 < nk; ++i2) {
      const KPoint k{2 * kPi * (double(i1) + 0.5) / double(nk), 2 * kPi * (double(i2) + 0.5) / double(nk)};
      const BlochEig be = bloch_eig(m, k);
      const VecD& E = be.values;
      const MatC D[2] = {be.vectors.adjoint() * dH(k, 0) * be.vectors, be.vectors.adjoint() * dH(k, 1) * be.vectors};
      for (int orb = 0; orb < n; ++orb) {
        const VecC c = be.vectors.row(orb).adjoint();  // V^dagger e_orb
        double base = 0;
        for (int b = 0; b < n; ++b) base += std::norm(g(E(b)) * c(b));
        for (std::size_t t = 0; t < Ts.size(); ++t) acc[t] += base;
        for (int j = 0; j < 2; ++j) {
          // y_a(t) = sum_e e^{-i t E_e} (al(a,e) + be(a,e) t)
          MatC al = MatC::Zero(n, n), bt = MatC::Zero(n, n);
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
              const cplx w = D[j](a, b) * c(b);
              if (std::abs(E(a) - E(b)) > 1e-10) {
                al(a, a) += w * g(E(a)) / (E(a) - E(b));
                al(a, b) -= w * g(E(b)) / (E(a) - E(b));
              } else {
                al(a, a) += w * g.derivative(E(a));
                bt(a, a) += w * cplx(0, -g(E(a)));
              }
            }
          for (std::size_t t = 0; t < Ts.size(); ++t) {
            cplx s = 0;
            for (int a = 0; a < n; ++a)
              for (int e = 0; e < n; ++e)
                for (int f = 0; f < n; ++f) {
                  const double w = E(e) - E(f);
                  s += al(a, e) * std::conj(al(a, f)) * time_average_kernel(Ts[t], w, 0) +
                       (al(a, e) * std::conj(bt(a, f)) + bt(a, e) * std::conj(al(a, f))) * time_average_kernel(Ts[t], w, 1) +
                       bt(a, e) * std::conj(bt(a, f)) * time_average_kernel(Ts[t], w, 2);
                }
            acc[t] += s.real();
          }
        }
      }
    }
    return acc;
  });
  MomentResult res;
  std::vector<double> xs, ys;
  for (std::size_t t = 0; t < Ts.size(); ++t) {
    double s = 0;
    for (const auto& r : rows) s += r[t];
    s /= double(nk * nk);
    res.rows.push_back({Ts[t], s, 0.0});
    if (s > 0) xs.push_back(Ts[t]), ys.push_back(s);
  }
  if (xs.size() >= 2) res.slope = loglog_fit(xs, ys).slope;
  return res;
}

inline std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> v;
  for (int k = 0; k < count; ++k) v.push_back(count == 1 ? lo : lo * std::pow(hi / lo, k / double(count - 1)));
  return v;
}

}  // namespace chernlab
