#pragma once

#include "chernlab/bloch.hpp"
#include "chernlab/core.hpp"
#include "chernlab/disorder.hpp"
#include "chernlab/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

namespace chernlab {

inline double block_norm(const MatC& h) { return Eigen::JacobiSVD<MatC>(h).singularValues()(0); }

// sup_gamma sum_xi ||H(gamma,xi)|| (e^{alpha|gamma-xi|} - 1), exact 2-norms.
inline double combes_thomas_salpha(const HoppingModel& m, double alpha) {
  require(alpha > 0, "invalid argument", "alpha must be positive");
  double s = 0;
  for (const auto& [d, h] : m.hoppings)
    if (d != LatticePoint{0, 0}) s += block_norm(h) * std::expm1(alpha * norm(d));
  return s;
}

// Entrywise over-bound: ||A|| <= n max|A_ij| (max|A_ij| for diagonal A), every
// exponential bounded by the longest displacement. Returns the coefficient c with
// S_alpha <= c (e^{alpha r_max} - 1), and r_max.
struct SalphaOverbound {
  double coefficient = 0;
  double r_max = 0;
  double operator()(double alpha) const { return coefficient * std::expm1(alpha * r_max); }
};

inline SalphaOverbound salpha_overbound(const HoppingModel& m) {
  double hmax = 0;
  for (const auto& [d, h] : m.hoppings) hmax = std::max(hmax, h.cwiseAbs().maxCoeff());
  SalphaOverbound ob;
  for (const auto& [d, h] : m.hoppings) {
    if (d == LatticePoint{0, 0} || h.cwiseAbs().maxCoeff() == 0) continue;
    MatC off = h;
    off.diagonal().setZero();
    const bool diag = off.cwiseAbs().maxCoeff() == 0;
    ob.coefficient += (diag ? 1.0 : double(m.n)) * hmax;
    ob.r_max = std::max(ob.r_max, norm(d));
  }
  return ob;
}

// alpha with 2 * overbound(alpha) = gap / 2, so that 2 S_alpha <= gap / 2.
inline double alpha_for_gap(const SalphaOverbound& ob, double gap) {
  require(ob.coefficient > 0 && gap > 0, "invalid argument", "need hopping and an open gap");
  return std::log1p(gap / (4 * ob.coefficient)) / ob.r_max;
}

struct CTBound {
  double prefactor;
  double rate;
};

inline CTBound combes_thomas_rate(double S_alpha, double alpha, double Delta) {
  require(Delta > 0, "invalid argument", "distance to the spectrum must be positive");
  if (Delta >= 2 * S_alpha) return {2 / Delta, alpha};
  return {2 / Delta, alpha * Delta / (2 * S_alpha)};
}

// ---- strong disorder ----

// tau (2^tau C_tau)^{s/tau} / (tau - s). The 2^tau makes C_tau the interval
// constant of rho([u,u+t]) <= C t^tau applied to the symmetric window [E-t,E+t].
inline double c_s_tau(double s, double tau, double C_tau) {
  return tau * std::pow(std::pow(2.0, tau) * C_tau, s / tau) / (tau - s);
}

// sup_(gamma,i) sum_{(xi,j) != (gamma,i)} |H|^s e^{mu |gamma - xi|}
inline double off_diagonal_sum(const HoppingModel& m, double s, double mu) {
  double best = 0;
  for (int i = 0; i < m.n; ++i) {
    double acc = 0;
    for (const auto& [d, h] : m.hoppings)
      for (int j = 0; j < m.n; ++j) {
        if (d == LatticePoint{0, 0} && i == j) continue;
        const double v = std::abs(h(i, j));
        if (v > 0) acc += std::pow(v, s) * std::exp(mu * norm(d));
      }
    best = std::max(best, acc);
  }
  return best;
}

struct ThresholdReport {
  double value = 0;
  double s = 0;
  double mu = 0;
  long grid_s = 0;
  long grid_mu = 0;
};

inline double lambda_s_mu(const HoppingModel& m, const HolderData& hd, double s, double mu) {
  const double f = off_diagonal_sum(m, s, mu);
  if (f == 0) return 0;
  return std::pow(c_s_tau(s, hd.tau, hd.C_tau) * f, 1 / s);
}

inline ThresholdReport strong_disorder_threshold(const HoppingModel& m, const DistributionSpec& spec,
                                                 std::vector<double> s_grid = {}, std::vector<double> mu_grid = {}) {
  const HolderData hd = holder_constant(spec);
  if (s_grid.empty()) {
    const double lo = 0.01 * hd.tau, hi = 0.99 * hd.tau;
    for (int k = 0; k < 64; ++k) s_grid.push_back(lo * std::pow(hi / lo, k / 63.0));
  }
  if (mu_grid.empty()) {
    mu_grid.push_back(0.0);
    for (int k = 0; k < 31; ++k) mu_grid.push_back(0.01 * std::pow(200.0, k / 30.0));
  }
  for (double s : s_grid) require(s > 0 && s < hd.tau, "invalid grid", "s must lie in (0, tau)");
  ThresholdReport rep;
  rep.grid_s = long(s_grid.size());
  rep.grid_mu = long(mu_grid.size());
  rep.value = std::numeric_limits<double>::infinity();
  std::size_t best_k = 0;
  for (std::size_t k = 0; k < s_grid.size(); ++k)
    for (double mu : mu_grid) {
      const double v = lambda_s_mu(m, hd, s_grid[k], mu);
      if (v < rep.value) rep = {v, s_grid[k], mu, rep.grid_s, rep.grid_mu}, best_k = k;
    }
  if (rep.value == 0) return rep;
  // golden-section refinement in s on the neighbouring cells at the best mu
  double a = s_grid[best_k == 0 ? 0 : best_k - 1];
  double b = s_grid[std::min(best_k + 1, s_grid.size() - 1)];
  const double g = 0.5 * (std::sqrt(5.0) - 1);
  auto f = [&](double s) { return lambda_s_mu(m, hd, s, rep.mu); };
  double c = b - g * (b - a), d = a + g * (b - a);
  for (int it = 0; it < 100 && b - a > 1e-12; ++it) {
    if (f(c) < f(d)) b = d; else a = c;
    c = b - g * (b - a);
    d = a + g * (b - a);
  }
  const double s_opt = 0.5 * (a + b), v = f(s_opt);
  if (v < rep.value) rep.value = v, rep.s = s_opt;
  return rep;
}

// ---- sigma-moment regularity ----

struct DsBound {
  double K;
  double p;
  double C_pq;
};

inline DsBound d_s1_bound(double B_mom, double C_mom, double s, double t, double q) {
  require(t > 0 && t <= 1 && q > 0, "invalid argument", "need t in (0,1] and q > 0");
  require(s > 0 && s < 1 / (1 + 2 / t + 1 / q), "inadmissible s", "s must be below [1 + 2/t + 1/q]^{-1}");
  const double p = s / (1 - 2 * s / t);
  const double Cpq = 1 + p * std::pow(std::pow(2.0, q) * C_mom, 1 / (1 + q)) / (q / (1 + q) - p);
  const double Bs = std::pow(B_mom, s / t);
  const double K = std::max(5 * std::pow(2 * B_mom, s / t), std::pow(2.0, 2 * s + 1) * Bs * (1 + Bs * Cpq));
  return {K, p, Cpq};
}

// a-independent moment data of the truncated Gaussian family (a >= 1):
// int |v| rho_a <= sqrt(e), int rho_a^{1+q} <= sqrt(2/(q+1)) sqrt(pi) e^{(q+1)/2} / 2^{q+1}.
struct MomentData {
  double B;
  double C;
};
inline MomentData truncated_gaussian_moment_bounds(double q) {
  return {std::sqrt(std::exp(1.0)),
          std::sqrt(2 / (q + 1)) * std::sqrt(kPi) * std::exp((q + 1) / 2) / std::pow(2.0, q + 1)};
}
// Actual values for one a, for checking the bounds.
inline MomentData moment_data(const DistributionSpec& d, double q, double t = 1.0) {
  double B = 0, C = 0;
  const int K = 20000;
  const double h = (d.a + d.b) / K;
  for (int i = 0; i < K; ++i) {
    const double v = -d.a + (i + 0.5) * h, r = d.pdf(v);
    B += std::pow(std::abs(v), t) * r * h;
    C += std::pow(r, 1 + q) * h;
  }
  return {B, C};
}

inline std::array<double, 2> d_s1_uniform_bracket(double a, double s) {
  require(a > 0 && s > 0 && s < 1, "invalid argument", "need a > 0 and s in (0,1)");
  return {std::pow(a, s) * (1 - s), std::pow(a, s)};
}

// ---- gaps and weak disorder ----

struct GapGeometry {
  std::vector<std::array<double, 2>> bands;
  double a = 1;
  double b = 1;

  static GapGeometry from(const BandStructure& bs, const DistributionSpec& d) { return {bs.bands, d.a, d.b}; }
  std::size_t internal_gaps() const { return bands.size() - 1; }
  double gap_size(std::size_t i) const { return bands[i][0] - bands[i - 1][1]; }  // 1-based
  // G_i(lambda) = (beta_i + b lambda, alpha_{i+1} - a lambda)
  std::array<double, 2> gap_at(std::size_t i, double lambda) const {
    return {bands[i - 1][1] + b * lambda, bands[i][0] - a * lambda};
  }
  bool gap_open_at(std::size_t i, double lambda) const { return lambda < gap_size(i) / (a + b); }
  // index i with E in the open unperturbed gap G_i, 0 otherwise
  std::size_t gap_of(double E) const {
    for (std::size_t i = 1; i < bands.size(); ++i)
      if (E > bands[i - 1][1] && E < bands[i][0]) return i;
    return 0;
  }
  double distance_to_spectrum(double E) const {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& bd : bands) {
      if (E >= bd[0] && E <= bd[1]) return 0;
      d = std::min({d, std::abs(E - bd[0]), std::abs(E - bd[1])});
    }
    return d;
  }
};

inline double lambda_zero(double E, const GapGeometry& g) {
  const std::size_t i = g.gap_of(E);
  require(i > 0, "not in gap", "E must lie in an internal gap of the clean spectrum");
  const double lo = g.bands[i - 1][1], hi = g.bands[i][0];
  double v = std::numeric_limits<double>::infinity();
  if (g.b > 0) v = std::min(v, (E - lo) / g.b);
  if (g.a > 0) v = std::min(v, (hi - E) / g.a);
  return v;
}

inline double c_s_alpha(int n, double gap, double s, double alpha) {
  return 0.5 * n * gap * gap * (1 + 32 / (s * s * alpha * alpha));
}

struct WeakDisorderWindow {
  double lower;  // lambda_0(E)
  double upper;
  bool empty() const { return !(upper > lower); }
};

inline WeakDisorderWindow weak_disorder_upper(double E, const GapGeometry& g, double s, double alpha, double S_alpha,
                                              double D_s1, int n) {
  const std::size_t i = g.gap_of(E);
  require(i > 0, "not in gap", "E must lie in an internal gap of the clean spectrum");
  const double gap = g.gap_size(i);
  require(2 * S_alpha <= gap / 2, "combes-thomas precondition", "need 2 S_alpha <= |G_i| / 2");
  const double Delta = g.distance_to_spectrum(E);
  const double C = c_s_alpha(n, gap, s, alpha);
  const double up = std::pow(Delta, 1 + 2 / s) / std::pow(C * D_s1, 1 / s);
  return {lambda_zero(E, g), up};
}

inline double a_zero(double gap, double s, double C_s_alpha, double K) {
  require(gap > 0 && s > 0 && C_s_alpha > 0 && K > 0, "invalid argument", "inputs must be positive");
  return std::pow(4 * K * C_s_alpha / (gap * gap), 1 / s);
}

// ---- finite volume ----

inline double wegner_bound(int n, double C_tau, double tau, long L, double eps, double lambda) {
  require(lambda > 0, "invalid argument", "Wegner bound diverges at lambda = 0");
  require(eps > 0, "invalid argument", "eps must be positive");
  const double v = 4 * kPi * n * C_tau * double(L * L) * std::pow(eps, tau) / std::pow(lambda, tau);
  return std::min(1.0, v);
}

inline double msa_delta(double alpha, double S_alpha, double theta, double lambda, double qL) {
  require(qL >= 2, "invalid argument", "qL must be at least 2");
  return (2 * std::sqrt(2.0) * S_alpha * (3 * theta + 5) / (alpha * lambda)) * 8 * std::log(qL) / qL;
}

struct BandEdgeDelta {
  double external;
  double internal;
  bool gap_closed;  // lambda >= |G|/(a+b): internal value forced to 0
};

inline double band_edge_exponent(std::optional<double> beta, double eps) {
  require(beta.has_value(), "invalid argument", "edge exponent beta is required");
  if (std::isinf(*beta)) return 1 / (1 - eps);
  return *beta / ((*beta - 2) * (1 - eps));
}

inline BandEdgeDelta band_edge_delta(double lambda, double gap, double a, double b, std::optional<double> beta,
                                     double eps, double C_eps = 1.0) {
  require(eps > 0 && eps < 1, "invalid argument", "eps must lie in (0,1)");
  const double e = band_edge_exponent(beta, eps);
  const double ext = C_eps * std::min(1.0, std::pow(lambda, e));
  const double room = gap / (a + b) - lambda;
  if (room <= 0) return {ext, 0.0, true};
  return {ext, C_eps * std::min({1.0, std::pow(lambda, e), std::pow(room, 1 / (1 - eps))}), false};
}

// Smallest c with log x <= c x^k for all x > 0.
inline double log_power_constant(double k) { return 1 / (std::exp(1.0) * k); }

struct ScaleInputs {
  double alpha, S_alpha, theta, lambda, gap, a, b, eps, H0_norm, C_tau, tau;
  std::optional<double> beta;
  double beta_C = 1;
  int n = 2;
  long qr = 1;
  double p0 = 0.5;
};

// Seven lower bounds on qL; beta = +inf takes the beta -> inf limit.
inline std::array<double, 7> msa_scale_thresholds(const ScaleInputs& in) {
  const double e1 = 1 / (1 - in.eps);
  const double ce = log_power_constant(in.eps);
  const double T = 3 * in.theta + 5, r2 = std::sqrt(2.0);
  std::array<double, 7> L{};
  L[0] = std::pow(32 * r2 * in.S_alpha * T * ce / (in.alpha * (in.a + in.b)), e1) * std::pow(1 / in.lambda, e1);
  const double room = in.gap / (in.a + in.b) - in.lambda;
  L[1] = room > 0 ? std::pow(8 * r2 * in.S_alpha * T * ce / (in.alpha * (in.a + in.b)), e1) * std::pow(1 / room, e1)
                  : std::numeric_limits<double>::infinity();
  L[2] = std::pow(4 * r2 * T * ce / in.alpha, e1);
  L[3] = std::pow(3.0, 1 / (4 * T));
  L[4] = std::max({std::exp(1.0), 16.0 * double(in.qr),
                   std::pow(2 * r2 * in.alpha * (1 + 8 * in.H0_norm) / (in.S_alpha * T), 1 / in.theta)});
  require(in.beta.has_value(), "invalid argument", "edge exponent beta is required");
  if (std::isinf(*in.beta)) {
    L[5] = std::pow(16 * r2 * in.S_alpha * T * ce / in.alpha, e1) * std::pow(1 / in.lambda, e1);
  } else {
    const double be = *in.beta, k = in.eps * (be - 2) / be;
    const double ceb = log_power_constant(k);
    const double ex = 1 / ((be - 2) * (1 - in.eps));
    L[5] = std::pow(2 * in.beta_C * in.n * in.p0 * std::pow(16 * r2 * in.S_alpha * T * ceb / in.alpha, be), ex) *
           std::pow(1 / in.lambda, be * ex);
  }
  const double w = in.tau * in.theta - 2;
  L[6] = w > 0 ? std::pow(8 * kPi * in.n * in.C_tau * in.p0, 1 / w) * std::pow(1 / in.lambda, in.tau / w)
               : std::numeric_limits<double>::infinity();
  return L;
}

// ---- worked example pipeline ----

struct WorkedExample {
  double gap;
  double salpha_coefficient, r_max, alpha, S_alpha_exact;
  double s, t, q, B, C_q;
  DsBound ds;
  double C_s_alpha, a0, lambda_floor;  // lambda_floor = |G| / (2 a0)
  double per_site_sum_s;               // off-diagonal sum at the threshold optimizer, mu = 0
  ThresholdReport threshold;           // for the given truncated Gaussian
  double threshold_coefficient;        // threshold * ||f||_{L1[-a,a]} / t1
};

inline WorkedExample worked_example(const HaldaneParams& hp, double a_trunc, long grid = 201, double s = 0.25,
                                    double t = 1.0, double q = 2.0) {
  const HoppingModel m = haldane_model(hp);
  WorkedExample w{};
  const BandStructure bs = band_structure(m, grid);
  w.gap = bs.gaps.at(0);
  const SalphaOverbound ob = salpha_overbound(m);
  w.salpha_coefficient = ob.coefficient;
  w.r_max = ob.r_max;
  w.alpha = alpha_for_gap(ob, w.gap);
  w.S_alpha_exact = combes_thomas_salpha(m, w.alpha);
  w.s = s, w.t = t, w.q = q;
  const MomentData md = truncated_gaussian_moment_bounds(q);
  w.B = md.B, w.C_q = md.C;
  w.ds = d_s1_bound(md.B, md.C, s, t, q);
  w.C_s_alpha = c_s_alpha(m.n, w.gap, s, w.alpha);
  w.a0 = a_zero(w.gap, s, w.C_s_alpha, w.ds.K);
  w.lambda_floor = w.gap / (2 * w.a0);
  const DistributionSpec tg = truncated_gaussian(a_trunc);
  w.threshold = strong_disorder_threshold(m, tg);
  w.per_site_sum_s = off_diagonal_sum(m, w.threshold.s, 0.0);
  w.threshold_coefficient = w.threshold.value * gaussian_mass(a_trunc) / hp.t1;
  return w;
}

}  // namespace chernlab
