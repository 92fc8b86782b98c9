#include "chernlab/runner.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>

using namespace chernlab;

namespace {

// "lo:hi:count" or a comma separated list
std::vector<double> parse_grid(const std::string& s, const std::string& flag) {
  std::vector<double> v;
  try {
    if (s.find(':') != std::string::npos) {
      std::istringstream is(s);
      std::string a, b, n;
      std::getline(is, a, ':');
      std::getline(is, b, ':');
      std::getline(is, n, ':');
      const double lo = std::stod(a), hi = std::stod(b);
      const long cnt = std::stol(n);
      if (cnt < 1) throw std::invalid_argument("count");
      for (long k = 0; k < cnt; ++k) v.push_back(cnt == 1 ? lo : lo + (hi - lo) * double(k) / double(cnt - 1));
    } else {
      std::istringstream is(s);
      std::string tok;
      while (std::getline(is, tok, ',')) v.push_back(std::stod(tok));
    }
  } catch (const std::exception&) {
    throw Error("invalid config", flag + ": cannot parse grid '" + s + "'");
  }
  if (v.empty()) throw Error("invalid config", flag + ": empty grid");
  return v;
}

struct Overrides {
  std::string config, model, dist, mode, E, lambda_grid, grid, T, eps, Ls, bc, out;
  std::optional<std::uint64_t> seed;
  std::optional<long> realizations, L, k_grid, window;
  std::optional<int> threads;
  std::optional<double> lambda, theta, p, wc, ww;
};

void add_options(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "experiment config JSON");
  sub->add_option("--model", o.model, "model JSON file");
  sub->add_option("--dist", o.dist, "distribution JSON file");
  sub->add_option("--seed", o.seed, "master seed");
  sub->add_option("--realizations", o.realizations, "number of realizations");
  sub->add_option("--threads", o.threads, "worker threads (0 = auto)");
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--lambda", o.lambda, "disorder strength");
  sub->add_option("--L", o.L, "box side");
  sub->add_option("--bc", o.bc, "simple or periodic");
  sub->add_option("--E", o.E, "energy grid, lo:hi:count or a,b,c");
  sub->add_option("--lambda-grid", o.lambda_grid, "lambda grid, lo:hi:count or a,b,c");
  sub->add_option("--grid", o.grid, "phase-diagram grid, e.g. 41x41");
  sub->add_option("--k-grid", o.k_grid, "k points per direction");
  sub->add_option("--window", o.window, "marker window side");
  sub->add_option("--theta", o.theta, "suitable-box exponent");
  sub->add_option("--p", o.p, "moment order");
  sub->add_option("--T", o.T, "time grid");
  sub->add_option("--window-centre", o.wc, "energy window centre");
  sub->add_option("--window-width", o.ww, "energy window width");
  sub->add_option("--eps", o.eps, "Wegner eps grid");
  sub->add_option("--Ls", o.Ls, "box sides for msa-probe, a,b,c");
}

ExperimentConfig resolve(const std::string& command, const Overrides& o) {
  ExperimentConfig c;
  if (!o.config.empty()) c = config_from_json(ConfigDocument::load(o.config));
  c.command = command;
  if (command == "chern" && o.mode == "phase-diagram") c.command = "phase-diagram";
  else if (!o.mode.empty()) throw Error("invalid config", "unknown mode '" + o.mode + "'");
  if (!o.model.empty()) {
    const ConfigDocument doc = ConfigDocument::load(o.model);
    model_from_json(doc, doc.root());  // validates with file line numbers
    c.model = doc.root();
  }
  if (!o.dist.empty()) {
    const ConfigDocument doc = ConfigDocument::load(o.dist);
    distribution_from_json(doc, doc.root());
    c.distribution = doc.root();
  }
  if (o.seed) c.master_seed = *o.seed;
  if (o.realizations) c.n_realizations = *o.realizations;
  if (o.threads) c.threads = *o.threads;
  if (!o.out.empty()) c.output = o.out;
  if (o.lambda) c.lambda = *o.lambda;
  if (o.L) c.box_L = *o.L;
  if (!o.bc.empty()) c.bc = o.bc;
  if (!o.E.empty()) c.E_grid = parse_grid(o.E, "--E");
  if (!o.lambda_grid.empty()) c.lambda_grid = parse_grid(o.lambda_grid, "--lambda-grid");
  if (!o.grid.empty()) {
    const auto x = o.grid.find('x');
    try {
      if (x == std::string::npos) throw std::invalid_argument("grid");
      c.grid_phi = std::stol(o.grid.substr(0, x));
      c.grid_M = std::stol(o.grid.substr(x + 1));
    } catch (const std::exception&) {
      throw Error("invalid config", "--grid: expected NxM, got '" + o.grid + "'");
    }
  }
  if (o.k_grid) c.k_grid = *o.k_grid;
  if (o.window) c.window_L = *o.window;
  if (o.theta) c.theta = *o.theta;
  if (o.p) c.moment_p = *o.p;
  if (!o.T.empty()) c.T_grid = parse_grid(o.T, "--T");
  if (o.wc) c.window_centre = *o.wc;
  if (o.ww) c.window_width = *o.ww;
  if (!o.eps.empty()) c.eps_grid = parse_grid(o.eps, "--eps");
  if (!o.Ls.empty()) {
    c.L_grid.clear();
    for (double v : parse_grid(o.Ls, "--Ls")) c.L_grid.push_back(long(v));
  }
  // re-run the semantic checks on the merged result
  return config_from_json(to_json(c));
}

}  // namespace

int main(int argc, char** argv) {
  pin_blas_single_thread();
  CLI::App app{"chernlab: disordered Chern insulator experiments"};
  app.require_subcommand(1);
  Overrides o;
  for (const auto& name : known_commands()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " probe");
    add_options(sub, o);
    if (name == "chern") sub->add_option("mode", o.mode, "optional mode: phase-diagram");
  }
  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const ExperimentConfig c = resolve(command, o);
    const RunOutput r = run(c);
    for (const auto& f : r.files) std::cout << f.string() << "\n";
    if (c.command == "thresholds") std::cout << r.summary.dump(2) << "\n";
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.label() == "invalid config" ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
