#pragma once

#include "chernlab/core.hpp"
#include "chernlab/disorder.hpp"
#include "chernlab/finite_volume.hpp"
#include "chernlab/model.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace chernlab {

using json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "chernlab/1";

// ---- CSV ----

using Cell = std::variant<double, long long, std::string>;

inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string format_cell(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return format_double(*d);
  if (const long long* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, std::string>> meta;  // written as "# key: value"

  void add(std::vector<Cell> row) {
    require(row.size() == columns.size(), "table", "row width does not match the header");
    rows.push_back(std::move(row));
  }
};

inline std::string to_csv(const Table& t) {
  std::ostringstream os;
  os << "# schema_version: " << kSchemaVersion << "\n";
  for (const auto& [k, v] : t.meta) os << "# " << k << ": " << v << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << "\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_cell(r[i]);
    os << "\n";
  }
  return os.str();
}

// Lines not starting with '#'; the part of a CSV that must be reproducible.
inline std::string csv_body(const std::string& text) {
  std::istringstream is(text);
  std::string line, out;
  while (std::getline(is, line))
    if (line.empty() || line[0] != '#') out += line + "\n";
  return out;
}

inline void write_text(const std::filesystem::path& p, const std::string& s) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  require(bool(f), "io", "cannot open " + p.string() + " for writing");
  f << s;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  require(bool(f), "io", "cannot read " + p.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline void write_csv(const std::filesystem::path& p, const Table& t) { write_text(p, to_csv(t)); }

inline void write_json(const std::filesystem::path& p, json j) {
  json out;
  out["schema_version"] = kSchemaVersion;
  for (auto& [k, v] : j.items())
    if (k != "schema_version") out[k] = v;
  write_text(p, out.dump(2) + "\n");
}

// ---- config documents with line-referenced errors ----

class ConfigDocument {
 public:
  ConfigDocument() = default;
  ConfigDocument(std::string text, std::string origin) : text_(std::move(text)), origin_(std::move(origin)) {
    try {
      root_ = json::parse(text_);
    } catch (const json::parse_error& e) {
      fail(line_at(e.byte == 0 ? 0 : e.byte - 1), std::string("malformed JSON: ") + e.what());
    }
  }
  static ConfigDocument load(const std::filesystem::path& p) { return ConfigDocument(read_text(p), p.string()); }

  const json& root() const { return root_; }
  const std::string& origin() const { return origin_; }

  // 1-based line of the first occurrence of "key", or 1 when not found.
  long line_of(const std::string& key) const {
    const auto pos = text_.find("\"" + key + "\"");
    return pos == std::string::npos ? 1 : line_at(pos);
  }
  [[noreturn]] void fail(long line, const std::string& msg) const {
    throw Error("invalid config", origin_ + ":" + std::to_string(line) + ": " + msg);
  }
  [[noreturn]] void fail_key(const std::string& key, const std::string& msg) const { fail(line_of(key), msg); }

 private:
  long line_at(std::size_t pos) const {
    long line = 1;
    for (std::size_t i = 0; i < pos && i < text_.size(); ++i) line += text_[i] == '\n';
    return line;
  }
  std::string text_;
  std::string origin_ = "<config>";
  json root_ = json::object();
};

namespace detail {

template <class T>
T get_or(const ConfigDocument& doc, const json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    doc.fail_key(key, "field '" + key + "' has the wrong type");
  }
}

template <class T>
T get_req(const ConfigDocument& doc, const json& j, const std::string& key) {
  if (!j.contains(key)) doc.fail_key(key, "missing field '" + key + "'");
  return get_or<T>(doc, j, key, T{});
}

inline cplx parse_complex(const ConfigDocument& doc, const json& v, const std::string& key) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) return {v[0].get<double>(), v[1].get<double>()};
  doc.fail_key(key, "matrix entries must be numbers or [re, im] pairs");
}

inline json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

}  // namespace detail

inline std::string to_string(Dimerization d) { return d == Dimerization::d1 ? "d1" : d == Dimerization::d2 ? "d2" : "d3"; }

// ---- models ----

inline HoppingModel model_from_json(const ConfigDocument& doc, const json& j) {
  using detail::get_or;
  using detail::get_req;
  if (!j.is_object()) doc.fail(1, "model must be a JSON object");
  const std::string type = get_req<std::string>(doc, j, "type");
  if (type == "haldane") {
    HaldaneParams p;
    p.t1 = get_or(doc, j, "t1", p.t1);
    p.t2 = get_or(doc, j, "t2", p.t2);
    p.phi = get_or(doc, j, "phi", p.phi);
    if (j.contains("M_over_t2")) p.M = get_or(doc, j, "M_over_t2", 0.0) * p.t2;
    p.M = get_or(doc, j, "M", p.M);
    const std::string d = get_or<std::string>(doc, j, "dimerization", "d3");
    if (d == "d1") p.dimerization = Dimerization::d1;
    else if (d == "d2") p.dimerization = Dimerization::d2;
    else if (d == "d3") p.dimerization = Dimerization::d3;
    else doc.fail_key("dimerization", "dimerization must be d1, d2 or d3");
    return haldane_model(p);
  }
  if (type != "custom") doc.fail_key("type", "model type must be 'haldane' or 'custom', got '" + type + "'");
  HoppingModel m;
  m.n = get_req<int>(doc, j, "n");
  m.r = get_req<long>(doc, j, "r");
  m.B = get_or(doc, j, "B", 0.0);
  if (m.n < 1) doc.fail_key("n", "n must be positive");
  if (m.r < 0) doc.fail_key("r", "r must be nonnegative");
  if (j.contains("basis")) {
    const auto b = j.at("basis");
    try {
      m.basis.a1 = {b.at(0).at(0).get<double>(), b.at(0).at(1).get<double>()};
      m.basis.a2 = {b.at(1).at(0).get<double>(), b.at(1).at(1).get<double>()};
    } catch (const json::exception&) {
      doc.fail_key("basis", "basis must be [[x1,y1],[x2,y2]]");
    }
  }
  if (!j.contains("hoppings") || !j.at("hoppings").is_array()) doc.fail_key("hoppings", "hoppings must be an array");
  for (const auto& h : j.at("hoppings")) {
    const LatticePoint d{get_req<long>(doc, h, "dg1"), get_req<long>(doc, h, "dg2")};
    if (!h.contains("matrix") || !h.at("matrix").is_array()) doc.fail_key("matrix", "hopping needs a matrix");
    const json& mj = h.at("matrix");
    MatC M = m.zero();
    // either a flat row-major list of n*n entries or n rows of n entries
    const bool nested = long(mj.size()) == m.n && mj[0].is_array() && (m.n > 1 || mj[0].size() != 2 || mj[0][0].is_array());
    if (nested) {
      for (int a = 0; a < m.n; ++a) {
        if (!mj[std::size_t(a)].is_array() || long(mj[std::size_t(a)].size()) != m.n)
          doc.fail_key("matrix", "matrix row has the wrong length");
        for (int b = 0; b < m.n; ++b) M(a, b) = detail::parse_complex(doc, mj[std::size_t(a)][std::size_t(b)], "matrix");
      }
    } else {
      if (long(mj.size()) != long(m.n) * m.n) doc.fail_key("matrix", "matrix must have n rows or n*n entries");
      for (int k = 0; k < m.n * m.n; ++k) M(k / m.n, k % m.n) = detail::parse_complex(doc, mj[std::size_t(k)], "matrix");
    }
    m.hoppings.try_emplace(d, m.zero()).first->second += M;
  }
  try {
    m.validate();
  } catch (const Error& e) {
    doc.fail_key("hoppings", std::string("model rejected: ") + e.what());
  }
  return m;
}

inline HoppingModel model_from_json(const json& j) { return model_from_json(ConfigDocument(j.dump(2), "<model>"), j); }

// Custom form for any model; the Haldane parameters are kept when known.
inline json model_to_json(const HoppingModel& m) {
  json j;
  j["type"] = "custom";
  j["n"] = m.n;
  j["r"] = m.r;
  j["B"] = m.B;
  j["basis"] = json::array({json::array({m.basis.a1[0], m.basis.a1[1]}), json::array({m.basis.a2[0], m.basis.a2[1]})});
  json hs = json::array();
  for (const auto& [d, h] : m.hoppings) {
    json mat = json::array();
    for (int a = 0; a < m.n; ++a) {
      json row = json::array();
      for (int b = 0; b < m.n; ++b) row.push_back(detail::complex_json(h(a, b)));
      mat.push_back(row);
    }
    hs.push_back({{"dg1", d.g1}, {"dg2", d.g2}, {"matrix", mat}});
  }
  j["hoppings"] = hs;
  return j;
}

inline json haldane_to_json(const HaldaneParams& p) {
  return {{"type", "haldane"}, {"t1", p.t1}, {"t2", p.t2}, {"phi", p.phi}, {"M", p.M}, {"dimerization", to_string(p.dimerization)}};
}

// ---- distributions ----

inline DistributionSpec distribution_from_json(const ConfigDocument& doc, const json& j) {
  using detail::get_or;
  using detail::get_req;
  if (!j.is_object()) doc.fail(1, "distribution must be a JSON object");
  const std::string kind = get_req<std::string>(doc, j, "kind");
  DistributionSpec d;
  try {
    if (kind == "uniform") {
      d = uniform_dist(get_req<double>(doc, j, "a"), get_req<double>(doc, j, "b"));
    } else if (kind == "truncated_gaussian") {
      d = truncated_gaussian(get_req<double>(doc, j, "a"));
    } else if (kind == "custom_density" || kind == "custom") {
      d = custom_density(get_req<std::vector<double>>(doc, j, "xs"), get_req<std::vector<double>>(doc, j, "fs"));
    } else {
      doc.fail_key("kind", "unknown distribution kind '" + kind + "'");
    }
  } catch (const Error& e) {
    if (e.label() == "invalid config") throw;
    doc.fail_key("kind", std::string("distribution rejected: ") + e.what());
  }
  if (j.contains("beta")) {
    const json& b = j.at("beta");
    if (b.is_string() && b.get<std::string>() == "inf") d.beta = std::numeric_limits<double>::infinity();
    else if (b.is_number()) d.beta = b.get<double>();
    else doc.fail_key("beta", "beta must be a number or \"inf\"");
  }
  d.beta_C = get_or(doc, j, "beta_C", d.beta_C);
  return d;
}

inline DistributionSpec distribution_from_json(const json& j) {
  return distribution_from_json(ConfigDocument(j.dump(2), "<distribution>"), j);
}

inline json distribution_to_json(const DistributionSpec& d) {
  json j;
  j["kind"] = to_string(d.kind);
  if (d.kind == DistKind::uniform) {
    j["a"] = d.a;
    j["b"] = d.b;
  } else if (d.kind == DistKind::truncated_gaussian) {
    j["a"] = d.a;
  } else {
    j["xs"] = d.xs;
    j["fs"] = d.fs;
  }
  if (d.beta) {
    if (std::isinf(*d.beta)) j["beta"] = "inf";
    else j["beta"] = *d.beta;
  }
  j["beta_C"] = d.beta_C;
  return j;
}

inline Table sample_table(const DisorderSample& s, const Box& box) {
  Table t;
  t.columns = {"site_rank", "g1", "g2", "orbital", "value"};
  t.meta = {{"seed", std::to_string(s.seed)}, {"realization_index", std::to_string(s.realization_index)}};
  for (std::size_t k = 0; k < box.size(); ++k)
    for (int i = 0; i < s.n; ++i)
      t.add({(long long)k, (long long)box[k].g1, (long long)box[k].g2, (long long)i, s.at(k, i)});
  return t;
}

// ---- experiment configuration ----

struct ExperimentConfig {
  std::string command;
  json model = haldane_to_json(HaldaneParams{});
  json distribution = {{"kind", "truncated_gaussian"}, {"a", 2.0}};
  // scan grids
  std::vector<double> E_grid{0.0};
  std::vector<double> lambda_grid{0.0};
  long grid_phi = 41, grid_M = 41;
  double M_max = 6.0;
  long k_grid = 201;
  std::vector<double> T_grid{1, 2, 5, 10, 20, 50, 100};
  std::vector<long> L_grid;  // msa-probe box sides; empty means {L}
  // ensemble
  double lambda = 0.0;
  long box_L = 12;
  std::string bc = "periodic";
  long n_realizations = 1;
  std::uint64_t master_seed = 0;
  int threads = 1;
  // probe knobs
  long window_L = 6;
  double theta = 3.0;
  double moment_p = 2.0;
  double window_centre = -2.0, window_width = 2.4;
  std::vector<double> eps_grid{1e-2, 1e-3, 1e-4};
  std::string output = "out";
};

inline json to_json(const ExperimentConfig& c) {
  return {{"command", c.command},
          {"model", c.model},
          {"distribution", c.distribution},
          {"scan",
           {{"E", c.E_grid},
            {"lambda", c.lambda_grid},
            {"grid_phi", c.grid_phi},
            {"grid_M", c.grid_M},
            {"M_max", c.M_max},
            {"k_grid", c.k_grid},
            {"T", c.T_grid},
            {"L", c.L_grid}}},
          {"ensemble",
           {{"lambda", c.lambda},
            {"L", c.box_L},
            {"bc", c.bc},
            {"n_realizations", c.n_realizations},
            {"master_seed", c.master_seed},
            {"threads", c.threads}}},
          {"probe",
           {{"window_L", c.window_L},
            {"theta", c.theta},
            {"p", c.moment_p},
            {"window_centre", c.window_centre},
            {"window_width", c.window_width},
            {"eps", c.eps_grid}}},
          {"output", c.output}};
}

inline ExperimentConfig config_from_json(const ConfigDocument& doc) {
  using detail::get_or;
  const json& j = doc.root();
  if (!j.is_object()) doc.fail(1, "config must be a JSON object");
  ExperimentConfig c;
  c.command = get_or<std::string>(doc, j, "command", c.command);
  if (j.contains("model")) c.model = j.at("model");
  if (j.contains("distribution")) c.distribution = j.at("distribution");
  const json empty = json::object();
  const json& s = j.contains("scan") ? j.at("scan") : empty;
  c.E_grid = get_or(doc, s, "E", c.E_grid);
  c.lambda_grid = get_or(doc, s, "lambda", c.lambda_grid);
  c.grid_phi = get_or(doc, s, "grid_phi", c.grid_phi);
  c.grid_M = get_or(doc, s, "grid_M", c.grid_M);
  c.M_max = get_or(doc, s, "M_max", c.M_max);
  c.k_grid = get_or(doc, s, "k_grid", c.k_grid);
  c.T_grid = get_or(doc, s, "T", c.T_grid);
  c.L_grid = get_or(doc, s, "L", c.L_grid);
  const json& e = j.contains("ensemble") ? j.at("ensemble") : empty;
  c.lambda = get_or(doc, e, "lambda", c.lambda);
  c.box_L = get_or(doc, e, "L", c.box_L);
  c.bc = get_or(doc, e, "bc", c.bc);
  c.n_realizations = get_or(doc, e, "n_realizations", c.n_realizations);
  c.master_seed = get_or(doc, e, "master_seed", c.master_seed);
  c.threads = get_or(doc, e, "threads", c.threads);
  const json& p = j.contains("probe") ? j.at("probe") : empty;
  c.window_L = get_or(doc, p, "window_L", c.window_L);
  c.theta = get_or(doc, p, "theta", c.theta);
  c.moment_p = get_or(doc, p, "p", c.moment_p);
  c.window_centre = get_or(doc, p, "window_centre", c.window_centre);
  c.window_width = get_or(doc, p, "window_width", c.window_width);
  c.eps_grid = get_or(doc, p, "eps", c.eps_grid);
  c.output = get_or(doc, j, "output", c.output);
  // semantic checks
  if (c.box_L < 1) doc.fail_key("L", "box side must be positive");
  if (c.n_realizations < 1) doc.fail_key("n_realizations", "need at least one realization");
  if (c.lambda < 0) doc.fail_key("lambda", "lambda must be nonnegative");
  if (c.threads < 0) doc.fail_key("threads", "threads must be >= 0");
  if (c.bc != "simple" && c.bc != "periodic") doc.fail_key("bc", "bc must be 'simple' or 'periodic'");
  if (c.grid_phi < 2 || c.grid_M < 2) doc.fail_key("grid_phi", "phase-diagram grids need at least 2 points");
  if (c.k_grid < 2) doc.fail_key("k_grid", "k_grid must be at least 2");
  return c;
}

inline ExperimentConfig config_from_json(const json& j) { return config_from_json(ConfigDocument(j.dump(2), "<config>")); }

}  // namespace chernlab
