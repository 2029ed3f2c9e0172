#pragma once

// Experiment descriptions: a base model, an edge distribution, optional
// noise, and one swept parameter. Read from a line-oriented `key = value`
// config format.

#include "dfm/core.hpp"
#include "dfm/datasets.hpp"
#include "dfm/model.hpp"
#include "dfm/sampling.hpp"
#include "dfm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace dfm {

enum class SweepVariable { Rho, Sigma2A, Trials, Sigma2W, GammaB, GammaA };

inline std::string sweep_key(SweepVariable v) {
  switch (v) {
    case SweepVariable::Rho: return "rho";
    case SweepVariable::Sigma2A: return "sigma2A";
    case SweepVariable::Trials: return "m";
    case SweepVariable::Sigma2W: return "sigma2W";
    case SweepVariable::GammaB: return "b";
    case SweepVariable::GammaA: return "a";
  }
  return "?";
}

struct ExperimentSpec {
  std::string id = "custom";
  Index n = 0;
  int k = 0;
  int k0 = 0;
  Matrix p;
  double rho = 0.0;
  std::string distribution;
  double sigma2a = 0.0;
  long long m = 0;
  double b = 0.0;
  double a = 0.0;
  double sigma2w = 0.0;
  SweepVariable sweep = SweepVariable::Rho;
  std::vector<double> grid;
  int reps = 50;
  std::uint64_t seed = 42;
  /// Redraw labels for every repetition instead of once per grid point.
  bool resample_labels = false;
  /// Keep one adjacency matrix and redraw only the noise across
  /// repetitions; defaults to true for noise sweeps.
  bool fixed_adjacency = false;
  KMeansConfig kmeans{};
  std::vector<std::string> notes;

  /// Parameters in effect at one grid point.
  struct Point {
    double rho;
    EdgeDistribution distribution;
    NoiseSpec noise;
  };

  Point at(std::size_t g) const {
    double rho_g = rho, s2a = sigma2a, s2w = sigma2w, bb = b, aa = a;
    long long mm = m;
    const double v = grid.at(g);
    switch (sweep) {
      case SweepVariable::Rho: rho_g = v; break;
      case SweepVariable::Sigma2A: s2a = v; break;
      case SweepVariable::Trials: mm = std::llround(v); break;
      case SweepVariable::Sigma2W: s2w = v; break;
      case SweepVariable::GammaB: bb = v; break;
      case SweepVariable::GammaA: aa = v; break;
    }
    return {rho_g, make_distribution(distribution, s2a, mm, bb, aa), NoiseSpec{s2w}};
  }

  ConnectivityMatrix connectivity() const { return ConnectivityMatrix(p, k0); }

  static EdgeDistribution make_distribution(const std::string& name, double s2a,
                                            long long m, double b, double a) {
    if (name == "bernoulli") return dist::Bernoulli{};
    if (name == "normal") return dist::Normal{s2a};
    if (name == "binomial") return dist::Binomial{static_cast<long>(m)};
    if (name == "poisson") return dist::Poisson{};
    if (name == "exponential") return dist::Exponential{};
    if (name == "gamma_scale") return dist::GammaByScale{b};
    if (name == "gamma_shape") return dist::GammaByShape{a};
    throw ValidationError("unknown distribution '" + name + "'");
  }

  /// Checks structure, P, and the distribution domain at every grid point.
  void validate() const {
    if (reps < 1) throw ValidationError("reps must be >= 1");
    if (k < 1 || k0 < 1 || k0 > k || n < k) {
      throw ValidationError("need 1 <= K0 <= K <= n");
    }
    if (p.rows() != k || p.cols() != k) {
      throw ValidationError("P must be K x K (" + std::to_string(k * k) + " entries)");
    }
    if (grid.empty()) throw ValidationError("sweep grid is empty");
    kmeans.validate();
    const auto pc = connectivity();
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const auto pt = at(g);
      try {
        if (!(pt.rho > 0.0)) throw ValidationError("rho must be > 0");
        if (!(pt.noise.variance >= 0.0)) throw ValidationError("sigma2W must be >= 0");
        if (sweep == SweepVariable::Trials && std::abs(grid[g] - std::round(grid[g])) > 1e-9) {
          throw ValidationError("m must be an integer");
        }
        check_domain(pc, pt.rho, pt.distribution);
      } catch (const std::exception& e) {
        std::ostringstream msg;
        msg << "grid value " << sweep_key(sweep) << " = " << format_double(grid[g])
            << ": " << e.what();
        if (dynamic_cast<const DomainError*>(&e)) throw DomainError(msg.str());
        throw ValidationError(msg.str());
      }
    }
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double config_number(const std::string& key, const std::string& value) {
  try {
    return parse_double(value);
  } catch (const ParseError&) {
    throw ParseError("config key '" + key + "': '" + value + "' is not a number");
  }
}

inline long long config_integer(const std::string& key, const std::string& value) {
  const double v = config_number(key, value);
  if (v != std::floor(v)) throw ParseError("config key '" + key + "' must be an integer");
  return static_cast<long long>(v);
}

inline std::vector<double> config_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::string tok;
  std::istringstream in(value);
  while (std::getline(in, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    std::istringstream ws(tok);
    std::string part;
    while (ws >> part) out.push_back(config_number(key, part));
  }
  return out;
}

}  // namespace detail

/// `start:step:end` (inclusive) or a comma list. Values are rounded to 12
/// decimals so 0.1 + 2 * 0.1 prints as 0.3.
inline std::vector<double> parse_grid(const std::string& key, const std::string& value) {
  if (value.find(':') == std::string::npos) {
    auto out = detail::config_list(key, value);
    if (out.empty()) throw ParseError("config key '" + key + "': empty grid");
    return out;
  }
  std::vector<std::string> parts;
  std::istringstream in(value);
  std::string tok;
  while (std::getline(in, tok, ':')) parts.push_back(detail::trim(tok));
  if (parts.size() != 3) {
    throw ParseError("config key '" + key + "': expected start:step:end");
  }
  const double start = detail::config_number(key, parts[0]);
  const double step = detail::config_number(key, parts[1]);
  const double end = detail::config_number(key, parts[2]);
  if (!(step > 0.0)) throw ParseError("config key '" + key + "': grid step must be > 0");
  if (end < start) throw ParseError("config key '" + key + "': grid end < start");
  const auto count = static_cast<long long>(std::floor((end - start) / step + 1e-9)) + 1;
  std::vector<double> out;
  for (long long i = 0; i < count; ++i) {
    const double v = start + static_cast<double>(i) * step;
    out.push_back(std::round(v * 1e12) / 1e12);
  }
  return out;
}

inline ExperimentSpec parse_experiment_config(const std::string& text) {
  static const std::set<std::string> kKnown = {
      "experiment", "n",      "K",      "K0",          "rho",          "rho_grid",
      "distribution", "sigma2A", "sigma2A_grid", "m", "m_grid",      "b",
      "b_grid",     "a",      "a_grid", "sigma2W",     "sigma2W_grid", "reps",
      "seed",       "P",      "resample_labels", "fixed_adjacency", "kmeans_restarts",
      "kmeans_max_iter", "kmeans_tol"};
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (!kKnown.count(key)) {
      throw ParseError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (!kv.emplace(key, value).second) {
      throw ParseError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }
  auto require = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw ParseError("config: missing required key '" + key + "'");
    return it->second;
  };
  auto has = [&](const std::string& key) { return kv.count(key) > 0; };

  ExperimentSpec s;
  if (has("experiment")) s.id = kv["experiment"];
  s.n = static_cast<Index>(detail::config_integer("n", require("n")));
  s.k = static_cast<int>(detail::config_integer("K", require("K")));
  s.k0 = has("K0") ? static_cast<int>(detail::config_integer("K0", kv["K0"])) : s.k;
  s.distribution = require("distribution");
  ExperimentSpec::make_distribution(s.distribution, 0, 1, 1, 1);  // name check

  const auto entries = detail::config_list("P", require("P"));
  if (s.k < 1 || entries.size() != static_cast<std::size_t>(s.k) * static_cast<std::size_t>(s.k)) {
    throw ParseError("config: P must have K*K = " + std::to_string(s.k * s.k) +
                     " entries, got " + std::to_string(entries.size()));
  }
  s.p.resize(s.k, s.k);
  for (int i = 0; i < s.k; ++i) {
    for (int j = 0; j < s.k; ++j) s.p(i, j) = entries[static_cast<std::size_t>(i * s.k + j)];
  }

  int sweeps = 0;
  const std::vector<std::pair<std::string, SweepVariable>> grid_keys = {
      {"rho", SweepVariable::Rho},         {"sigma2A", SweepVariable::Sigma2A},
      {"m", SweepVariable::Trials},        {"sigma2W", SweepVariable::Sigma2W},
      {"b", SweepVariable::GammaB},        {"a", SweepVariable::GammaA}};
  for (const auto& [name, var] : grid_keys) {
    if (has(name + "_grid")) {
      if (has(name)) throw ParseError("config: both '" + name + "' and '" + name + "_grid' given");
      ++sweeps;
      s.sweep = var;
      s.grid = parse_grid(name + "_grid", kv[name + "_grid"]);
    }
  }
  if (sweeps == 0) {
    // A single-point run sweeps rho over one value.
    s.sweep = SweepVariable::Rho;
    s.grid = {detail::config_number("rho", require("rho"))};
  } else if (sweeps > 1) {
    throw ParseError("config: exactly one *_grid key is allowed");
  }

  if (has("rho")) s.rho = detail::config_number("rho", kv["rho"]);
  else if (s.sweep != SweepVariable::Rho) require("rho");
  if (has("sigma2A")) s.sigma2a = detail::config_number("sigma2A", kv["sigma2A"]);
  if (has("m")) s.m = detail::config_integer("m", kv["m"]);
  if (has("b")) s.b = detail::config_number("b", kv["b"]);
  if (has("a")) s.a = detail::config_number("a", kv["a"]);
  if (has("sigma2W")) s.sigma2w = detail::config_number("sigma2W", kv["sigma2W"]);

  const auto needs = [&](const std::string& dist, const std::string& key, SweepVariable var) {
    if (s.distribution == dist && !has(key) && s.sweep != var) {
      throw ParseError("config: distribution " + dist + " requires '" + key + "'");
    }
  };
  needs("normal", "sigma2A", SweepVariable::Sigma2A);
  needs("binomial", "m", SweepVariable::Trials);
  needs("gamma_scale", "b", SweepVariable::GammaB);
  needs("gamma_shape", "a", SweepVariable::GammaA);
  if (has("m") && s.distribution != "binomial") {
    s.notes.push_back("m is ignored for distribution " + s.distribution);
  }

  if (has("reps")) {
    const auto reps = detail::config_integer("reps", kv["reps"]);
    if (reps < 1) throw ValidationError("config: reps must be >= 1");
    s.reps = static_cast<int>(reps);
  }
  if (has("seed")) {
    const auto seed = detail::config_integer("seed", kv["seed"]);
    if (seed < 0) throw ValidationError("config: seed must be >= 0");
    s.seed = static_cast<std::uint64_t>(seed);
  }
  auto flag = [&](const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const auto& v = kv[key];
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ParseError("config key '" + key + "' must be true or false");
  };
  s.resample_labels = flag("resample_labels", false);
  s.fixed_adjacency = flag("fixed_adjacency", s.sweep == SweepVariable::Sigma2W);
  if (has("kmeans_restarts")) {
    s.kmeans.restarts = static_cast<int>(detail::config_integer("kmeans_restarts", kv["kmeans_restarts"]));
  }
  if (has("kmeans_max_iter")) {
    s.kmeans.max_iterations = static_cast<int>(detail::config_integer("kmeans_max_iter", kv["kmeans_max_iter"]));
  }
  if (has("kmeans_tol")) s.kmeans.tolerance = detail::config_number("kmeans_tol", kv["kmeans_tol"]);
  s.kmeans.rng = RandomStream{s.seed, 0};
  s.validate();
  return s;
}

inline ExperimentSpec parse_experiment_config_file(const std::filesystem::path& path) {
  return parse_experiment_config(read_text_file(path));
}

/// Config text for the synthetic experiments: n = 200, K0 = K = 3, 50
/// repetitions, with the normal-model P (negative entries) or the
/// nonnegative P shared by the binomial, Poisson and exponential runs.
inline std::optional<std::string> builtin_config_text(const std::string& id) {
  const std::string common = "n = 200\nK = 3\nK0 = 3\nreps = 50\nseed = 42\n";
  const std::string p_signed = "P = -1, -0.4, 0.5, -0.4, 0.9, 0.2, 0.5, 0.2, 0.8\n";
  const std::string p_positive = "P = 1, 0.4, 0.5, 0.4, 0.9, 0.2, 0.5, 0.2, 0.8\n";
  const std::string rho_grid = "rho_grid = 0.1:0.1:2\n";
  const std::string noise_grid = "sigma2W_grid = 0.05:0.05:2\n";
  const std::map<std::string, std::string> body = {
      {"1a", "distribution = normal\nsigma2A = 3\n" + rho_grid + p_signed},
      {"1b", "distribution = normal\nrho = 0.4\nsigma2A_grid = 0.1:0.1:4\n" + p_signed},
      {"1c", "distribution = normal\nrho = 0.8\nsigma2A = 1\n" + noise_grid + p_signed},
      {"2a", "distribution = binomial\nm = 3\n" + rho_grid + p_positive},
      {"2b", "distribution = binomial\nrho = 0.4\nm_grid = 1:1:20\n" + p_positive},
      {"2c", "distribution = binomial\nrho = 0.8\nm = 3\n" + noise_grid + p_positive},
      {"3a", "distribution = poisson\n" + rho_grid + p_positive},
      {"3b", "distribution = poisson\nrho = 0.8\n" + noise_grid + p_positive},
      {"4", "distribution = exponential\n" + rho_grid + p_positive},
  };
  auto it = body.find(id);
  if (it == body.end()) return std::nullopt;
  return "experiment = " + id + "\n" + common + it->second;
}

inline std::vector<std::string> builtin_experiment_ids() {
  return {"1a", "1b", "1c", "2a", "2b", "2c", "3a", "3b", "4"};
}

inline ExperimentSpec builtin_experiment(const std::string& id) {
  auto text = builtin_config_text(id);
  if (!text) throw ValidationError("unknown experiment id '" + id + "'");
  return parse_experiment_config(*text);
}

/// Noise grid {0, 0.01, ..., 0.2} used for the real networks.
inline std::vector<double> realdata_noise_grid() { return parse_grid("sigma2W_grid", "0:0.01:0.2"); }

}  // namespace dfm
