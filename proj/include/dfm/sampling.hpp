#pragma once

// Random labels, adjacency matrices with E[A] = Omega under six edge
// distributions, symmetric zero-mean noise, and the observed matrix A + W.

#include "dfm/core.hpp"
#include "dfm/model.hpp"
#include "dfm/random.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

namespace dfm {

namespace dist {
struct Bernoulli {};
struct Normal {
  double variance = 0.0;  // sigma^2_A
};
struct Binomial {
  long trials = 1;  // m
};
struct Poisson {};
struct Exponential {};
/// Gamma(shape = b * Omega, rate = b): mean Omega, variance Omega / b.
struct GammaByScale {
  double b = 1.0;
};
/// Gamma(shape = a, rate = a / Omega): mean Omega, variance Omega^2 / a.
struct GammaByShape {
  double a = 1.0;
};
}  // namespace dist

using EdgeDistribution =
    std::variant<dist::Bernoulli, dist::Normal, dist::Binomial, dist::Poisson,
                 dist::Exponential, dist::GammaByScale, dist::GammaByShape>;

inline std::string distribution_name(const EdgeDistribution& d) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, dist::Bernoulli>) return "bernoulli";
        if constexpr (std::is_same_v<T, dist::Normal>) return "normal";
        if constexpr (std::is_same_v<T, dist::Binomial>) return "binomial";
        if constexpr (std::is_same_v<T, dist::Poisson>) return "poisson";
        if constexpr (std::is_same_v<T, dist::Exponential>) return "exponential";
        if constexpr (std::is_same_v<T, dist::GammaByScale>) return "gamma_scale";
        if constexpr (std::is_same_v<T, dist::GammaByShape>) return "gamma_shape";
      },
      d);
}

inline void validate_distribution(const EdgeDistribution& d) {
  std::visit(
      [](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, dist::Normal>) {
          if (!(v.variance >= 0.0)) throw ValidationError("sigma2A must be >= 0");
        } else if constexpr (std::is_same_v<T, dist::Binomial>) {
          if (v.trials < 1) throw ValidationError("binomial m must be >= 1");
        } else if constexpr (std::is_same_v<T, dist::GammaByScale>) {
          if (!(v.b > 0.0)) throw ValidationError("gamma scale b must be > 0");
        } else if constexpr (std::is_same_v<T, dist::GammaByShape>) {
          if (!(v.a > 0.0)) throw ValidationError("gamma shape a must be > 0");
        }
      },
      d);
}

/// Whether a single mean value is admissible for the distribution.
inline bool mean_in_domain(const EdgeDistribution& d, double mean) {
  return std::visit(
      [mean](const auto& v) -> bool {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, dist::Bernoulli>) {
          return mean >= 0.0 && mean <= 1.0;
        } else if constexpr (std::is_same_v<T, dist::Binomial>) {
          const double q = mean / static_cast<double>(v.trials);
          return q >= 0.0 && q <= 1.0;
        } else if constexpr (std::is_same_v<T, dist::Poisson>) {
          return mean >= 0.0;
        } else if constexpr (std::is_same_v<T, dist::Normal>) {
          return std::isfinite(mean);
        } else {
          return mean > 0.0;
        }
      },
      d);
}

/// Closed-form variance of one entry with the given mean.
inline double entry_variance(const EdgeDistribution& d, double mean) {
  return std::visit(
      [mean](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, dist::Bernoulli>) {
          return mean * (1.0 - mean);
        } else if constexpr (std::is_same_v<T, dist::Normal>) {
          return v.variance;
        } else if constexpr (std::is_same_v<T, dist::Binomial>) {
          const double q = mean / static_cast<double>(v.trials);
          return static_cast<double>(v.trials) * q * (1.0 - q);
        } else if constexpr (std::is_same_v<T, dist::Poisson>) {
          return mean;
        } else if constexpr (std::is_same_v<T, dist::Exponential>) {
          return mean * mean;
        } else if constexpr (std::is_same_v<T, dist::GammaByScale>) {
          return mean / v.b;
        } else {
          return mean * mean / v.a;
        }
      },
      d);
}

/// Throws DomainError naming the first entry (upper triangle, row-major)
/// whose mean is inadmissible.
inline void check_domain(const Matrix& omega, const EdgeDistribution& d) {
  validate_distribution(d);
  for (Index i = 0; i < omega.rows(); ++i) {
    for (Index j = i; j < omega.cols(); ++j) {
      if (!mean_in_domain(d, omega(i, j))) {
        std::ostringstream msg;
        msg << distribution_name(d) << " cannot have mean Omega(" << i + 1
            << "," << j + 1 << ") = " << omega(i, j);
        throw DomainError(msg.str());
      }
    }
  }
}

/// Domain check on the distinct values rho * P(k, l), which is what Omega
/// contains when every community is non-empty.
inline void check_domain(const ConnectivityMatrix& p, double rho,
                         const EdgeDistribution& d) {
  validate_distribution(d);
  for (Index k = 0; k < p.k(); ++k) {
    for (Index l = k; l < p.k(); ++l) {
      if (!mean_in_domain(d, rho * p(k, l))) {
        std::ostringstream msg;
        msg << distribution_name(d) << " cannot have mean rho*P(" << k + 1 << "," << l + 1
            << ") = " << rho * p(k, l);
        throw DomainError(msg.str());
      }
    }
  }
}

namespace detail {

template <class Engine>
double draw_entry(const EdgeDistribution& d, double mean, Engine& rng) {
  return std::visit(
      [mean, &rng](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, dist::Bernoulli>) {
          if (mean <= 0.0) return 0.0;
          if (mean >= 1.0) return 1.0;
          return std::bernoulli_distribution(mean)(rng) ? 1.0 : 0.0;
        } else if constexpr (std::is_same_v<T, dist::Normal>) {
          if (v.variance == 0.0) return mean;
          return std::normal_distribution<double>(mean, std::sqrt(v.variance))(rng);
        } else if constexpr (std::is_same_v<T, dist::Binomial>) {
          const double q = mean / static_cast<double>(v.trials);
          if (q <= 0.0) return 0.0;
          if (q >= 1.0) return static_cast<double>(v.trials);
          return static_cast<double>(
              std::binomial_distribution<long>(v.trials, q)(rng));
        } else if constexpr (std::is_same_v<T, dist::Poisson>) {
          if (mean <= 0.0) return 0.0;
          return static_cast<double>(std::poisson_distribution<long>(mean)(rng));
        } else if constexpr (std::is_same_v<T, dist::Exponential>) {
          return std::exponential_distribution<double>(1.0 / mean)(rng);
        } else if constexpr (std::is_same_v<T, dist::GammaByScale>) {
          return std::gamma_distribution<double>(v.b * mean, 1.0 / v.b)(rng);
        } else {
          return std::gamma_distribution<double>(v.a, mean / v.a)(rng);
        }
      },
      d);
}

}  // namespace detail

/// Draws one value with the given mean; exposed for moment tests.
inline double sample_entry(const EdgeDistribution& d, double mean,
                           RandomStream::Engine& rng) {
  return detail::draw_entry(d, mean, rng);
}

/// i.i.d. uniform labels on [K], redrawn as a whole until every community
/// is non-empty.
inline CommunityLabels sample_labels(Index n, int k, const RandomStream& stream) {
  if (k < 1) throw ValidationError("K must be >= 1");
  if (n < k) {
    throw ValidationError("cannot place " + std::to_string(n) + " nodes into " +
                          std::to_string(k) + " non-empty communities");
  }
  auto rng = stream.engine();
  std::uniform_int_distribution<int> pick(0, k - 1);
  std::vector<int> ids(static_cast<std::size_t>(n));
  constexpr int kMaxAttempts = 1'000'000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::vector<char> seen(static_cast<std::size_t>(k), 0);
    int distinct = 0;
    for (auto& id : ids) {
      id = pick(rng);
      if (!seen[static_cast<std::size_t>(id)]) {
        seen[static_cast<std::size_t>(id)] = 1;
        ++distinct;
      }
    }
    if (distinct == k) return CommunityLabels(std::move(ids), k);
  }
  throw ConvergenceError("sample_labels: no covering draw after 1e6 attempts");
}

/// Symmetric A with E[A] = Omega. The upper triangle including the diagonal
/// is drawn independently in row-major order and mirrored.
inline Matrix sample_adjacency(const Matrix& omega, const EdgeDistribution& d,
                               const RandomStream& stream) {
  if (omega.rows() != omega.cols()) throw ValidationError("Omega must be square");
  check_domain(omega, d);
  auto rng = stream.engine();
  const Index n = omega.rows();
  Matrix a(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) {
      const double v = detail::draw_entry(d, omega(i, j), rng);
      a(i, j) = v;
      a(j, i) = v;
    }
  }
  return a;
}

inline Matrix sample_adjacency(const PopulationMatrix& omega,
                               const EdgeDistribution& d,
                               const RandomStream& stream) {
  return sample_adjacency(omega.omega, d, stream);
}

struct NoiseSpec {
  double variance = 0.0;  // sigma^2_W
};

/// Symmetric zero-mean Normal noise; variance 0 gives the zero matrix.
inline Matrix sample_noise(Index n, NoiseSpec noise, const RandomStream& stream) {
  if (!(noise.variance >= 0.0)) throw ValidationError("sigma2W must be >= 0");
  Matrix w = Matrix::Zero(n, n);
  if (noise.variance == 0.0) return w;
  auto rng = stream.engine();
  std::normal_distribution<double> normal(0.0, std::sqrt(noise.variance));
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) {
      const double v = normal(rng);
      w(i, j) = v;
      w(j, i) = v;
    }
  }
  return w;
}

inline Matrix observe(const Matrix& a, const Matrix& w) {
  if (a.rows() != w.rows() || a.cols() != w.cols()) {
    throw ValidationError("observe: A and W shapes differ");
  }
  if (!is_symmetric(a) || !is_symmetric(w)) {
    throw ValidationError("observe: A and W must be symmetric");
  }
  return a + w;
}

struct AdjacencyBundle {
  Matrix a;
  Matrix w;
  Matrix ahat;
};

/// A from `a_stream`, W from `w_stream`, and their sum.
inline AdjacencyBundle sample_bundle(const Matrix& omega, const EdgeDistribution& d,
                                     NoiseSpec noise, const RandomStream& a_stream,
                                     const RandomStream& w_stream) {
  AdjacencyBundle out;
  out.a = sample_adjacency(omega, d, a_stream);
  out.w = sample_noise(omega.rows(), noise, w_stream);
  out.ahat = out.a + out.w;
  return out;
}

/// Diagnostics for the variance and sparsity assumptions. Advisory only.
struct AssumptionReport {
  double gamma_exact = 0.0;  // max Var(A(i,j)) / rho for this spec
  double gamma_bound = 0.0;  // distribution-level bound used in the rates
  double sparsity_statistic = 0.0;  // (gamma*rho*n + sigma2W*n) / log(n)
  double rho_over_noise = std::numeric_limits<double>::infinity();
  std::vector<std::string> flags;
};

inline AssumptionReport check_assumptions(const ModelSpec& spec,
                                          const EdgeDistribution& d,
                                          NoiseSpec noise) {
  AssumptionReport out;
  const double rho = spec.rho();
  const double n = static_cast<double>(spec.n());
  const Matrix& p = spec.connectivity().matrix();

  double max_var = 0.0;
  bool in_domain = true;
  for (Index k = 0; k < p.rows(); ++k) {
    for (Index l = 0; l < p.cols(); ++l) {
      const double mean = rho * p(k, l);
      in_domain = in_domain && mean_in_domain(d, mean);
      max_var = std::max(max_var, entry_variance(d, mean));
    }
  }
  out.gamma_exact = max_var / rho;
  out.gamma_bound = std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, dist::Normal>) return v.variance / rho;
        if constexpr (std::is_same_v<T, dist::Exponential>) return rho;
        if constexpr (std::is_same_v<T, dist::GammaByScale>) return 1.0 / v.b;
        if constexpr (std::is_same_v<T, dist::GammaByShape>) return rho / v.a;
        return 1.0;  // Bernoulli, Binomial, Poisson
      },
      d);

  const double log_n = std::log(n);
  const double numer = out.gamma_bound * rho * n + noise.variance * n;
  out.sparsity_statistic =
      log_n > 0.0 ? numer / log_n : std::numeric_limits<double>::infinity();
  if (noise.variance > 0.0) out.rho_over_noise = rho / noise.variance;

  if (!in_domain) {
    out.flags.push_back("some rho*P entries are outside the " +
                        distribution_name(d) + " parameter domain");
  }
  if (out.sparsity_statistic < 10.0) {
    out.flags.push_back("(gamma*rho*n + sigma2W*n)/log(n) is small: network may be too sparse");
  }
  if (out.rho_over_noise < 10.0) {
    out.flags.push_back("rho/sigma2W is small: noise variance is comparable to rho");
  }
  if (spec.connectivity().near_rank_deficient()) {
    out.flags.push_back("P is nearly rank deficient: sigma_K0(P)/sigma_1(P) < 1e-6");
  }
  return out;
}

}  // namespace dfm
