#pragma once

#include "gossip/engine.hpp"
#include "gossip/graph.hpp"
#include "gossip/incidence.hpp"
#include "gossip/linalg.hpp"
#include "gossip/sampling.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gossip {

enum class HMethod { ExactEnumeration, MonteCarlo };

std::string to_string(HMethod method);

/// H = E[R_S] with R_S = I_S (I_S^T A A^T I_S)^+ I_S^T, an m x m matrix.
struct ExpectedProjection {
    linalg::DenseMatrix h;
    HMethod method = HMethod::ExactEnumeration;
    std::uint64_t samples = 0; // subsets averaged
    std::size_t tau = 0;
};

/// Exact average over all C(m, tau) subsets when that is within
/// kEnumerationCap, otherwise a Monte Carlo mean over
/// min(1e5, 100 C(m, tau)) drawn subsets (or `mc_samples` when given).
ExpectedProjection expected_projection(const Graph& g, const IncidenceSystem& sys,
                                       const SamplerSpec& spec, std::uint64_t seed = 0,
                                       std::optional<std::uint64_t> mc_samples = std::nullopt,
                                       bool force_monte_carlo = false);

struct RateReport {
    linalg::DenseMatrix h;
    double rho = 0.0;                 // 1 - lambda_min_plus
    double lambda_min_plus = 0.0;     // smallest nonzero eigenvalue of A^T H A
    double rho_expected_w = 0.0;      // second largest eigenvalue of I - A^T H A
    double iter_complexity = 0.0;     // 1 / (1 - rho)
    bool one_step = false;            // rho == 0: a single iteration solves the system
    HMethod method = HMethod::ExactEnumeration;
    std::uint64_t samples = 0;
    std::size_t tau = 0;
};

/// Convergence rate from H. Throws linalg::NumericalError unless A^T H A has
/// exactly one zero eigenvalue, or if the two routes to rho disagree by more
/// than 1e-8.
RateReport convergence_rate(const IncidenceSystem& sys, const ExpectedProjection& projection);

/// Shortcut: expected_projection followed by convergence_rate.
RateReport rate_for(const Graph& g, const SamplerSpec& spec, std::uint64_t seed = 0);

struct AveragingTimeBound {
    std::uint64_t iterations = 0; // ceil(3 log(1/eps) / log(1/rho)); 1 when rho == 0
    double loose = 0.0;           // 3 log(1/eps) / (1 - rho)
};

AveragingTimeBound averaging_time_bound(double rho, double eps);

/// Empirical (1 - eps)-quantile of the first iteration at which the relative
/// error drops below eps, over `trials` independent runs with fixed c.
std::uint64_t empirical_averaging_time(const Graph& g, const SamplerSpec& spec,
                                       std::span<const double> c, double eps, std::size_t trials,
                                       std::uint64_t seed,
                                       std::size_t max_iterations = kDefaultMaxIterations);

struct SpeedupRow {
    std::size_t tau = 0;
    double mean_iters = 0.0;
    double std_iters = 0.0;  // sample standard deviation over trials
    double baseline = 0.0;   // l / tau, l = mean_iters at tau = 1
    std::optional<double> theoretical_inv_gap; // 1 / (1 - rho(tau)) from exact H
    std::size_t capped_trials = 0;
};

struct SpeedupOptions {
    std::size_t max_iterations = kDefaultMaxIterations;
    bool theoretical = true; // compute 1/(1-rho) where H can be enumerated
};

/// Mean iterations to reach relative error < eps for each tau. The list must
/// contain 1.
std::vector<SpeedupRow> speedup_curve(const Graph& g, std::span<const double> c, double eps,
                                      std::span<const std::size_t> taus, std::size_t trials,
                                      std::uint64_t seed, const SpeedupOptions& options = {});

/// Per-tau stream seed so different block sizes never share random streams.
std::uint64_t tau_seed(std::uint64_t seed, std::size_t tau) noexcept;

} // namespace gossip
