#pragma once

#include "gossip/engine.hpp"
#include "gossip/graph.hpp"
#include "gossip/sampling.hpp"

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gossip::cli {

/// Exit statuses of the gossip tool.
enum ExitCode : int {
    kOk = 0,
    kNotConverged = 1, // some trial hit the iteration cap before reaching eps
    kUsage = 2,
    kFailure = 3,
};

/// A configuration value that failed validation; field() names the flag.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& what)
        : std::invalid_argument("--" + field + ": " + what), field_(std::move(field))
    {
    }

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct ExperimentConfig {
    std::string graph;
    std::string sampler = "pairwise";
    std::string engine = "primal";
    std::string c_init = "indices"; // indices | constant:V | file:PATH
    double eps = 0.01;
    std::size_t trials = 20;
    std::uint64_t seed = 1;
    std::string taus;               // comma-separated; empty = doubling ladder plus m
    std::string out;                // CSV destination; empty = stdout
    std::size_t max_iterations = kDefaultMaxIterations;
};

/// Everything a command needs, built from a validated config.
struct Experiment {
    Graph graph;
    SamplerSpec sampler;
    Engine engine;
    std::vector<double> c;
    std::vector<std::size_t> taus;
};

/// Validates every field and materializes the experiment. Throws ConfigError.
Experiment resolve(const ExperimentConfig& config);

std::vector<double> initial_values(std::string_view c_init, std::size_t num_nodes);
std::vector<std::size_t> parse_taus(std::string_view text);
/// 1, 2, 4, ... below m, then m.
std::vector<std::size_t> default_tau_ladder(std::size_t num_edges);

/// Shortest decimal text with 17 significant digits, '.' separator.
std::string format_real(double v);

/// One row per (trial, step): trial,k,relative_error,dual_objective,edges_selected.
int cmd_run(const ExperimentConfig& config, std::ostream& csv, std::ostream& summary);
/// One row per tau: tau,mean_iters,std_iters,baseline_ell_over_tau,theoretical_inv_gap.
int cmd_speedup(const ExperimentConfig& config, std::ostream& csv, std::ostream& summary);
/// Rate, spectral gap, iteration complexity and averaging-time bound.
int cmd_rate(const ExperimentConfig& config, std::ostream& summary);

/// Full command-line entry point: `gossip run|speedup|rate [flags]`.
/// Reads GOSSIP_MAX_ITERS from the environment.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace gossip::cli
