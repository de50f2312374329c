#pragma once

#include "gossip/graph.hpp"
#include "gossip/incidence.hpp"
#include "gossip/sampling.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace gossip {

/// Node values x^k of the primal (block Kaczmarz) iteration. Starts at x = c.
struct PrimalState {
    std::vector<double> x;
    std::vector<double> c;
    std::size_t k = 0;

    static PrimalState initial(std::vector<double> c);
};

/// Edge weights y^k of the dual (randomized Newton) iteration. Starts at
/// y = 0; the node values it stands for are c + A^T y.
struct DualState {
    std::vector<double> y;
    std::vector<double> c;
    std::size_t k = 0;

    static DualState initial(std::vector<double> c, std::size_t num_edges);
};

/// Each component of the sample replaces its node values with their average.
PrimalState rbk_step(const PrimalState& state, const SketchSample& sample);

/// In-place form of rbk_step used by the run loops.
void average_components(std::span<double> x, const SketchSample& sample);

/// The same step evaluated as an explicit projection,
///   x - A^T I_S (I_S^T A A^T I_S)^+ I_S^T A x.
/// Dense and slow; kept as an independent check on rbk_step.
PrimalState rbk_step_projection(const PrimalState& state, const SketchSample& sample,
                                const IncidenceSystem& sys);

/// y - I_S (I_S^T A A^T I_S)^+ I_S^T A (c + A^T y): exact maximization of the
/// dual objective over the selected coordinates, least-norm solution.
DualState rnm_step(const DualState& state, const SketchSample& sample, const IncidenceSystem& sys);

/// c + A^T y.
std::vector<double> primal_from_dual(const DualState& state, const IncidenceSystem& sys);

/// D(y) = -(A c)^T y - 1/2 |A^T y|^2.
double dual_objective(const DualState& state, const IncidenceSystem& sys);

/// A^T y: the correction each node adds to its private value.
std::vector<double> advice(const DualState& state, const IncidenceSystem& sys);

enum class Engine { Primal, Dual };

Engine parse_engine(std::string_view text);
std::string_view to_string(Engine e) noexcept;

inline constexpr std::size_t kDefaultMaxIterations = 1'000'000;

struct StepRecord {
    std::vector<EdgeId> edges;
    double error_before = 0.0; // relative error before the step
    double error_after = 0.0;
    std::optional<double> dual_objective; // dual engine only
};

/// Read-only view handed to a step observer after every iteration.
struct StepView {
    std::size_t k;                // iterations completed
    std::span<const double> x;    // current node values
    std::span<const double> y;    // dual weights, empty for the primal engine
    const SketchSample& sample;   // subset used by this step
    double relative_error;        // |x - x*| / |c - x*|
};

using StepObserver = std::function<void(const StepView&)>;

struct RunOptions {
    Engine engine = Engine::Primal;
    double eps = 0.01;
    std::size_t max_iterations = kDefaultMaxIterations;
    bool record_steps = false;
    StepObserver observer;
};

struct RunTrace {
    std::size_t iterations = 0;
    bool reached = false;  // relative error dropped below eps
    bool capped = false;   // stopped at max_iterations first
    bool trivial = false;  // c was already constant
    double final_error = 0.0;
    std::vector<StepRecord> steps;
    std::vector<double> final_x;
    std::vector<double> final_y; // dual engine only
};

/// Iterates until |x^k - x*| / |c - x*| < eps or the cap is reached, with
/// x* = mean(c) * 1. Constant c returns immediately with zero iterations.
RunTrace run(const Graph& g, const SamplerSpec& spec, std::span<const double> c,
             const RunOptions& options, Rng& rng);

/// |x - mean(c) 1| / |c - mean(c) 1|; 0 when c is constant.
double relative_error(std::span<const double> x, std::span<const double> c);

double mean(std::span<const double> v) noexcept;

} // namespace gossip
