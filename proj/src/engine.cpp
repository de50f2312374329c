#include "gossip/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gossip {

namespace {

    // Steps between exact error recomputations when tracking incrementally.
    constexpr std::size_t kResyncInterval = 4096;

    void require(bool ok, const std::string& what)
    {
        if (!ok)
            throw std::invalid_argument(what);
    }

    void check_sample(const SketchSample& sample, std::size_t n)
    {
        require(sample.num_nodes == n, "sample drawn on a graph with " + std::to_string(sample.num_nodes)
                                           + " nodes applied to a state with " + std::to_string(n));
        require(!sample.edges.empty(), "sample has no edges");
    }

    void check_dual(const DualState& s, const IncidenceSystem& sys)
    {
        require(s.c.size() == sys.cols(), "dual state has " + std::to_string(s.c.size())
                                              + " node values, system has " + std::to_string(sys.cols()));
        require(s.y.size() == sys.rows(), "dual state has " + std::to_string(s.y.size())
                                              + " edge weights, system has " + std::to_string(sys.rows()));
    }

    double squared_distance_to(std::span<const double> x, double target)
    {
        double s = 0.0;
        for (double v : x)
            s += (v - target) * (v - target);
        return s;
    }

    // Least-norm multipliers for the selected block: (A A^T)[S,S]^+ (A x)[S].
    std::vector<double> block_multipliers(const IncidenceSystem& sys, std::span<const EdgeId> edges,
                                          std::span<const double> x)
    {
        const linalg::DenseMatrix pinv = linalg::pinv_psd(sys.gram_submatrix(edges));
        std::vector<double> residual(edges.size());
        for (std::size_t a = 0; a < edges.size(); ++a)
            residual[a] = sys.row_dot(edges[a], x);
        return pinv * std::span<const double>(residual);
    }

    void rnm_update(std::vector<double>& y, std::span<const double> c, std::span<const EdgeId> edges,
                    const IncidenceSystem& sys)
    {
        std::vector<double> x = sys.apply_transpose(y);
        for (std::size_t i = 0; i < x.size(); ++i)
            x[i] += c[i];
        const std::vector<double> lambda = block_multipliers(sys, edges, x);
        for (std::size_t a = 0; a < edges.size(); ++a)
            y[edges[a]] -= lambda[a];
    }

    bool is_constant(std::span<const double> c)
    {
        return std::all_of(c.begin(), c.end(), [&](double v) { return v == c.front(); });
    }

} // namespace

double mean(std::span<const double> v) noexcept
{
    if (v.empty())
        return 0.0;
    double s = 0.0;
    for (double e : v)
        s += e;
    return s / static_cast<double>(v.size());
}

double relative_error(std::span<const double> x, std::span<const double> c)
{
    require(x.size() == c.size(), "relative_error: dimension mismatch");
    if (is_constant(c))
        return 0.0;
    const double target = mean(c);
    return std::sqrt(squared_distance_to(x, target) / squared_distance_to(c, target));
}

PrimalState PrimalState::initial(std::vector<double> c)
{
    PrimalState s;
    s.x = c;
    s.c = std::move(c);
    return s;
}

DualState DualState::initial(std::vector<double> c, std::size_t num_edges)
{
    DualState s;
    s.y.assign(num_edges, 0.0);
    s.c = std::move(c);
    return s;
}

void average_components(std::span<double> x, const SketchSample& sample)
{
    check_sample(sample, x.size());
    for (const Component& comp : sample.components) {
        double sum = 0.0;
        for (NodeId i : comp.nodes)
            sum += x[i];
        const double avg = sum / static_cast<double>(comp.nodes.size());
        for (NodeId i : comp.nodes)
            x[i] = avg;
    }
}

PrimalState rbk_step(const PrimalState& state, const SketchSample& sample)
{
    PrimalState next = state;
    average_components(next.x, sample);
    ++next.k;
    return next;
}

PrimalState rbk_step_projection(const PrimalState& state, const SketchSample& sample,
                                const IncidenceSystem& sys)
{
    check_sample(sample, state.x.size());
    require(sys.cols() == state.x.size(), "incidence system does not match the state");
    const std::vector<double> lambda = block_multipliers(sys, sample.edges, state.x);
    std::vector<double> y(sys.rows(), 0.0);
    for (std::size_t a = 0; a < sample.edges.size(); ++a)
        y[sample.edges[a]] = lambda[a];
    const std::vector<double> correction = sys.apply_transpose(y);

    PrimalState next = state;
    for (std::size_t i = 0; i < next.x.size(); ++i)
        next.x[i] -= correction[i];
    ++next.k;
    return next;
}

DualState rnm_step(const DualState& state, const SketchSample& sample, const IncidenceSystem& sys)
{
    check_dual(state, sys);
    check_sample(sample, sys.cols());
    DualState next = state;
    rnm_update(next.y, next.c, sample.edges, sys);
    ++next.k;
    return next;
}

std::vector<double> primal_from_dual(const DualState& state, const IncidenceSystem& sys)
{
    check_dual(state, sys);
    std::vector<double> x = sys.apply_transpose(state.y);
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] += state.c[i];
    return x;
}

double dual_objective(const DualState& state, const IncidenceSystem& sys)
{
    check_dual(state, sys);
    const std::vector<double> ac = sys.apply(state.c);
    const std::vector<double> aty = sys.apply_transpose(state.y);
    double linear = 0.0;
    for (std::size_t e = 0; e < ac.size(); ++e)
        linear += ac[e] * state.y[e];
    double quad = 0.0;
    for (double v : aty)
        quad += v * v;
    return -linear - 0.5 * quad;
}

std::vector<double> advice(const DualState& state, const IncidenceSystem& sys)
{
    check_dual(state, sys);
    return sys.apply_transpose(state.y);
}

Engine parse_engine(std::string_view text)
{
    if (text == "primal")
        return Engine::Primal;
    if (text == "dual")
        return Engine::Dual;
    throw std::invalid_argument("engine must be primal or dual, got '" + std::string(text) + "'");
}

std::string_view to_string(Engine e) noexcept
{
    return e == Engine::Primal ? "primal" : "dual";
}

RunTrace run(const Graph& g, const SamplerSpec& spec, std::span<const double> c,
             const RunOptions& options, Rng& rng)
{
    require(options.eps > 0.0, "eps must be positive");
    require(c.size() == g.num_nodes(), "initial values have length " + std::to_string(c.size())
                                           + ", graph has " + std::to_string(g.num_nodes()) + " nodes");
    spec.validate(g);

    RunTrace trace;
    trace.final_x.assign(c.begin(), c.end());
    if (options.engine == Engine::Dual)
        trace.final_y.assign(g.num_edges(), 0.0);
    if (is_constant(c)) {
        trace.trivial = true;
        trace.reached = true;
        return trace;
    }

    const double target = mean(c);
    const double z0_sq = squared_distance_to(c, target);
    const double z0 = std::sqrt(z0_sq);
    const double trigger_sq = options.eps * options.eps * z0_sq * 1.01;
    const bool exact_every_step = options.record_steps || static_cast<bool>(options.observer)
                                  || options.engine == Engine::Dual;

    EdgeSampler sampler(g, spec);
    std::optional<IncidenceSystem> sys;
    if (options.engine == Engine::Dual)
        sys.emplace(g);

    std::vector<double>& x = trace.final_x;
    std::vector<double>& y = trace.final_y;
    double err_sq = z0_sq;
    double rel = 1.0;

    while (trace.iterations < options.max_iterations) {
        const SketchSample& sample = sampler.draw(rng);
        const double before = rel;

        if (options.engine == Engine::Primal) {
            // Track |x - x*|^2 through the nodes each component touches.
            for (const Component& comp : sample.components) {
                double sum = 0.0;
                double old_sq = 0.0;
                for (NodeId i : comp.nodes) {
                    sum += x[i];
                    old_sq += (x[i] - target) * (x[i] - target);
                }
                const double avg = sum / static_cast<double>(comp.nodes.size());
                for (NodeId i : comp.nodes)
                    x[i] = avg;
                err_sq += static_cast<double>(comp.nodes.size()) * (avg - target) * (avg - target) - old_sq;
            }
        } else {
            rnm_update(y, c, sample.edges, *sys);
            x = sys->apply_transpose(y);
            for (std::size_t i = 0; i < x.size(); ++i)
                x[i] += c[i];
        }
        ++trace.iterations;

        const bool resync = exact_every_step || err_sq < trigger_sq
                            || trace.iterations % kResyncInterval == 0;
        if (resync) {
            err_sq = squared_distance_to(x, target);
            rel = std::sqrt(err_sq) / z0;
        } else {
            rel = std::sqrt(std::max(err_sq, 0.0)) / z0;
        }

        if (options.record_steps) {
            StepRecord rec;
            rec.edges = sample.edges;
            rec.error_before = before;
            rec.error_after = rel;
            if (options.engine == Engine::Dual)
                rec.dual_objective = dual_objective(DualState{y, {c.begin(), c.end()}, trace.iterations}, *sys);
            trace.steps.push_back(std::move(rec));
        }
        if (options.observer)
            options.observer(StepView{trace.iterations, x, y, sample, rel});

        if (resync && rel < options.eps) {
            trace.reached = true;
            break;
        }
    }
    trace.capped = !trace.reached;
    trace.final_error = relative_error(x, c);
    return trace;
}

} // namespace gossip
