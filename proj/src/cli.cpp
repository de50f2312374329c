#include "gossip/cli.hpp"

#include "gossip/analysis.hpp"
#include "parallel.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

namespace gossip::cli {

namespace {

    std::string short_real(double v)
    {
        std::ostringstream os;
        os.precision(10);
        os << v;
        return os.str();
    }

    std::size_t parse_size(std::string_view text, const std::string& field)
    {
        std::size_t v = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
            throw ConfigError(field, "expected a non-negative integer, got '" + std::string(text) + "'");
        return v;
    }

    double parse_double(std::string_view text, const std::string& field)
    {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v))
            throw ConfigError(field, "expected a real number, got '" + std::string(text) + "'");
        return v;
    }

    template <class F>
    auto field_guard(const std::string& field, F&& f) -> decltype(f())
    {
        try {
            return f();
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError(field, e.what());
        }
    }

    std::string join_edges(std::span<const EdgeId> edges)
    {
        std::string s;
        for (std::size_t i = 0; i < edges.size(); ++i) {
            if (i)
                s += ';';
            s += std::to_string(edges[i]);
        }
        return s;
    }

} // namespace

std::string format_real(double v)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    if (ec != std::errc{})
        throw std::runtime_error("cannot format real value");
    return std::string(buf, ptr);
}

std::vector<double> initial_values(std::string_view c_init, std::size_t num_nodes)
{
    if (c_init == "indices") {
        std::vector<double> c(num_nodes);
        for (std::size_t i = 0; i < num_nodes; ++i)
            c[i] = static_cast<double>(i);
        return c;
    }
    if (c_init.starts_with("constant:"))
        return std::vector<double>(num_nodes, parse_double(c_init.substr(9), "c-init"));
    if (c_init.starts_with("file:")) {
        const std::string path(c_init.substr(5));
        std::ifstream in(path);
        if (!in)
            throw ConfigError("c-init", "cannot open '" + path + "'");
        std::vector<double> c;
        for (std::string tok; in >> tok;)
            c.push_back(parse_double(tok, "c-init"));
        if (c.size() != num_nodes)
            throw ConfigError("c-init", "file holds " + std::to_string(c.size()) + " values, graph has "
                                            + std::to_string(num_nodes) + " nodes");
        return c;
    }
    throw ConfigError("c-init", "expected indices, constant:V or file:PATH, got '" + std::string(c_init) + "'");
}

std::vector<std::size_t> parse_taus(std::string_view text)
{
    std::vector<std::size_t> taus;
    while (!text.empty()) {
        const auto comma = text.find(',');
        taus.push_back(parse_size(text.substr(0, comma), "taus"));
        if (comma == std::string_view::npos)
            break;
        text.remove_prefix(comma + 1);
    }
    return taus;
}

std::vector<std::size_t> default_tau_ladder(std::size_t num_edges)
{
    std::vector<std::size_t> taus;
    for (std::size_t t = 1; t < num_edges; t *= 2)
        taus.push_back(t);
    taus.push_back(num_edges);
    return taus;
}

Experiment resolve(const ExperimentConfig& config)
{
    if (config.graph.empty())
        throw ConfigError("graph", "required (ring:30, grid:4x4, path:10, complete:8, file:PATH)");
    Graph g = field_guard("graph", [&] { return graph_from_spec(config.graph); });
    const SamplerSpec sampler = field_guard("sampler", [&] {
        const SamplerSpec s = SamplerSpec::parse(config.sampler);
        s.validate(g);
        return s;
    });
    const Engine engine = field_guard("engine", [&] { return parse_engine(config.engine); });
    if (!(config.eps > 0.0 && config.eps < 1.0))
        throw ConfigError("eps", "must lie in (0, 1), got " + short_real(config.eps));
    if (config.trials < 1)
        throw ConfigError("trials", "must be at least 1");
    if (config.max_iterations < 1)
        throw ConfigError("GOSSIP_MAX_ITERS", "must be at least 1");

    std::vector<std::size_t> taus
        = config.taus.empty() ? default_tau_ladder(g.num_edges()) : parse_taus(config.taus);
    for (std::size_t t : taus)
        if (t < 1 || t > g.num_edges())
            throw ConfigError("taus", "tau " + std::to_string(t) + " outside 1.." + std::to_string(g.num_edges()));

    std::vector<double> c = initial_values(config.c_init, g.num_nodes());
    return Experiment{std::move(g), sampler, engine, std::move(c), std::move(taus)};
}

int cmd_run(const ExperimentConfig& config, std::ostream& csv, std::ostream& summary)
{
    const Experiment ex = resolve(config);
    RunOptions options;
    options.engine = ex.engine;
    options.eps = config.eps;
    options.max_iterations = config.max_iterations;
    options.record_steps = true;

    std::vector<std::string> rows(config.trials);
    std::vector<std::size_t> iterations(config.trials);
    std::vector<char> reached(config.trials);
    bool trivial = false;
    detail::parallel_for(config.trials, [&](std::size_t t) {
        Rng rng = Rng::for_trial(config.seed, t);
        const RunTrace trace = run(ex.graph, ex.sampler, ex.c, options, rng);
        std::string buf;
        for (std::size_t k = 0; k < trace.steps.size(); ++k) {
            const StepRecord& s = trace.steps[k];
            buf += std::to_string(t);
            buf += ',';
            buf += std::to_string(k + 1);
            buf += ',';
            buf += format_real(s.error_after);
            buf += ',';
            if (s.dual_objective)
                buf += format_real(*s.dual_objective);
            buf += ',';
            buf += join_edges(s.edges);
            buf += '\n';
        }
        rows[t] = std::move(buf);
        iterations[t] = trace.iterations;
        reached[t] = trace.reached ? 1 : 0;
        if (t == 0)
            trivial = trace.trivial;
    });

    csv << "trial,k,relative_error,dual_objective,edges_selected\n";
    for (const std::string& r : rows)
        csv << r;
    csv.flush();

    const auto [lo, hi] = std::minmax_element(iterations.begin(), iterations.end());
    double sum = 0.0;
    for (std::size_t v : iterations)
        sum += static_cast<double>(v);
    const auto hit = static_cast<std::size_t>(std::count(reached.begin(), reached.end(), 1));
    summary << "graph=" << config.graph << " sampler=" << ex.sampler.to_string()
            << " engine=" << to_string(ex.engine) << " eps=" << short_real(config.eps)
            << " trials=" << config.trials << " seed=" << config.seed << '\n';
    if (trivial)
        summary << "trivial input: initial values are already constant, no iterations needed\n";
    summary << "iterations mean=" << short_real(sum / static_cast<double>(config.trials)) << " min=" << *lo
            << " max=" << *hi << " reached=" << hit << '/' << config.trials << '\n';
    if (hit != config.trials) {
        summary << "error: " << config.trials - hit << " trial(s) stopped at the iteration cap of "
                << config.max_iterations << " before reaching eps\n";
        return kNotConverged;
    }
    return kOk;
}

int cmd_speedup(const ExperimentConfig& config, std::ostream& csv, std::ostream& summary)
{
    const Experiment ex = resolve(config);
    if (config.trials < 20)
        throw ConfigError("trials", "speedup curves need at least 20 trials per tau");
    if (std::find(ex.taus.begin(), ex.taus.end(), std::size_t{1}) == ex.taus.end())
        throw ConfigError("taus", "list must contain 1 (it defines the baseline)");

    SpeedupOptions options;
    options.max_iterations = config.max_iterations;
    const std::vector<SpeedupRow> rows
        = speedup_curve(ex.graph, ex.c, config.eps, ex.taus, config.trials, config.seed, options);

    csv << "tau,mean_iters,std_iters,baseline_ell_over_tau,theoretical_inv_gap\n";
    std::size_t capped = 0;
    for (const SpeedupRow& r : rows) {
        csv << r.tau << ',' << format_real(r.mean_iters) << ',' << format_real(r.std_iters) << ','
            << format_real(r.baseline) << ',';
        if (r.theoretical_inv_gap)
            csv << format_real(*r.theoretical_inv_gap);
        csv << '\n';
        capped += r.capped_trials;
    }
    csv.flush();

    summary << "graph=" << config.graph << " eps=" << short_real(config.eps) << " trials=" << config.trials
            << " seed=" << config.seed << '\n';
    for (const SpeedupRow& r : rows)
        summary << "tau=" << r.tau << " mean_iters=" << short_real(r.mean_iters)
                << " baseline=" << short_real(r.baseline)
                << (r.tau > 1 && r.mean_iters <= r.baseline ? " (superlinear)" : "") << '\n';
    if (capped) {
        summary << "error: " << capped << " run(s) stopped at the iteration cap of " << config.max_iterations
                << '\n';
        return kNotConverged;
    }
    return kOk;
}

int cmd_rate(const ExperimentConfig& config, std::ostream& summary)
{
    const Experiment ex = resolve(config);
    const RateReport r = rate_for(ex.graph, ex.sampler, config.seed);
    const AveragingTimeBound bound = averaging_time_bound(r.rho, config.eps);

    summary << "graph: " << config.graph << '\n'
            << "sampler: " << ex.sampler.to_string() << " (tau=" << r.tau << ")\n"
            << "H: " << to_string(r.method) << " over " << r.samples << " subsets\n"
            << "rho: " << short_real(r.rho) << '\n'
            << "lambda_min_plus: " << short_real(r.lambda_min_plus) << '\n'
            << "iteration_complexity: " << short_real(r.iter_complexity) << '\n'
            << "averaging_time_bound(eps=" << short_real(config.eps) << "): " << bound.iterations << '\n'
            << "averaging_time_bound_loose: " << short_real(bound.loose) << '\n';
    if (r.one_step)
        summary << "note: rho = 0, the method converges in one step\n";
    return kOk;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Randomized block gossip for average consensus"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "key=value configuration file; flags override its values");

    ExperimentConfig config;
    app.add_option("--graph", config.graph, "ring:N, grid:RxC, path:N, complete:N or file:PATH");
    app.add_option("--sampler", config.sampler, "pairwise, all or tau:K")->capture_default_str();
    app.add_option("--engine", config.engine, "primal or dual")->capture_default_str();
    app.add_option("--c-init", config.c_init, "indices, constant:V or file:PATH")->capture_default_str();
    app.add_option("--eps", config.eps, "target relative error")->capture_default_str();
    app.add_option("--trials", config.trials, "independent trials")->capture_default_str();
    app.add_option("--seed", config.seed, "base random seed")->capture_default_str();
    app.add_option("--taus", config.taus, "comma-separated block sizes for speedup");
    app.add_option("--out", config.out, "CSV output file (default: stdout)");

    auto* run_cmd = app.add_subcommand("run", "simulate gossip runs and emit a per-step CSV");
    auto* speedup_cmd = app.add_subcommand("speedup", "mean iterations per block size against l/tau");
    auto* rate_cmd = app.add_subcommand("rate", "exact or estimated convergence rate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (const char* env = std::getenv("GOSSIP_MAX_ITERS"); env && *env)
            config.max_iterations = parse_size(env, "GOSSIP_MAX_ITERS");

        if (rate_cmd->parsed())
            return cmd_rate(config, out);

        std::ofstream file;
        std::ostream* csv = &out;
        std::ostream* summary = &err;
        if (!config.out.empty()) {
            file.open(config.out, std::ios::binary);
            if (!file)
                throw ConfigError("out", "cannot open '" + config.out + "' for writing");
            csv = &file;
            summary = &out;
        }
        if (run_cmd->parsed())
            return cmd_run(config, *csv, *summary);
        if (speedup_cmd->parsed())
            return cmd_speedup(config, *csv, *summary);
    } catch (const ConfigError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kUsage;
}

} // namespace gossip::cli
