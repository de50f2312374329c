#include "gossip/analysis.hpp"

#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gossip {

namespace {

    constexpr std::uint64_t kMonteCarloMax = 100'000;
    constexpr double kRateCrossCheck = 1e-8;
    constexpr double kOneStepTolerance = 1e-12;

    void add_block(linalg::DenseMatrix& h, std::span<const EdgeId> edges, const linalg::DenseMatrix& block)
    {
        for (std::size_t a = 0; a < edges.size(); ++a)
            for (std::size_t b = 0; b < edges.size(); ++b)
                h(edges[a], edges[b]) += block(a, b);
    }

} // namespace

std::string to_string(HMethod method)
{
    return method == HMethod::ExactEnumeration ? "exact-enumeration" : "monte-carlo";
}

std::uint64_t tau_seed(std::uint64_t seed, std::size_t tau) noexcept
{
    return mix64(seed ^ mix64(0x5851f42d4c957f2dULL + tau));
}

ExpectedProjection expected_projection(const Graph& g, const IncidenceSystem& sys,
                                       const SamplerSpec& spec, std::uint64_t seed,
                                       std::optional<std::uint64_t> mc_samples, bool force_monte_carlo)
{
    spec.validate(g);
    const std::size_t m = g.num_edges();
    const std::size_t tau = spec.block_size(m);
    const std::uint64_t subsets = binomial(m, tau);

    ExpectedProjection out;
    out.h = linalg::DenseMatrix(m, m);
    out.tau = tau;

    if (!force_monte_carlo && subsets <= kEnumerationCap) {
        SubsetEnumerator it(m, tau);
        ComponentFinder finder(g.num_nodes());
        std::vector<EdgeId> s;
        std::vector<Component> pieces;
        while (it.next(s)) {
            finder.find(g, s, pieces);
            add_block(out.h, s, sys.gram_pseudoinverse(s, pieces));
        }
        out.method = HMethod::ExactEnumeration;
        out.samples = subsets;
    } else {
        const std::uint64_t n_draws = mc_samples.value_or(
            std::min<std::uint64_t>(kMonteCarloMax, subsets > kMonteCarloMax / 100 ? kMonteCarloMax : 100 * subsets));
        if (n_draws == 0)
            throw std::invalid_argument("Monte Carlo estimate needs at least one sample");
        EdgeSampler sampler(g, spec);
        Rng rng(mix64(seed));
        for (std::uint64_t i = 0; i < n_draws; ++i) {
            const SketchSample& s = sampler.draw(rng);
            add_block(out.h, s.edges, sys.gram_pseudoinverse(s.edges, s.components));
        }
        out.method = HMethod::MonteCarlo;
        out.samples = n_draws;
    }
    out.h *= 1.0 / static_cast<double>(out.samples);
    return out;
}

RateReport convergence_rate(const IncidenceSystem& sys, const ExpectedProjection& projection)
{
    const linalg::DenseMatrix& a = sys.matrix();
    if (projection.h.rows() != a.rows() || !projection.h.is_square())
        throw std::invalid_argument("H does not match the incidence system");

    linalg::DenseMatrix m = a.transpose() * (projection.h * a);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i + 1; j < m.cols(); ++j)
            m(i, j) = m(j, i) = 0.5 * (m(i, j) + m(j, i));

    const linalg::EigenDecomposition eig = linalg::sym_eigen(m);
    const double cut = linalg::zero_cutoff(eig.eigenvalues);
    const auto zeros = static_cast<std::size_t>(
        std::count_if(eig.eigenvalues.begin(), eig.eigenvalues.end(), [cut](double l) { return l <= cut; }));
    if (zeros != 1)
        throw linalg::NumericalError("A^T H A has " + std::to_string(zeros)
                                     + " zero eigenvalues, expected exactly one (H singular on the "
                                       "range of A)");

    RateReport r;
    r.lambda_min_plus = linalg::lambda_min_plus(eig);
    r.rho = 1.0 - r.lambda_min_plus;

    const linalg::DenseMatrix expected_w = linalg::DenseMatrix::identity(m.rows()) - m;
    const linalg::EigenDecomposition eig_w = linalg::sym_eigen(expected_w);
    r.rho_expected_w = eig_w.eigenvalues[eig_w.eigenvalues.size() - 2];
    if (std::abs(r.rho_expected_w - r.rho) > kRateCrossCheck)
        throw linalg::NumericalError("rate cross-check failed: 1 - lambda_min_plus = " + std::to_string(r.rho)
                                     + " but lambda_2(E[W]) = " + std::to_string(r.rho_expected_w));

    if (std::abs(r.rho) <= kOneStepTolerance) {
        r.rho = 0.0;
        r.one_step = true;
    }
    if (r.rho < 0.0 || r.rho >= 1.0)
        throw linalg::NumericalError("rate " + std::to_string(r.rho) + " outside [0, 1)");
    r.iter_complexity = 1.0 / (1.0 - r.rho);
    r.h = projection.h;
    r.method = projection.method;
    r.samples = projection.samples;
    r.tau = projection.tau;
    return r;
}

RateReport rate_for(const Graph& g, const SamplerSpec& spec, std::uint64_t seed)
{
    const IncidenceSystem sys(g);
    return convergence_rate(sys, expected_projection(g, sys, spec, seed));
}

AveragingTimeBound averaging_time_bound(double rho, double eps)
{
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("eps must lie in (0, 1)");
    if (!(rho >= 0.0 && rho < 1.0))
        throw std::invalid_argument("rho must lie in [0, 1), got " + std::to_string(rho));
    const double log_inv_eps = std::log(1.0 / eps);
    AveragingTimeBound b;
    b.loose = 3.0 * log_inv_eps / (1.0 - rho);
    if (rho == 0.0) {
        b.iterations = 1;
        return b;
    }
    b.iterations = static_cast<std::uint64_t>(std::ceil(3.0 * log_inv_eps / std::log(1.0 / rho)));
    return b;
}

std::uint64_t empirical_averaging_time(const Graph& g, const SamplerSpec& spec,
                                       std::span<const double> c, double eps, std::size_t trials,
                                       std::uint64_t seed, std::size_t max_iterations)
{
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("eps must lie in (0, 1)");
    const auto min_trials = static_cast<std::size_t>(std::ceil(10.0 / eps - 1e-9));
    if (trials < min_trials)
        throw std::invalid_argument("need at least " + std::to_string(min_trials) + " trials for eps = "
                                    + std::to_string(eps));

    std::vector<std::size_t> hits(trials);
    RunOptions options;
    options.eps = eps;
    options.max_iterations = max_iterations;
    detail::parallel_for(trials, [&](std::size_t t) {
        Rng rng = Rng::for_trial(seed, t);
        const RunTrace trace = run(g, spec, c, options, rng);
        if (trace.capped)
            throw std::runtime_error("trial " + std::to_string(t) + " hit the iteration cap of "
                                     + std::to_string(max_iterations) + "; increase the cap");
        hits[t] = trace.iterations;
    });
    std::sort(hits.begin(), hits.end());
    // Smallest k with #{T > k} <= floor(eps * N).
    const auto allowed = static_cast<std::size_t>(std::floor(eps * static_cast<double>(trials)));
    return hits[trials - allowed - 1];
}

std::vector<SpeedupRow> speedup_curve(const Graph& g, std::span<const double> c, double eps,
                                      std::span<const std::size_t> taus, std::size_t trials,
                                      std::uint64_t seed, const SpeedupOptions& options)
{
    if (trials < 20)
        throw std::invalid_argument("speedup curves average over at least 20 trials, got "
                                    + std::to_string(trials));
    std::vector<std::size_t> ladder(taus.begin(), taus.end());
    std::sort(ladder.begin(), ladder.end());
    ladder.erase(std::unique(ladder.begin(), ladder.end()), ladder.end());
    if (ladder.empty() || ladder.front() != 1)
        throw std::invalid_argument("tau list must contain 1");
    for (std::size_t tau : ladder)
        SamplerSpec::fixed_size(tau).validate(g);

    RunOptions run_options;
    run_options.eps = eps;
    run_options.max_iterations = options.max_iterations;

    std::vector<SpeedupRow> rows;
    for (std::size_t tau : ladder) {
        const SamplerSpec spec = SamplerSpec::fixed_size(tau);
        std::vector<std::size_t> iters(trials);
        std::vector<char> capped(trials, 0);
        const std::uint64_t stream = tau_seed(seed, tau);
        detail::parallel_for(trials, [&](std::size_t t) {
            Rng rng = Rng::for_trial(stream, t);
            const RunTrace trace = run(g, spec, c, run_options, rng);
            iters[t] = trace.iterations;
            capped[t] = trace.capped ? 1 : 0;
        });

        SpeedupRow row;
        row.tau = tau;
        double sum = 0.0;
        for (std::size_t v : iters)
            sum += static_cast<double>(v);
        row.mean_iters = sum / static_cast<double>(trials);
        double ss = 0.0;
        for (std::size_t v : iters)
            ss += (static_cast<double>(v) - row.mean_iters) * (static_cast<double>(v) - row.mean_iters);
        row.std_iters = trials > 1 ? std::sqrt(ss / static_cast<double>(trials - 1)) : 0.0;
        row.capped_trials = static_cast<std::size_t>(std::count(capped.begin(), capped.end(), 1));
        if (options.theoretical && binomial(g.num_edges(), tau) <= kEnumerationCap)
            row.theoretical_inv_gap = rate_for(g, spec, seed).iter_complexity;
        rows.push_back(row);
    }
    const double ell = rows.front().mean_iters;
    for (SpeedupRow& row : rows)
        row.baseline = ell / static_cast<double>(row.tau);
    return rows;
}

} // namespace gossip
