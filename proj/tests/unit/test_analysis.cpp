#include <catch2/catch_amalgamated.hpp>

#include "gossip/analysis.hpp"
#include "gossip/graph.hpp"
#include "gossip/incidence.hpp"
#include "gossip/linalg.hpp"

#include <cmath>
#include <numeric>

using namespace gossip;
using Catch::Approx;

namespace {

std::vector<double> indices(std::size_t n)
{
    std::vector<double> c(n);
    std::iota(c.begin(), c.end(), 0.0);
    return c;
}

struct OracleCase {
    const char* graph;
    std::vector<double> rho; // rho(tau) for tau = 1..m
};

// Independent numpy enumeration, see tests/oracles/exact_rates.py.
const std::vector<OracleCase>& oracle_cases()
{
    static const std::vector<OracleCase> cases{
        {"complete:3", {0.5, 0.0, 0.0}},
        {"path:4", {0.902368927062183, 0.666666666666667, 0.0}},
        {"ring:6",
         {0.916666666666667, 0.788888888888889, 0.595833333333334, 0.318888888888889, 0.0, 0.0}},
        {"complete:4",
         {0.666666666666667, 0.333333333333334, 0.0666666666666668, 0.0, 0.0, 0.0}},
        {"ring:8",
         {0.963388347648318, 0.9099408195541, 0.831239477846076, 0.714498968998096, 0.541580301061571,
          0.2940928844818, 0.0, 0.0}},
        {"ring:10",
         {0.980901699437495, 0.954395991467582, 0.917213290026026, 0.864384294138671, 0.788279150352327,
          0.677247595942241, 0.514465322287222, 0.281719798640653, 0.0, 0.0}},
        {"grid:2x3",
         {0.928571428571429, 0.817460317460317, 0.65, 0.410952380952381, 0.128571428571429, 0.0, 0.0}},
    };
    return cases;
}

} // namespace

TEST_CASE("expected projection examples", "[analysis][h]")
{
    SECTION("triangle, tau = 1 gives I / 6")
    {
        const Graph g = make_complete(3);
        const IncidenceSystem sys(g);
        const ExpectedProjection p = expected_projection(g, sys, SamplerSpec::single_edge());
        CHECK(p.method == HMethod::ExactEnumeration);
        CHECK(p.samples == 3);
        CHECK(linalg::max_abs_diff(p.h, linalg::DenseMatrix::identity(3) * (1.0 / 6.0)) < 1e-15);
    }
    SECTION("tau = m gives the pseudoinverse of A A^T")
    {
        for (const Graph& g : {make_ring(7), make_grid(3, 3), make_complete(5)}) {
            const IncidenceSystem sys(g);
            const ExpectedProjection p = expected_projection(g, sys, SamplerSpec::all_edges());
            CHECK(p.samples == 1);
            const linalg::DenseMatrix gram = sys.matrix() * sys.matrix().transpose();
            CHECK(linalg::max_abs_diff(p.h, linalg::pinv_psd(gram)) < 1e-10);
        }
    }
    SECTION("H is symmetric positive semidefinite")
    {
        const Graph g = make_grid(3, 3);
        const IncidenceSystem sys(g);
        const ExpectedProjection p = expected_projection(g, sys, SamplerSpec::fixed_size(5));
        CHECK(p.h.is_symmetric(1e-14));
        CHECK(linalg::sym_eigen(p.h).eigenvalues.front() > -1e-12);
    }
    SECTION("Monte Carlo agrees with enumeration on the triangle, tau = 2")
    {
        const Graph g = make_complete(3);
        const IncidenceSystem sys(g);
        const ExpectedProjection exact = expected_projection(g, sys, SamplerSpec::fixed_size(2));
        const ExpectedProjection mc =
            expected_projection(g, sys, SamplerSpec::fixed_size(2), 17, 100'000, true);
        CHECK(mc.method == HMethod::MonteCarlo);
        CHECK(mc.samples == 100'000);
        CHECK(linalg::max_abs_diff(exact.h, mc.h) < 0.01);
    }
    SECTION("large subset counts fall back to Monte Carlo")
    {
        const Graph g = make_ring(40);
        const IncidenceSystem sys(g);
        const ExpectedProjection p = expected_projection(g, sys, SamplerSpec::fixed_size(20), 3, 2000);
        CHECK(p.method == HMethod::MonteCarlo);
        CHECK(p.samples == 2000);
        CHECK(to_string(p.method) == "monte-carlo");
    }
}

TEST_CASE("convergence rate examples", "[analysis][rate]")
{
    SECTION("triangle, tau = 1")
    {
        const RateReport r = rate_for(make_complete(3), SamplerSpec::single_edge());
        CHECK(r.rho == Approx(0.5).margin(1e-10));
        CHECK(r.rho_expected_w == Approx(0.5).margin(1e-10));
        CHECK(r.lambda_min_plus == Approx(0.5).margin(1e-10));
        CHECK(r.iter_complexity == Approx(2.0).margin(1e-9));
        CHECK(!r.one_step);
    }
    SECTION("one-edge graph and tau = m are one-step methods")
    {
        const RateReport p2 = rate_for(make_path(2), SamplerSpec::single_edge());
        CHECK(p2.rho == 0.0);
        CHECK(p2.one_step);
        for (const Graph& g : {make_ring(6), make_grid(3, 3), make_complete(4)}) {
            const RateReport r = rate_for(g, SamplerSpec::all_edges());
            CHECK(r.rho == 0.0);
            CHECK(r.one_step);
            CHECK(r.lambda_min_plus == Approx(1.0).margin(1e-10));
        }
    }
    SECTION("rates strictly inside (0, 1) below tau = m")
    {
        const Graph g = make_grid(3, 3);
        for (std::size_t tau = 1; tau < 6; ++tau) {
            const RateReport r = rate_for(g, SamplerSpec::fixed_size(tau));
            CHECK(r.rho > 0.0);
            CHECK(r.rho < 1.0);
            CHECK(r.tau == tau);
        }
    }
    SECTION("singular H is rejected")
    {
        const Graph g = make_ring(5);
        const IncidenceSystem sys(g);
        ExpectedProjection p;
        p.h = linalg::DenseMatrix(5, 5);
        p.h(0, 0) = 0.5;
        CHECK_THROWS_AS(convergence_rate(sys, p), linalg::NumericalError);
        p.h = linalg::DenseMatrix(4, 4);
        CHECK_THROWS_AS(convergence_rate(sys, p), std::invalid_argument);
    }
}

TEST_CASE("exact rates match the independent oracle", "[analysis][rate][oracle]")
{
    for (const OracleCase& oc : oracle_cases()) {
        const Graph g = graph_from_spec(oc.graph);
        REQUIRE(oc.rho.size() == g.num_edges());
        for (std::size_t tau = 1; tau <= g.num_edges(); ++tau) {
            INFO(oc.graph << " tau=" << tau);
            const RateReport r = rate_for(g, SamplerSpec::fixed_size(tau));
            CHECK(r.rho == Approx(oc.rho[tau - 1]).margin(1e-10));
        }
    }
}

TEST_CASE("scaled iteration complexity on the triangle", "[analysis][rate][oracle]")
{
    // tau / (1 - rho(tau)) for tau = 1, 2, 3: flat, then rising once rho hits 0.
    const Graph g = make_complete(3);
    const double expected[] = {2.0, 2.0, 3.0};
    for (std::size_t tau = 1; tau <= 3; ++tau) {
        const RateReport r = rate_for(g, SamplerSpec::fixed_size(tau));
        CHECK(static_cast<double>(tau) * r.iter_complexity == Approx(expected[tau - 1]).margin(1e-9));
    }
}

TEST_CASE("Monte Carlo rate agrees with exact rate", "[analysis][rate]")
{
    for (const auto& [spec, tau] : {std::pair{"ring:8", 3u}, std::pair{"grid:2x3", 2u}, std::pair{"complete:4", 2u}}) {
        const Graph g = graph_from_spec(spec);
        const IncidenceSystem sys(g);
        const SamplerSpec s = SamplerSpec::fixed_size(tau);
        const RateReport exact = convergence_rate(sys, expected_projection(g, sys, s));
        const RateReport mc = convergence_rate(sys, expected_projection(g, sys, s, 99, 100'000, true));
        INFO(spec << " tau=" << tau);
        CHECK(std::abs(exact.rho - mc.rho) < 0.02);
    }
}

TEST_CASE("averaging time bound", "[analysis][bound]")
{
    CHECK(averaging_time_bound(0.5, 0.01).iterations == 20);
    CHECK(averaging_time_bound(0.5, 0.01).loose == Approx(6.0 * std::log(100.0)));
    CHECK(averaging_time_bound(0.0, 0.01).iterations == 1);
    CHECK(averaging_time_bound(0.5, 0.999999).iterations == 1);
    CHECK(averaging_time_bound(0.5, 0.999999).loose < 1e-4);
    for (double rho : {0.01, 0.3, 0.5, 0.9, 0.999})
        for (double eps : {1e-6, 0.01, 0.5})
            CHECK(averaging_time_bound(rho, eps).loose
                  >= 3.0 * std::log(1.0 / eps) / std::log(1.0 / rho) - 1e-9);
    CHECK_THROWS_AS(averaging_time_bound(1.0, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(averaging_time_bound(0.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(averaging_time_bound(0.5, 1.0), std::invalid_argument);
}

TEST_CASE("empirical averaging time", "[analysis][bound]")
{
    const Graph tri = make_complete(3);
    CHECK(empirical_averaging_time(tri, SamplerSpec::single_edge(), std::vector<double>(3, 2.0), 0.01, 1000, 1)
          == 0);
    CHECK(empirical_averaging_time(make_ring(10), SamplerSpec::all_edges(), indices(10), 0.01, 1000, 1) == 1);
    const std::uint64_t k = empirical_averaging_time(tri, SamplerSpec::single_edge(), indices(3), 0.01, 2000, 5);
    CHECK(k >= 1);
    CHECK(k <= averaging_time_bound(0.5, 0.01).iterations);

    CHECK_THROWS_AS(empirical_averaging_time(tri, SamplerSpec::single_edge(), indices(3), 0.01, 999, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(empirical_averaging_time(make_ring(30), SamplerSpec::single_edge(), indices(30), 0.01,
                                             1000, 1, 5),
                    std::runtime_error);
}

TEST_CASE("speedup curve", "[analysis][speedup]")
{
    const Graph g = make_ring(12);
    const std::vector<std::size_t> taus{4, 1, 2, 12, 2};
    const auto rows = speedup_curve(g, indices(12), 0.01, taus, 40, 3);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].tau == 1);
    CHECK(rows[0].baseline == rows[0].mean_iters);
    CHECK(rows.back().tau == 12);
    CHECK(rows.back().mean_iters == 1.0);
    CHECK(rows.back().std_iters == 0.0);
    for (const SpeedupRow& r : rows) {
        CHECK(r.baseline == Approx(rows[0].mean_iters / static_cast<double>(r.tau)));
        REQUIRE(r.theoretical_inv_gap.has_value());
        CHECK(r.capped_trials == 0);
    }
    CHECK(*rows.back().theoretical_inv_gap == Approx(1.0));

    const std::vector<std::size_t> only_one{1};
    const auto single = speedup_curve(g, indices(12), 0.01, only_one, 20, 3);
    REQUIRE(single.size() == 1);
    CHECK(single[0].baseline == single[0].mean_iters);

    const std::vector<std::size_t> no_one{2, 4};
    CHECK_THROWS_AS(speedup_curve(g, indices(12), 0.01, no_one, 20, 3), std::invalid_argument);
    CHECK_THROWS_AS(speedup_curve(g, indices(12), 0.01, only_one, 19, 3), std::invalid_argument);
    const std::vector<std::size_t> too_big{1, 13};
    CHECK_THROWS_AS(speedup_curve(g, indices(12), 0.01, too_big, 20, 3), std::invalid_argument);
}

TEST_CASE("speedup curve is reproducible", "[analysis][speedup]")
{
    const Graph g = make_grid(3, 3);
    const std::vector<std::size_t> taus{1, 3, 6};
    SpeedupOptions opt;
    opt.theoretical = false;
    const auto a = speedup_curve(g, indices(9), 0.01, taus, 25, 8, opt);
    const auto b = speedup_curve(g, indices(9), 0.01, taus, 25, 8, opt);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].mean_iters == b[i].mean_iters);
        CHECK(a[i].std_iters == b[i].std_iters);
        CHECK(!a[i].theoretical_inv_gap.has_value());
    }
    CHECK(tau_seed(8, 1) != tau_seed(8, 2));
}
