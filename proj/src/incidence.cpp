#include "gossip/incidence.hpp"

#include <limits>
#include <stdexcept>
#include <string>

namespace gossip {

namespace {

    void require_size(std::size_t got, std::size_t want, const char* what)
    {
        if (got != want)
            throw std::invalid_argument(std::string(what) + ": expected length " + std::to_string(want)
                                        + ", got " + std::to_string(got));
    }

    // Entry of row e at node x.
    double sign_at(const Edge& e, NodeId x)
    {
        if (x == e.u)
            return 1.0;
        if (x == e.v)
            return -1.0;
        return 0.0;
    }

} // namespace

IncidenceSystem::IncidenceSystem(const Graph& g)
    : n_(g.num_nodes()), edges_(g.edges().begin(), g.edges().end()), a_(g.num_edges(), g.num_nodes())
{
    for (EdgeId e = 0; e < edges_.size(); ++e) {
        a_(e, edges_[e].u) = 1.0;
        a_(e, edges_[e].v) = -1.0;
    }
}

double IncidenceSystem::row_dot(EdgeId e, std::span<const double> x) const
{
    const Edge& ed = edges_.at(e);
    return x[ed.u] - x[ed.v];
}

std::vector<double> IncidenceSystem::apply(std::span<const double> x) const
{
    require_size(x.size(), n_, "IncidenceSystem::apply");
    std::vector<double> out(edges_.size());
    for (EdgeId e = 0; e < edges_.size(); ++e)
        out[e] = x[edges_[e].u] - x[edges_[e].v];
    return out;
}

std::vector<double> IncidenceSystem::apply_transpose(std::span<const double> y) const
{
    require_size(y.size(), edges_.size(), "IncidenceSystem::apply_transpose");
    std::vector<double> out(n_, 0.0);
    for (EdgeId e = 0; e < edges_.size(); ++e) {
        out[edges_[e].u] += y[e];
        out[edges_[e].v] -= y[e];
    }
    return out;
}

linalg::DenseMatrix IncidenceSystem::gram_submatrix(std::span<const EdgeId> selected) const
{
    const std::size_t k = selected.size();
    linalg::DenseMatrix g(k, k);
    for (std::size_t a = 0; a < k; ++a) {
        const Edge& ea = edges_.at(selected[a]);
        g(a, a) = 2.0;
        for (std::size_t b = a + 1; b < k; ++b) {
            const Edge& eb = edges_.at(selected[b]);
            const double v = sign_at(ea, eb.u) * sign_at(eb, eb.u) + sign_at(ea, eb.v) * sign_at(eb, eb.v);
            g(a, b) = g(b, a) = v;
        }
    }
    return g;
}

linalg::DenseMatrix IncidenceSystem::gram_pseudoinverse(std::span<const EdgeId> selected,
                                                        std::span<const Component> components) const
{
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    const std::size_t k = selected.size();
    linalg::DenseMatrix out(k, k);

    std::vector<std::size_t> local(n_, kNone);
    std::vector<std::size_t> owner(n_, kNone);
    for (std::size_t r = 0; r < components.size(); ++r) {
        const auto& nodes = components[r].nodes;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            local.at(nodes[i]) = i;
            owner[nodes[i]] = r;
        }
    }
    std::vector<std::vector<std::size_t>> rows_of(components.size());
    for (std::size_t a = 0; a < k; ++a) {
        const std::size_t r = owner.at(edges_.at(selected[a]).u);
        if (r == kNone || owner[edges_[selected[a]].v] != r)
            throw std::invalid_argument("gram_pseudoinverse: components do not cover the selected edges");
        rows_of[r].push_back(a);
    }

    for (std::size_t r = 0; r < components.size(); ++r) {
        const std::size_t p = components[r].nodes.size();
        const double jp = 1.0 / static_cast<double>(p);
        linalg::DenseMatrix shifted(p, p, jp);
        for (std::size_t a : rows_of[r]) {
            const std::size_t u = local[edges_[selected[a]].u];
            const std::size_t v = local[edges_[selected[a]].v];
            shifted(u, u) += 1.0;
            shifted(v, v) += 1.0;
            shifted(u, v) -= 1.0;
            shifted(v, u) -= 1.0;
        }
        linalg::DenseMatrix lplus = linalg::inverse_spd(shifted);
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = 0; j < p; ++j)
                lplus(i, j) -= jp;
        const linalg::DenseMatrix sq = lplus * lplus;
        for (std::size_t a : rows_of[r]) {
            const std::size_t ua = local[edges_[selected[a]].u];
            const std::size_t va = local[edges_[selected[a]].v];
            for (std::size_t b : rows_of[r]) {
                const std::size_t ub = local[edges_[selected[b]].u];
                const std::size_t vb = local[edges_[selected[b]].v];
                out(a, b) = sq(ua, ub) - sq(ua, vb) - sq(va, ub) + sq(va, vb);
            }
        }
    }
    return out;
}

} // namespace gossip
