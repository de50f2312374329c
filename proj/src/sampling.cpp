#include "gossip/sampling.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace gossip {

std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng Rng::for_trial(std::uint64_t seed, std::uint64_t trial)
{
    return Rng(mix64(mix64(seed) ^ mix64(trial + 0x632be59bd9b4e019ULL)));
}

std::uint64_t Rng::below(std::uint64_t bound)
{
    if (bound == 0)
        throw std::invalid_argument("Rng::below: bound must be positive");
    // Reject the low 2^64 mod bound values so every residue is equally likely.
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t r = next();
        if (r >= threshold)
            return r % bound;
    }
}

SamplerSpec SamplerSpec::parse(std::string_view text)
{
    if (text == "pairwise")
        return single_edge();
    if (text == "all")
        return all_edges();
    if (text.starts_with("tau:")) {
        const std::string_view num = text.substr(4);
        std::size_t tau = 0;
        const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), tau);
        if (ec == std::errc{} && ptr == num.data() + num.size() && !num.empty() && tau >= 1)
            return fixed_size(tau);
    }
    throw std::invalid_argument("sampler spec '" + std::string(text)
                                + "' must be tau:K (K >= 1), pairwise or all");
}

std::string SamplerSpec::to_string() const
{
    switch (mode) {
    case SamplerMode::SingleEdge:
        return "pairwise";
    case SamplerMode::AllEdges:
        return "all";
    case SamplerMode::FixedSize:
        break;
    }
    return "tau:" + std::to_string(tau);
}

std::size_t SamplerSpec::block_size(std::size_t num_edges) const
{
    switch (mode) {
    case SamplerMode::SingleEdge:
        return 1;
    case SamplerMode::AllEdges:
        return num_edges;
    case SamplerMode::FixedSize:
        break;
    }
    return tau;
}

void SamplerSpec::validate(const Graph& g) const
{
    const std::size_t t = block_size(g.num_edges());
    if (t < 1 || t > g.num_edges())
        throw std::invalid_argument("block size " + std::to_string(t) + " outside 1.."
                                    + std::to_string(g.num_edges()) + " for this graph");
}

EdgeSampler::EdgeSampler(const Graph& g, SamplerSpec spec)
    : graph_(&g), tau_(spec.block_size(g.num_edges())), perm_(g.num_edges()), finder_(g.num_nodes())
{
    spec.validate(g);
    std::iota(perm_.begin(), perm_.end(), EdgeId{0});
    sample_.num_nodes = g.num_nodes();
    sample_.edges.reserve(tau_);
}

const SketchSample& EdgeSampler::draw(Rng& rng)
{
    const std::size_t m = perm_.size();
    sample_.edges.clear();
    if (tau_ == m) {
        sample_.edges.resize(m);
        std::iota(sample_.edges.begin(), sample_.edges.end(), EdgeId{0});
    } else {
        for (std::size_t i = 0; i < tau_; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.below(m - i));
            std::swap(perm_[i], perm_[j]);
            sample_.edges.push_back(perm_[i]);
        }
        std::sort(sample_.edges.begin(), sample_.edges.end());
    }
    finder_.find(*graph_, sample_.edges, sample_.components);
    return sample_;
}

SketchSample make_sample(const Graph& g, std::vector<EdgeId> edges)
{
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
        throw std::invalid_argument("edge subset contains a repeated edge");
    SketchSample s;
    s.components = components(g, edges);
    s.edges = std::move(edges);
    s.num_nodes = g.num_nodes();
    return s;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) noexcept
{
    if (k > n)
        return 0;
    k = std::min(k, n - k);
    constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        // r * (n - k + i) / i stays integral at every step.
        const std::uint64_t num = n - k + i;
        const std::uint64_t g = std::gcd(r, i);
        const std::uint64_t rr = r / g;
        const std::uint64_t ii = i / g;
        const std::uint64_t nn = num / ii; // gcd(rr, ii) = 1, so ii divides num
        if (nn != 0 && rr > kMax / nn)
            return kMax;
        r = rr * nn;
    }
    return r;
}

SubsetEnumerator::SubsetEnumerator(std::size_t num_edges, std::size_t tau, std::uint64_t cap)
    : m_(num_edges), current_(tau), count_(binomial(num_edges, tau))
{
    if (tau < 1 || tau > num_edges)
        throw std::invalid_argument("subset size " + std::to_string(tau) + " outside 1.."
                                    + std::to_string(num_edges));
    if (count_ > cap)
        throw std::length_error("C(" + std::to_string(num_edges) + ", " + std::to_string(tau)
                                + ") subsets exceed the enumeration cap of " + std::to_string(cap)
                                + "; use Monte Carlo estimation");
    std::iota(current_.begin(), current_.end(), EdgeId{0});
}

bool SubsetEnumerator::next(std::vector<EdgeId>& out)
{
    if (done_)
        return false;
    if (started_) {
        const std::size_t k = current_.size();
        std::size_t i = k;
        while (i > 0 && current_[i - 1] == m_ - k + (i - 1))
            --i;
        if (i == 0) {
            done_ = true;
            return false;
        }
        ++current_[i - 1];
        for (std::size_t j = i; j < k; ++j)
            current_[j] = current_[j - 1] + 1;
    }
    started_ = true;
    out = current_;
    return true;
}

SubsetEnumerator enumerate_subsets(const Graph& g, std::size_t tau)
{
    return SubsetEnumerator(g.num_edges(), tau);
}

} // namespace gossip
