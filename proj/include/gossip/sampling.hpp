#pragma once

#include "gossip/graph.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace gossip {

/// Portable random stream: std::mt19937_64 (bit-exact by the standard) plus
/// hand-rolled bounded draws, since the std distributions are
/// implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Independent stream for trial `trial` of an experiment seeded with `seed`.
    static Rng for_trial(std::uint64_t seed, std::uint64_t trial);

    std::uint64_t next() { return engine_(); }
    /// Uniform integer in [0, bound), bound > 0, by rejection.
    std::uint64_t below(std::uint64_t bound);
    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; used to decorrelate derived seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

enum class SamplerMode { FixedSize, SingleEdge, AllEdges };

/// How the random edge subset is chosen each iteration.
struct SamplerSpec {
    SamplerMode mode = SamplerMode::SingleEdge;
    std::size_t tau = 1; // used by FixedSize only

    static SamplerSpec fixed_size(std::size_t tau) { return {SamplerMode::FixedSize, tau}; }
    static SamplerSpec single_edge() { return {SamplerMode::SingleEdge, 1}; }
    static SamplerSpec all_edges() { return {SamplerMode::AllEdges, 0}; }

    /// "tau:K", "pairwise" or "all".
    static SamplerSpec parse(std::string_view text);
    std::string to_string() const;

    /// Subset size on a graph with m edges.
    std::size_t block_size(std::size_t num_edges) const;
    /// Throws std::invalid_argument unless 1 <= tau <= m.
    void validate(const Graph& g) const;

    friend bool operator==(const SamplerSpec&, const SamplerSpec&) = default;
};

/// A selected edge subset and the connected pieces it induces.
struct SketchSample {
    std::vector<EdgeId> edges; // ascending
    std::vector<Component> components;
    std::size_t num_nodes = 0; // node count of the graph it was drawn on
};

/// Draws uniform fixed-size edge subsets by partial Fisher-Yates over a
/// persistent permutation of edge ids. The permutation carries over between
/// draws, which keeps each draw O(tau) without disturbing uniformity.
class EdgeSampler {
public:
    EdgeSampler(const Graph& g, SamplerSpec spec);

    /// Next subset; the reference stays valid until the following draw.
    const SketchSample& draw(Rng& rng);

    const Graph& graph() const noexcept { return *graph_; }
    std::size_t tau() const noexcept { return tau_; }

private:
    const Graph* graph_;
    std::size_t tau_;
    std::vector<EdgeId> perm_;
    ComponentFinder finder_;
    SketchSample sample_;
};

/// Builds a standalone sample (with components) for an explicit edge subset.
SketchSample make_sample(const Graph& g, std::vector<EdgeId> edges);

inline constexpr std::uint64_t kEnumerationCap = 2'000'000;

/// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k) noexcept;

/// Walks every size-tau subset of {0..m-1} in lexicographic order.
class SubsetEnumerator {
public:
    /// Throws std::length_error if C(m, tau) exceeds `cap`; estimate by Monte
    /// Carlo instead in that case.
    SubsetEnumerator(std::size_t num_edges, std::size_t tau, std::uint64_t cap = kEnumerationCap);

    /// Writes the next subset into `out`; false once exhausted.
    bool next(std::vector<EdgeId>& out);
    std::uint64_t count() const noexcept { return count_; }

private:
    std::size_t m_;
    std::vector<EdgeId> current_;
    std::uint64_t count_;
    bool started_ = false;
    bool done_ = false;
};

SubsetEnumerator enumerate_subsets(const Graph& g, std::size_t tau);

} // namespace gossip
