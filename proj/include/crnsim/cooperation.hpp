#pragma once

// Network-level machinery: sensing-task allocation, OR-rule fusion at a
// fusion center, neighbor graphs for the distributed scenarios, and the
// average-consensus update that lets co-sensing SUs agree on a channel's
// statistic without a central node.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "crnsim/detectors.hpp"
#include "crnsim/math.hpp"

namespace crnsim {

/// Sensing-task assignment: each SU's channel list plus the inverse map.
struct Allocation {
    std::vector<std::vector<int>> channels_of_su; // per SU, sorted, no duplicates
    std::vector<std::vector<int>> sus_of_channel; // per channel, sorted

    [[nodiscard]] int su_count() const noexcept {
        return static_cast<int>(channels_of_su.size());
    }
    [[nodiscard]] int channel_count() const noexcept {
        return static_cast<int>(sus_of_channel.size());
    }
};

namespace detail {

inline Allocation allocation_from_lists(std::vector<std::vector<int>> lists, int m_count) {
    Allocation alloc;
    alloc.channels_of_su = std::move(lists);
    alloc.sus_of_channel.resize(static_cast<std::size_t>(m_count));
    for (std::size_t k = 0; k < alloc.channels_of_su.size(); ++k) {
        auto& mine = alloc.channels_of_su[k];
        std::sort(mine.begin(), mine.end());
        for (int m : mine) {
            alloc.sus_of_channel[static_cast<std::size_t>(m)].push_back(
                static_cast<int>(k));
        }
    }
    return alloc;
}

} // namespace detail

/// Balanced pre-assignment that ignores channel quality: channels are dealt
/// round-robin from a seeded starting offset, so when i_per_su*k_count is
/// divisible by m_count every channel ends up sensed by exactly
/// (i_per_su*k_count)/m_count SUs, and otherwise the counts differ by at
/// most one.
inline Allocation allocate_basic(int k_count, int m_count, int i_per_su,
                                 RandomStream& stream) {
    if (k_count < 1 || m_count < 1) {
        throw std::invalid_argument("allocate_basic: need k_count, m_count >= 1");
    }
    if (i_per_su < 1 || i_per_su > m_count) {
        throw std::invalid_argument("allocate_basic: i_per_su outside [1, m_count]");
    }
    const int offset = static_cast<int>(stream.next_u64() % static_cast<std::uint64_t>(m_count));
    std::vector<std::vector<int>> lists(static_cast<std::size_t>(k_count));
    int slot = offset;
    for (auto& mine : lists) {
        mine.reserve(static_cast<std::size_t>(i_per_su));
        for (int j = 0; j < i_per_su; ++j) {
            mine.push_back(slot % m_count);
            ++slot;
        }
    }
    return detail::allocation_from_lists(std::move(lists), m_count);
}

/// Quality-driven assignment: every SU picks the i_per_su channels with the
/// highest instantaneous SNR at its location, ties broken toward the lower
/// channel index.
inline Allocation allocate_best_snr(const std::vector<std::vector<double>>& snr_matrix,
                                    int i_per_su) {
    if (snr_matrix.empty() || snr_matrix.front().empty()) {
        throw std::invalid_argument("allocate_best_snr: empty SNR matrix");
    }
    const int m_count = static_cast<int>(snr_matrix.front().size());
    if (i_per_su < 1 || i_per_su > m_count) {
        throw std::invalid_argument("allocate_best_snr: i_per_su outside [1, m_count]");
    }
    std::vector<std::vector<int>> lists(snr_matrix.size());
    std::vector<int> order(static_cast<std::size_t>(m_count));
    for (std::size_t k = 0; k < snr_matrix.size(); ++k) {
        const auto& row = snr_matrix[k];
        if (static_cast<int>(row.size()) != m_count) {
            throw std::invalid_argument("allocate_best_snr: ragged SNR matrix");
        }
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return row[static_cast<std::size_t>(a)] >
                                                    row[static_cast<std::size_t>(b)]; });
        lists[k].assign(order.begin(), order.begin() + i_per_su);
    }
    return detail::allocation_from_lists(std::move(lists), m_count);
}

/// OR-logic fusion: busy if any local decision says busy.
inline Hypothesis fuse_or(std::span<const Hypothesis> local_decisions) {
    if (local_decisions.empty()) {
        throw std::invalid_argument("fuse_or: no local decisions");
    }
    for (const auto d : local_decisions) {
        if (d == Hypothesis::h1) {
            return Hypothesis::h1;
        }
    }
    return Hypothesis::h0;
}

/// Symmetric, irreflexive adjacency over SU indices.
class NeighborGraph {
public:
    explicit NeighborGraph(int node_count)
        : n_(node_count), adj_(static_cast<std::size_t>(node_count) *
                               static_cast<std::size_t>(node_count), 0) {
        if (node_count < 1) {
            throw std::invalid_argument("NeighborGraph: need at least one node");
        }
    }

    [[nodiscard]] int node_count() const noexcept { return n_; }

    void connect(int a, int b) {
        if (a == b) {
            throw std::invalid_argument("NeighborGraph: self-loops not allowed");
        }
        at(a, b) = 1;
        at(b, a) = 1;
    }

    [[nodiscard]] bool adjacent(int a, int b) const {
        return at(a, b) != 0;
    }

    /// Degree of `node` counting only neighbors inside `members`.
    [[nodiscard]] int degree_within(int node, std::span<const int> members) const {
        int deg = 0;
        for (int other : members) {
            if (other != node && adjacent(node, other)) {
                ++deg;
            }
        }
        return deg;
    }

    /// Whether the subgraph induced by `members` is connected (trivially true
    /// for empty or singleton sets).
    [[nodiscard]] bool connected_within(std::span<const int> members) const {
        if (members.size() <= 1) {
            return true;
        }
        std::vector<int> stack{members.front()};
        std::vector<bool> seen(static_cast<std::size_t>(n_), false);
        seen[static_cast<std::size_t>(members.front())] = true;
        std::size_t reached = 1;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (int w : members) {
                if (!seen[static_cast<std::size_t>(w)] && adjacent(v, w)) {
                    seen[static_cast<std::size_t>(w)] = true;
                    ++reached;
                    stack.push_back(w);
                }
            }
        }
        return reached == members.size();
    }

private:
    [[nodiscard]] std::uint8_t& at(int a, int b) {
        return adj_[static_cast<std::size_t>(a) * static_cast<std::size_t>(n_) +
                    static_cast<std::size_t>(b)];
    }
    [[nodiscard]] const std::uint8_t& at(int a, int b) const {
        return adj_[static_cast<std::size_t>(a) * static_cast<std::size_t>(n_) +
                    static_cast<std::size_t>(b)];
    }

    int n_;
    std::vector<std::uint8_t> adj_;
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(Point2 a, Point2 b) noexcept {
    return std::hypot(a.x - b.x, a.y - b.y);
}

/// Geometric graph: nodes are adjacent iff within `radius` of each other.
inline NeighborGraph build_geometric_graph(std::span<const Point2> positions,
                                           double radius) {
    NeighborGraph g(static_cast<int>(positions.size()));
    for (std::size_t a = 0; a < positions.size(); ++a) {
        for (std::size_t b = a + 1; b < positions.size(); ++b) {
            if (distance(positions[a], positions[b]) <= radius) {
                g.connect(static_cast<int>(a), static_cast<int>(b));
            }
        }
    }
    return g;
}

/// Smallest radius, on a 0.01 grid, at which every given co-sensing group
/// forms a clique of the geometric graph. Cliques keep the per-channel
/// consensus contraction fast enough for a handful of iterations.
inline double min_clique_radius(std::span<const Point2> positions,
                                const std::vector<std::vector<int>>& groups) {
    double needed = 0.0;
    for (const auto& group : groups) {
        for (std::size_t a = 0; a < group.size(); ++a) {
            for (std::size_t b = a + 1; b < group.size(); ++b) {
                needed = std::max(
                    needed, distance(positions[static_cast<std::size_t>(group[a])],
                                     positions[static_cast<std::size_t>(group[b])]));
            }
        }
    }
    return std::ceil(needed * 100.0 - 1e-9) / 100.0;
}

/// Per-channel consensus state: the co-sensing SUs and their current
/// statistics for that channel.
struct ConsensusState {
    int channel = 0;
    std::vector<int> members;   // SU indices sharing the channel
    std::vector<double> values; // aligned with members
    double step = 0.25;         // mu
    int iteration = 0;
};

/// Largest step size with a convergence guarantee on this co-sensing set:
/// 1/deg_max over the induced subgraph (infinity when nobody has neighbors).
inline double max_stable_step(const ConsensusState& state, const NeighborGraph& graph) {
    int deg_max = 0;
    for (int k : state.members) {
        deg_max = std::max(deg_max, graph.degree_within(k, state.members));
    }
    return deg_max == 0 ? std::numeric_limits<double>::infinity()
                        : 1.0 / static_cast<double>(deg_max);
}

inline ConsensusState make_consensus_state(int channel, std::vector<int> members,
                                           std::vector<double> values, double step,
                                           const NeighborGraph& graph) {
    if (members.size() != values.size()) {
        throw std::invalid_argument("make_consensus_state: member/value size mismatch");
    }
    if (!(step >= 0.0 && step < 1.0)) {
        throw std::invalid_argument("make_consensus_state: step outside [0,1)");
    }
    ConsensusState state;
    state.channel = channel;
    state.members = std::move(members);
    state.values = std::move(values);
    state.step = step;
    if (!graph.connected_within(state.members)) {
        throw std::invalid_argument(
            "make_consensus_state: co-sensing subgraph is disconnected");
    }
    return state;
}

/// One synchronous consensus iteration: every member moves toward its
/// co-sensing neighbors' iteration-i values,
///   v_k <- v_k + step * sum_{l in N_k} (v_l - v_k).
inline ConsensusState consensus_step(const ConsensusState& state,
                                     const NeighborGraph& graph) {
    ConsensusState next = state;
    for (std::size_t a = 0; a < state.members.size(); ++a) {
        double delta = 0.0;
        for (std::size_t b = 0; b < state.members.size(); ++b) {
            if (b != a && graph.adjacent(state.members[a], state.members[b])) {
                delta += state.values[b] - state.values[a];
            }
        }
        next.values[a] = state.values[a] + state.step * delta;
    }
    next.iteration = state.iteration + 1;
    return next;
}

struct ConsensusTraceRow {
    int iteration = 0;
    int su = 0;
    int channel = 0;
    double statistic = 0.0;
};

struct ConsensusRun {
    ConsensusState final_state;
    std::vector<ConsensusTraceRow> trace; // includes iteration 0
};

/// Apply `iterations` consensus steps, recording every member's value at
/// every iteration for later export.
inline ConsensusRun run_consensus(ConsensusState state, const NeighborGraph& graph,
                                  int iterations) {
    if (iterations < 0) {
        throw std::invalid_argument("run_consensus: negative iteration count");
    }
    ConsensusRun run;
    auto record = [&](const ConsensusState& s) {
        for (std::size_t a = 0; a < s.members.size(); ++a) {
            run.trace.push_back({s.iteration, s.members[a], s.channel, s.values[a]});
        }
    };
    record(state);
    for (int i = 0; i < iterations; ++i) {
        state = consensus_step(state, graph);
        record(state);
    }
    run.final_state = std::move(state);
    return run;
}

/// Each SU applies its own threshold to its converged statistic.
inline std::vector<SensingDecision> decide_post_consensus(
    const ConsensusState& state, std::span<const double> thresholds) {
    if (thresholds.size() != state.members.size()) {
        throw std::invalid_argument("decide_post_consensus: threshold count mismatch");
    }
    std::vector<SensingDecision> decisions(state.members.size());
    for (std::size_t a = 0; a < state.members.size(); ++a) {
        auto& d = decisions[a];
        d.su = state.members[a];
        d.channel = state.channel;
        d.statistic = state.values[a];
        d.decided = decide(state.values[a], thresholds[a]);
    }
    return decisions;
}

} // namespace crnsim
