#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "crnsim/cooperation.hpp"
#include "crnsim/channel.hpp"

using namespace crnsim;

TEST_CASE("basic allocation balances channels", "[cooperation]") {
    RandomStream s(1, 0);
    const auto alloc = allocate_basic(10, 5, 2, s);
    REQUIRE(alloc.su_count() == 10);
    REQUIRE(alloc.channel_count() == 5);
    for (const auto& mine : alloc.channels_of_su) {
        REQUIRE(mine.size() == 2);
        CHECK(std::set<int>(mine.begin(), mine.end()).size() == 2);
    }
    for (const auto& sus : alloc.sus_of_channel) {
        CHECK(sus.size() == 4); // (I*K)/M
    }

    RandomStream s1(1, 1);
    const auto trivial = allocate_basic(1, 1, 1, s1);
    CHECK(trivial.channels_of_su == std::vector<std::vector<int>>{{0}});

    // non-divisible case: counts differ by at most one
    RandomStream s2(1, 2);
    const auto uneven = allocate_basic(3, 2, 1, s2);
    std::vector<std::size_t> counts;
    for (const auto& sus : uneven.sus_of_channel) {
        counts.push_back(sus.size());
    }
    const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
    CHECK(*hi - *lo <= 1);

    RandomStream s3(1, 3);
    CHECK_THROWS_AS(allocate_basic(4, 3, 5, s3), std::invalid_argument);
}

TEST_CASE("best-SNR allocation picks the strongest channels", "[cooperation]") {
    const auto single = allocate_best_snr({{0.1, 0.5, 0.2}}, 1);
    CHECK(single.channels_of_su == std::vector<std::vector<int>>{{1}});

    const auto tied = allocate_best_snr({{0.3, 0.3, 0.3, 0.3}}, 2);
    CHECK(tied.channels_of_su == std::vector<std::vector<int>>{{0, 1}});

    // brute-force top-k comparison on random matrices
    RandomStream s(17, 0);
    for (int rep = 0; rep < 1000; ++rep) {
        const int k = 1 + static_cast<int>(s.next_u64() % 6);
        const int m = 2 + static_cast<int>(s.next_u64() % 7);
        const int i_per_su = 1 + static_cast<int>(s.next_u64() % static_cast<unsigned>(m));
        std::vector<std::vector<double>> snr(static_cast<std::size_t>(k),
                                             std::vector<double>(static_cast<std::size_t>(m)));
        for (auto& row : snr) {
            for (auto& v : row) {
                v = s.uniform();
            }
        }
        const auto alloc = allocate_best_snr(snr, i_per_su);
        for (int su = 0; su < k; ++su) {
            const auto& row = snr[static_cast<std::size_t>(su)];
            std::vector<int> order(static_cast<std::size_t>(m));
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                const double va = row[static_cast<std::size_t>(a)];
                const double vb = row[static_cast<std::size_t>(b)];
                return va != vb ? va > vb : a < b;
            });
            std::vector<int> expect(order.begin(), order.begin() + i_per_su);
            std::sort(expect.begin(), expect.end());
            REQUIRE(alloc.channels_of_su[static_cast<std::size_t>(su)] == expect);
        }
    }

    CHECK_THROWS_AS(allocate_best_snr({{0.1, 0.2}}, 3), std::invalid_argument);
}

TEST_CASE("OR fusion", "[cooperation]") {
    using H = Hypothesis;
    const std::vector<H> all_idle{H::h0, H::h0, H::h0, H::h0};
    CHECK(fuse_or(all_idle) == H::h0);
    const std::vector<H> one_busy{H::h0, H::h1, H::h0};
    CHECK(fuse_or(one_busy) == H::h1);
    CHECK_THROWS_AS(fuse_or(std::vector<H>{}), std::invalid_argument);

    // independence product: four sensors at local detection 0.5
    RandomStream s(23, 0);
    const long trials = 100'000;
    long fused_busy = 0;
    std::vector<H> locals(4);
    for (long t = 0; t < trials; ++t) {
        for (auto& d : locals) {
            d = s.uniform() < 0.5 ? H::h1 : H::h0;
        }
        fused_busy += fuse_or(locals) == H::h1 ? 1 : 0;
    }
    CHECK_THAT(static_cast<double>(fused_busy) / static_cast<double>(trials),
               Catch::Matchers::WithinAbs(0.9375, 0.005));
}

TEST_CASE("geometric neighbor graphs", "[cooperation]") {
    const std::vector<Point2> pts{{0.0, 0.0}, {0.05, 0.0}, {0.5, 0.5}, {0.55, 0.5}};
    const auto g = build_geometric_graph(pts, 0.1);
    CHECK(g.adjacent(0, 1));
    CHECK(g.adjacent(2, 3));
    CHECK(!g.adjacent(0, 2));
    CHECK(!g.adjacent(1, 3));

    const std::vector<int> group{0, 1};
    CHECK(g.connected_within(group));
    const std::vector<int> split{0, 2};
    CHECK(!g.connected_within(split));

    const std::vector<std::vector<int>> groups{{0, 1, 2}, {2, 3}};
    const double r = min_clique_radius(pts, groups);
    const auto g2 = build_geometric_graph(pts, r);
    for (const auto& grp : groups) {
        for (std::size_t a = 0; a < grp.size(); ++a) {
            for (std::size_t b = a + 1; b < grp.size(); ++b) {
                REQUIRE(g2.adjacent(grp[a], grp[b]));
            }
        }
    }
    // one grid notch tighter must break some clique
    const auto g3 = build_geometric_graph(pts, r - 0.01);
    bool all_cliques = true;
    for (const auto& grp : groups) {
        for (std::size_t a = 0; a < grp.size(); ++a) {
            for (std::size_t b = a + 1; b < grp.size(); ++b) {
                all_cliques = all_cliques && g3.adjacent(grp[a], grp[b]);
            }
        }
    }
    CHECK(!all_cliques);
}

TEST_CASE("consensus steps average toward the group mean", "[cooperation]") {
    NeighborGraph pair(2);
    pair.connect(0, 1);

    auto state = make_consensus_state(0, {0, 1}, {0.0, 1.0}, 0.25, pair);
    const auto one = consensus_step(state, pair);
    CHECK(one.values == std::vector<double>{0.25, 0.75});
    CHECK(one.iteration == 1);

    // closed form for the pair: deviation from 0.5 contracts by (1 - 2 mu)
    auto iter = state;
    for (int i = 1; i <= 12; ++i) {
        iter = consensus_step(iter, pair);
        const double expected = 0.5 - 0.5 * std::pow(0.5, i);
        REQUIRE_THAT(iter.values[0], Catch::Matchers::WithinAbs(expected, 1e-12));
        REQUIRE_THAT(iter.values[1], Catch::Matchers::WithinAbs(1.0 - expected, 1e-12));
    }
    CHECK_THAT(iter.values[0], Catch::Matchers::WithinAbs(0.5, 1e-3));

    // fixed points: equal statistics, or a zero step size
    auto flat = make_consensus_state(0, {0, 1}, {0.7, 0.7}, 0.25, pair);
    CHECK(consensus_step(flat, pair).values == flat.values);
    auto frozen = make_consensus_state(0, {0, 1}, {0.0, 1.0}, 0.0, pair);
    CHECK(consensus_step(frozen, pair).values == frozen.values);
}

TEST_CASE("consensus state validation", "[cooperation]") {
    NeighborGraph g(4);
    g.connect(0, 1);
    g.connect(2, 3);
    CHECK_THROWS_AS(make_consensus_state(0, {0, 1, 2}, {0.0, 0.0, 0.0}, 0.25, g),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_consensus_state(0, {0, 1}, {0.0}, 0.25, g),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_consensus_state(0, {0, 1}, {0.0, 1.0}, 1.0, g),
                    std::invalid_argument);

    const auto st = make_consensus_state(0, {0, 1}, {0.0, 1.0}, 0.25, g);
    CHECK(max_stable_step(st, g) == 1.0);
}

TEST_CASE("consensus runs conserve sums and contract spread", "[cooperation]") {
    // a production-style topology: clique radius over random groups
    RandomStream s(31, 0);
    std::vector<Point2> pts(10);
    for (auto& p : pts) {
        p.x = s.uniform();
        p.y = s.uniform();
    }
    std::vector<std::vector<int>> groups{{0, 1, 2, 3}, {4, 5, 6, 7}, {2, 5, 8, 9}};
    const double radius = min_clique_radius(pts, groups);
    const auto graph = build_geometric_graph(pts, radius);

    for (const auto& group : groups) {
        std::vector<double> values;
        for (std::size_t i = 0; i < group.size(); ++i) {
            values.push_back(s.uniform() * 10.0);
        }
        auto state = make_consensus_state(0, group, values, 0.25, graph);
        const double stable = max_stable_step(state, graph);
        if (state.step >= stable) {
            state.step = 0.99 * stable;
        }

        const double sum0 = std::accumulate(state.values.begin(), state.values.end(), 0.0);
        auto spread = [&](const ConsensusState& st) {
            const auto [lo, hi] = std::minmax_element(st.values.begin(), st.values.end());
            return *hi - *lo;
        };
        const double spread0 = spread(state);

        double prev_spread = spread0;
        for (int i = 0; i < 10; ++i) {
            const double before =
                std::accumulate(state.values.begin(), state.values.end(), 0.0);
            state = consensus_step(state, graph);
            const double after =
                std::accumulate(state.values.begin(), state.values.end(), 0.0);
            REQUIRE(std::abs(after - before) <= 1e-9 * std::abs(before));
            REQUIRE(spread(state) <= prev_spread + 1e-12);
            prev_spread = spread(state);
        }
        CHECK(std::abs(std::accumulate(state.values.begin(), state.values.end(), 0.0) -
                       sum0) <= 1e-8 * std::abs(sum0));
        CHECK(spread(state) < 0.05 * spread0);
    }
}

TEST_CASE("run_consensus records a full trace", "[cooperation]") {
    NeighborGraph g(3);
    g.connect(0, 1);
    g.connect(1, 2);
    g.connect(0, 2);
    const auto state = make_consensus_state(2, {0, 1, 2}, {1.0, 2.0, 6.0}, 0.25, g);

    const auto none = run_consensus(state, g, 0);
    CHECK(none.final_state.values == state.values);
    CHECK(none.trace.size() == 3);

    const auto run = run_consensus(state, g, 10);
    CHECK(run.trace.size() == 3 * 11);
    CHECK(run.final_state.iteration == 10);
    for (const auto& row : run.trace) {
        CHECK(row.channel == 2);
    }
    for (double v : run.final_state.values) {
        CHECK_THAT(v, Catch::Matchers::WithinAbs(3.0, 1e-4));
    }

    CHECK_THROWS_AS(run_consensus(state, g, -1), std::invalid_argument);
}

TEST_CASE("post-consensus decisions use per-SU thresholds", "[cooperation]") {
    NeighborGraph g(2);
    g.connect(0, 1);
    auto state = make_consensus_state(1, {0, 1}, {5.0, 5.0}, 0.25, g);

    const std::vector<double> low{1.0, 1.0};
    for (const auto& d : decide_post_consensus(state, low)) {
        CHECK(d.decided == Hypothesis::h1);
        CHECK(d.channel == 1);
    }

    const std::vector<double> split{4.0, 6.0};
    const auto mixed = decide_post_consensus(state, split);
    CHECK(mixed[0].decided == Hypothesis::h1);
    CHECK(mixed[1].decided == Hypothesis::h0);

    CHECK_THROWS_AS(decide_post_consensus(state, std::vector<double>{1.0}),
                    std::invalid_argument);
}

TEST_CASE("consensus lifts detection at matched false alarm", "[cooperation][heavy]") {
    // four co-sensing SUs with equal instantaneous SNR at -15 dB
    const int window = 250;
    const int group_size = 4;
    const SnrValue snr = SnrValue::from_db(-15.0);
    const double p_fa = 0.1;

    NeighborGraph clique(group_size);
    for (int a = 0; a < group_size; ++a) {
        for (int b = a + 1; b < group_size; ++b) {
            clique.connect(a, b);
        }
    }
    const std::vector<int> members{0, 1, 2, 3};

    const double solo_threshold = calibrate_threshold_fa(DetectorKind::energy, window, p_fa);
    // matched-false-alarm threshold for an averaged statistic: H0 variance
    // shrinks by the group size
    const double group_threshold =
        1.0 + q_inv(p_fa) / std::sqrt(static_cast<double>(group_size) * window);
    const std::vector<double> group_thresholds(group_size, group_threshold);

    ChannelModel ch;
    ch.index = 0;
    ch.family = SignalFamily::unknown;

    RandomStream stream(555, 0);
    const long trials = 100'000;
    long solo_detect = 0;
    long solo_fa = 0;
    long group_detect = 0;
    long group_fa = 0;

    for (long t = 0; t < trials; ++t) {
        std::vector<double> h1_stats(group_size);
        std::vector<double> h0_stats(group_size);
        for (int k = 0; k < group_size; ++k) {
            h1_stats[static_cast<std::size_t>(k)] = ed_statistic(
                synthesize_observation(stream, ch, true, snr, window));
            h0_stats[static_cast<std::size_t>(k)] = ed_statistic(
                synthesize_observation(stream, ch, false, snr, window));
        }
        solo_detect += h1_stats[0] > solo_threshold ? 1 : 0;
        solo_fa += h0_stats[0] > solo_threshold ? 1 : 0;

        auto converge = [&](std::vector<double> values) {
            auto st = make_consensus_state(0, members, std::move(values), 0.25, clique);
            for (int i = 0; i < 10; ++i) {
                st = consensus_step(st, clique);
            }
            return st;
        };
        const auto h1_post = decide_post_consensus(converge(h1_stats), group_thresholds);
        const auto h0_post = decide_post_consensus(converge(h0_stats), group_thresholds);
        group_detect += h1_post[0].decided == Hypothesis::h1 ? 1 : 0;
        group_fa += h0_post[0].decided == Hypothesis::h1 ? 1 : 0;
    }

    const double n = static_cast<double>(trials);
    const double solo_pd = static_cast<double>(solo_detect) / n;
    const double group_pd = static_cast<double>(group_detect) / n;
    CHECK_THAT(static_cast<double>(solo_fa) / n, Catch::Matchers::WithinAbs(p_fa, 0.01));
    CHECK_THAT(static_cast<double>(group_fa) / n, Catch::Matchers::WithinAbs(p_fa, 0.01));
    CHECK(group_pd >= solo_pd);
}
