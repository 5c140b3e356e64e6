#include <doctest.h>

#include <numeric>
#include <random>

#include "ranksched/errors.hpp"
#include "ranksched/sim.hpp"

using namespace ranksched;

namespace {

SimScenario one_rank(std::int64_t cells, std::optional<std::int64_t> quota_usec,
                     std::int64_t node_capacity, int k = 1, std::int64_t iterations = 1,
                     std::int64_t latency = 0) {
    SimScenario s;
    s.mode = quota_usec ? SimScenario::Mode::HardLimits : SimScenario::Mode::RequestsOnly;
    s.iterations = iterations;
    s.barrier_latency_usec = latency;
    s.nodes.push_back({node_capacity, 0});
    RankProfile r;
    r.cells = cells;
    r.cost_per_cell_usec = Rational(1);
    r.comm_rounds_per_iter = k;
    r.node = 0;
    r.cgroup.cpu_weight = 100;
    r.cgroup.quota_usec = quota_usec;
    s.ranks.push_back(r);
    return s;
}

bool results_equal(const SimResult& a, const SimResult& b) {
    if (a.wall_clock_usec != b.wall_clock_usec) return false;
    if (a.iterations_completed != b.iterations_completed) return false;
    if (a.per_iteration_wall_usec != b.per_iteration_wall_usec) return false;
    if (a.ranks.size() != b.ranks.size()) return false;
    for (std::size_t i = 0; i < a.ranks.size(); ++i) {
        const auto& x = a.ranks[i];
        const auto& y = b.ranks[i];
        if (x.nr_throttled != y.nr_throttled || x.throttled_usec != y.throttled_usec ||
            x.cpu_millicore_usec != y.cpu_millicore_usec)
            return false;
        if (x.samples.size() != y.samples.size()) return false;
        for (std::size_t k = 0; k < x.samples.size(); ++k)
            if (x.samples[k].time_usec != y.samples[k].time_usec ||
                x.samples[k].millicores != y.samples[k].millicores)
                return false;
    }
    return true;
}

} // namespace

TEST_CASE("unthrottled rank runs at full speed and stops on time") {
    // 12000 cells at 1us each: 12ms of CPU, one chunk
    auto res = simulate(one_rank(12000, std::nullopt, 1000));
    CHECK(res.wall_clock_usec == 12000);
    CHECK(res.iterations_completed == 1);
    CHECK(res.ranks[0].cpu_millicore_usec == 12000 * 1000);
    CHECK(res.ranks[0].nr_throttled == 0);
    CHECK(res.ranks[0].throttled_usec == 0);
}

TEST_CASE("work finishing exactly with the quota does not count a throttle") {
    // quota 25ms per 100ms period; work is exactly one period's quota
    auto res = simulate(one_rank(25000, 25000, 1000));
    CHECK(res.wall_clock_usec == 25000);
    CHECK(res.ranks[0].nr_throttled == 0);
    CHECK(res.ranks[0].throttled_usec == 0);
}

TEST_CASE("quota exhaustion at a period boundary replenishes instead of throttling") {
    // full-core quota: exhausts exactly when the period ends, ten times over
    auto res = simulate(one_rank(1000000, 100000, 1000));
    CHECK(res.wall_clock_usec == 1000000);
    CHECK(res.ranks[0].nr_throttled == 0);
    CHECK(res.ranks[0].throttled_usec == 0);
    CHECK(res.ranks[0].cpu_millicore_usec == 1000000000);
}

TEST_CASE("simulated throttling matches the period walk across quotas and demands") {
    const std::int64_t P = 100000;
    const std::int64_t horizon = 10 * P;
    for (std::int64_t q : {25000, 50000, 75000, 100000}) {
        for (std::int64_t d = 100; d <= 1000; d += 100) {
            auto oracle = step_period_oracle(q, P, d, horizon);
            // node capacity d makes the rank's contention-free rate exactly d
            const bool throttles = q * 1000 < d * P;
            // throttling case: ten full quotas plus half of one, so the run
            // pushes into an eleventh period without exhausting it.
            // non-throttling case: work sized to end exactly at the horizon.
            const std::int64_t cells = throttles ? q * 10 + q / 2 : d * 1000;
            auto res = simulate(one_rank(cells, q, d));
            CAPTURE(q);
            CAPTURE(d);
            CHECK(res.ranks[0].nr_throttled == oracle.nr_throttled);
            CHECK(res.ranks[0].throttled_usec == oracle.throttled_usec);
            CHECK(res.ranks[0].cpu_millicore_usec == cells * 1000);
            if (!throttles) CHECK(res.wall_clock_usec == horizon);
        }
    }
}

TEST_CASE("quarter quota slows a saturating loop four-fold at steady state") {
    // 4 ranks, 250m limits, no contention. 100ms of CPU per iteration fits
    // exactly four 25ms quota grants, so each iteration past the first costs
    // one full period per grant.
    SimScenario s;
    s.mode = SimScenario::Mode::HardLimits;
    s.iterations = 50;
    s.nodes.push_back({4000, 0});
    for (int i = 0; i < 4; ++i) {
        RankProfile r;
        r.cells = 100000;
        r.cost_per_cell_usec = Rational(1);
        r.comm_rounds_per_iter = 1;
        r.node = 0;
        r.cgroup.cpu_weight = 250;
        r.cgroup.quota_usec = 25000;
        s.ranks.push_back(r);
    }
    auto res = simulate(s);
    REQUIRE(res.per_iteration_wall_usec.size() == 50);
    // first iteration starts with a full quota already banked
    CHECK(res.per_iteration_wall_usec[0] == 325000);
    for (std::size_t k = 1; k < 50; ++k) CHECK(res.per_iteration_wall_usec[k] == 400000);
    CHECK(res.wall_clock_usec == 325000 + 49 * 400000);
    for (const auto& r : res.ranks) {
        CHECK(r.cpu_millicore_usec == 50LL * 100000 * 1000);
        // runs 1/4 of the time once throttling kicks in
        CHECK(r.throttled_usec == res.wall_clock_usec - 50LL * 100000);
    }

    // the same work without limits runs at full speed
    SimScenario free = s;
    free.mode = SimScenario::Mode::RequestsOnly;
    for (auto& r : free.ranks) r.cgroup.quota_usec.reset();
    auto base = simulate(free);
    CHECK(base.wall_clock_usec == 50LL * 100000);
}

TEST_CASE("contended throttling under a shared node") {
    // two 250m-limited ranks squeezed to 500m each by a 1000m node: the
    // quota drains at half speed, so each period gives 50ms of runtime
    SimScenario s;
    s.mode = SimScenario::Mode::HardLimits;
    s.iterations = 1;
    s.nodes.push_back({1000, 0});
    for (int i = 0; i < 2; ++i) {
        RankProfile r;
        r.cells = 75000; // three full quota grants
        r.cost_per_cell_usec = Rational(1);
        r.comm_rounds_per_iter = 1;
        r.node = 0;
        r.cgroup.cpu_weight = 250;
        r.cgroup.quota_usec = 25000;
        s.ranks.push_back(r);
    }
    auto res = simulate(s);
    CHECK(res.wall_clock_usec == 250000);
    for (const auto& r : res.ranks) {
        CHECK(r.nr_throttled == 2);
        CHECK(r.throttled_usec == 100000);
        CHECK(r.cpu_millicore_usec == 75000000);
    }
}

TEST_CASE("rates rebalance when a rank leaves the node") {
    SimScenario s;
    s.iterations = 1;
    s.nodes.push_back({1000, 0});
    RankProfile a;
    a.cells = 3000;
    a.cost_per_cell_usec = Rational(1);
    a.comm_rounds_per_iter = 1;
    a.cgroup.cpu_weight = 750;
    RankProfile b = a;
    b.cells = 500;
    b.cgroup.cpu_weight = 250;
    s.ranks = {a, b};
    // b ends after 500000/250 = 2000us; a then takes the whole core:
    // 3000000 - 750*2000 = 1500000 mcus at 1000m is another 1500us
    auto res = simulate(s);
    CHECK(res.wall_clock_usec == 3500);
    CHECK(res.ranks[0].cpu_millicore_usec == 3000000);
    CHECK(res.ranks[1].cpu_millicore_usec == 500000);
}

TEST_CASE("background load shrinks what ranks can get") {
    SimScenario s = one_rank(1000, std::nullopt, 1000);
    s.nodes[0].background_load_millicores = 600;
    // 400m available: 1e6 mcus take 2500us
    auto res = simulate(s);
    CHECK(res.wall_clock_usec == 2500);
}

TEST_CASE("barrier latency is paid once per communication round") {
    auto res = simulate(one_rank(3000, std::nullopt, 1000, /*k=*/3, /*iterations=*/2,
                                 /*latency=*/7));
    // chunks of 1000 cells run 1000us each; 3 rounds and 3 latencies per
    // iteration, twice
    CHECK(res.wall_clock_usec == 2 * (3 * 1000 + 3 * 7));
    REQUIRE(res.rounds.size() == 2);
    for (const auto& iter : res.rounds) REQUIRE(iter.size() == 3);
    CHECK(res.rounds[0][0].start_usec == 0);
    CHECK(res.rounds[0][0].last_arrival_usec == 1000);
    CHECK(res.rounds[0][1].start_usec == 1007);
    CHECK(res.rounds[1][0].start_usec == 3021);
}

TEST_CASE("uneven work splits into near-equal chunks, first rounds larger") {
    // 10 units of work over 4 rounds split 3,3,2,2. A 1-millicore node makes
    // each unit take one microsecond, exposing the chunk sizes as durations.
    SimScenario s = one_rank(1, std::nullopt, 1);
    s.ranks[0].cost_per_cell_usec = Rational(1, 100); // 10 mcus of work total
    s.ranks[0].comm_rounds_per_iter = 4;
    auto res = simulate(s);
    CHECK(res.wall_clock_usec == 10);
    REQUIRE(res.rounds.size() == 1);
    CHECK(res.rounds[0][0].last_arrival_usec == 3);
    CHECK(res.rounds[0][1].last_arrival_usec == 6);
    CHECK(res.rounds[0][2].last_arrival_usec == 8);
    CHECK(res.rounds[0][3].last_arrival_usec == 10);
}

TEST_CASE("the slowest rank paces every barrier") {
    SimScenario s;
    s.iterations = 3;
    s.nodes.push_back({1000, 0});
    s.nodes.push_back({1000, 0});
    RankProfile fast;
    fast.cells = 100;
    fast.cost_per_cell_usec = Rational(1);
    fast.comm_rounds_per_iter = 2;
    fast.node = 0;
    fast.cgroup.cpu_weight = 1000;
    RankProfile slow = fast;
    slow.cells = 1000;
    slow.node = 1;
    s.ranks = {fast, slow};
    auto res = simulate(s);
    // each round takes the slow rank's 500us
    CHECK(res.wall_clock_usec == 3 * 2 * 500);
    // the fast rank still consumed only its own work
    CHECK(res.ranks[0].cpu_millicore_usec == 3 * 100 * 1000);
    CHECK(res.ranks[1].cpu_millicore_usec == 3 * 1000 * 1000);
}

TEST_CASE("per-iteration walls add up to the clock") {
    SimScenario s = one_rank(52525, 25000, 1000, /*k=*/3, /*iterations=*/7, /*latency=*/11);
    auto res = simulate(s);
    std::int64_t total = std::accumulate(res.per_iteration_wall_usec.begin(),
                                         res.per_iteration_wall_usec.end(), std::int64_t{0});
    CHECK(total == res.wall_clock_usec);
    REQUIRE(res.rounds.size() == 7);
    for (const auto& iter : res.rounds) {
        REQUIRE(iter.size() == 3);
        for (const auto& round : iter) CHECK(round.start_usec <= round.last_arrival_usec);
    }
}

TEST_CASE("cpu accounting is exact for every rank") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> nranks(1, 6);
    std::uniform_int_distribution<std::int64_t> cells(1, 300000);
    std::uniform_int_distribution<int> kd(1, 5);
    std::uniform_int_distribution<std::int64_t> iters(1, 4);
    std::uniform_int_distribution<int> limited(0, 1);
    std::uniform_int_distribution<std::int64_t> limits(50, 1000);
    for (int trial = 0; trial < 60; ++trial) {
        SimScenario s;
        const bool hard = limited(rng) == 1;
        s.mode = hard ? SimScenario::Mode::HardLimits : SimScenario::Mode::RequestsOnly;
        s.iterations = iters(rng);
        s.barrier_latency_usec = trial % 3 == 0 ? 5 : 0;
        s.nodes.push_back({4000, 0});
        const int n = nranks(rng);
        const int k = kd(rng);
        for (int i = 0; i < n; ++i) {
            RankProfile r;
            r.cells = cells(rng);
            r.cost_per_cell_usec = Rational(1, 2); // half a microsecond per cell
            r.comm_rounds_per_iter = k;
            r.node = 0;
            const std::int64_t lim = limits(rng);
            r.cgroup.cpu_weight = lim;
            if (hard) r.cgroup.quota_usec = lim * 100; // lim m over 100ms
            s.ranks.push_back(r);
        }
        auto res = simulate(s);
        REQUIRE(res.iterations_completed == s.iterations);
        for (int i = 0; i < n; ++i) {
            const std::int64_t work =
                (Rational(s.ranks[static_cast<std::size_t>(i)].cells) * Rational(1, 2) *
                 Rational(1000))
                    .floor();
            CHECK(res.ranks[static_cast<std::size_t>(i)].cpu_millicore_usec ==
                  work * s.iterations);
        }
    }
}

TEST_CASE("requests-only scenarios never throttle") {
    std::mt19937_64 rng(31337);
    std::uniform_int_distribution<int> nranks(1, 8);
    std::uniform_int_distribution<std::int64_t> cells(100, 500000);
    std::uniform_int_distribution<std::int64_t> weights(1, 4000);
    for (int trial = 0; trial < 40; ++trial) {
        SimScenario s;
        s.iterations = 2;
        s.nodes.push_back({2000, 500});
        const int n = nranks(rng);
        for (int i = 0; i < n; ++i) {
            RankProfile r;
            r.cells = cells(rng);
            r.comm_rounds_per_iter = 2;
            r.cgroup.cpu_weight = weights(rng);
            s.ranks.push_back(r);
        }
        auto res = simulate(s);
        for (const auto& r : res.ranks) {
            CHECK(r.nr_throttled == 0);
            CHECK(r.throttled_usec == 0);
        }
    }
}

TEST_CASE("identical runs produce identical results") {
    SimScenario s;
    s.mode = SimScenario::Mode::HardLimits;
    s.iterations = 5;
    s.barrier_latency_usec = 123;
    s.nodes.push_back({4000, 250});
    const std::int64_t cell_counts[] = {8335, 2778, 556, 556};
    const std::int64_t lims[] = {250, 250, 1000, 2500};
    for (int i = 0; i < 4; ++i) {
        RankProfile r;
        r.cells = cell_counts[i];
        r.cost_per_cell_usec = Rational(10);
        r.comm_rounds_per_iter = 4;
        r.node = 0;
        r.cgroup.cpu_weight = lims[i];
        r.cgroup.quota_usec = lims[i] * 100;
        s.ranks.push_back(r);
    }
    auto a = simulate(s);
    auto b = simulate(s);
    CHECK(results_equal(a, b));
    CHECK(a.wall_clock_usec > 0);
}

TEST_CASE("adding work never speeds up a shared node") {
    std::mt19937_64 rng(555);
    std::uniform_int_distribution<std::int64_t> cells(1000, 80000);
    std::uniform_int_distribution<std::int64_t> weights(100, 1000);
    std::uniform_int_distribution<std::int64_t> extra(1, 40000);
    for (int trial = 0; trial < 40; ++trial) {
        SimScenario s;
        s.iterations = 2;
        s.nodes.push_back({2000, 0});
        for (int i = 0; i < 4; ++i) {
            RankProfile r;
            r.cells = cells(rng);
            r.comm_rounds_per_iter = 2;
            r.cgroup.cpu_weight = weights(rng);
            s.ranks.push_back(r);
        }
        auto base = simulate(s);
        std::uniform_int_distribution<std::size_t> pick(0, 3);
        s.ranks[pick(rng)].cells += extra(rng);
        auto more = simulate(s);
        CHECK(more.wall_clock_usec >= base.wall_clock_usec);
    }
}

TEST_CASE("usage samples report windowed averages") {
    SimScenario s = one_rank(12000000, std::nullopt, 1000);
    s.sample_interval_usec = 5000000;
    auto res = simulate(s);
    REQUIRE(res.wall_clock_usec == 12000000);
    REQUIRE(res.ranks[0].samples.size() == 3);
    CHECK(res.ranks[0].samples[0].time_usec == 5000000);
    CHECK(res.ranks[0].samples[0].millicores == 1000);
    CHECK(res.ranks[0].samples[1].time_usec == 10000000);
    CHECK(res.ranks[0].samples[1].millicores == 1000);
    CHECK(res.ranks[0].samples[2].time_usec == 12000000);
    CHECK(res.ranks[0].samples[2].millicores == 1000);
}

TEST_CASE("throttled usage averages to the limit over aligned windows") {
    // 250m limit saturated for 100 periods. The first sample window spans
    // exactly 50 periods, so its average is exactly the limit.
    SimScenario s = one_rank(2500000, 25000, 1000);
    s.sample_interval_usec = 5000000;
    auto res = simulate(s);
    CHECK(res.wall_clock_usec == 99 * 100000 + 25000);
    CHECK(res.ranks[0].cpu_millicore_usec == 2500000000);
    REQUIRE(res.ranks[0].samples.size() == 2);
    CHECK(res.ranks[0].samples[0].millicores == 250);
}

TEST_CASE("scenario validation rejects broken inputs") {
    SimScenario s = one_rank(1000, std::nullopt, 1000);
    CHECK_NOTHROW(s.validate());

    SimScenario bad = s;
    bad.nodes.clear();
    CHECK_THROWS_AS(bad.validate(), BadScenario);

    bad = s;
    bad.ranks.clear();
    CHECK_THROWS_AS(bad.validate(), BadScenario);

    bad = s;
    bad.iterations = 0;
    CHECK_THROWS_AS(bad.validate(), BadScenario);

    bad = s;
    bad.ranks[0].cells = 0;
    CHECK_THROWS_AS(bad.validate(), BadScenario);

    bad = s;
    bad.ranks[0].node = 3;
    CHECK_THROWS_AS(bad.validate(), BadScenario);

    bad = s;
    bad.ranks[0].cgroup.quota_usec = 1000; // quota in a requests-only scenario
    CHECK_THROWS_AS(bad.validate(), BadScenario);

    bad = s;
    bad.mode = SimScenario::Mode::HardLimits; // no quota in a hard-limits scenario
    CHECK_THROWS_AS(bad.validate(), BadScenario);

    bad = s;
    bad.ranks.push_back(bad.ranks[0]);
    bad.ranks[1].comm_rounds_per_iter = 2;
    CHECK_THROWS_AS(bad.validate(), BadScenario);

    bad = s;
    bad.ranks[0].cost_per_cell_usec = Rational(1, 2001); // work rounds to zero
    bad.ranks[0].cells = 1;
    CHECK_THROWS_AS(bad.validate(), BadScenario);
}

TEST_CASE("a fully loaded node cannot host ranks") {
    SimScenario s = one_rank(1000, std::nullopt, 1000);
    s.nodes[0].background_load_millicores = 1000;
    CHECK_THROWS_AS(simulate(s), UnschedulableScenario);
    // an overloaded node with no residents is fine
    SimScenario ok = one_rank(1000, std::nullopt, 1000);
    ok.nodes.push_back({500, 500});
    CHECK_NOTHROW(simulate(ok));
}

namespace {

// two ranks on one node; rank 0 is tiny so it spends the run at the barrier
SimScenario waiter_scenario(std::int64_t heavy_cells, int k, bool poll) {
    SimScenario s;
    s.mode = SimScenario::Mode::HardLimits;
    s.iterations = 1;
    s.busy_wait_barriers = poll;
    s.nodes.push_back({2000, 0});
    RankProfile a;
    a.cells = 100;
    a.comm_rounds_per_iter = k;
    a.cgroup.cpu_weight = 250;
    a.cgroup.quota_usec = 25000;
    RankProfile b = a;
    b.cells = heavy_cells;
    b.cgroup.cpu_weight = 1000;
    b.cgroup.quota_usec = 100000;
    s.ranks = {a, b};
    return s;
}

} // namespace

TEST_CASE("barrier polling burns quota while waiting") {
    // rank 0 computes 100us, then polls at 1000m until its 25ms quota is
    // gone; suspended from then to the run's end at rank 1's arrival.
    auto res = simulate(waiter_scenario(50000, 1, true));
    CHECK(res.wall_clock_usec == 50000);
    CHECK(res.ranks[0].cpu_millicore_usec == 25'000'000); // exactly one grant
    CHECK(res.ranks[0].nr_throttled == 1);
    CHECK(res.ranks[0].throttled_usec == 25000); // 25ms..50ms, cut at the end
    CHECK(res.ranks[1].cpu_millicore_usec == 50'000'000);
    CHECK(res.ranks[1].nr_throttled == 0);

    // without polling the wait is free
    auto idle = simulate(waiter_scenario(50000, 1, false));
    CHECK(idle.wall_clock_usec == 50000);
    CHECK(idle.ranks[0].cpu_millicore_usec == 100'000);
    CHECK(idle.ranks[0].nr_throttled == 0);
    CHECK(idle.ranks[0].throttled_usec == 0);
}

TEST_CASE("a waiter suspended mid-round picks its chunk up at the boundary") {
    // K=2: rank 0 polls itself into suspension during round 0 (at 25ms),
    // misses the release at 75ms, resumes at 100ms, computes its 50us chunk,
    // then polls into a second suspension at 125ms.
    auto res = simulate(waiter_scenario(150000, 2, true));
    CHECK(res.wall_clock_usec == 150000);
    REQUIRE(res.rounds.size() == 1);
    REQUIRE(res.rounds[0].size() == 2);
    CHECK(res.rounds[0][0].last_arrival_usec == 75000);
    CHECK(res.rounds[0][1].start_usec == 75000);
    CHECK(res.rounds[0][1].last_arrival_usec == 150000);
    CHECK(res.ranks[0].nr_throttled == 2);
    CHECK(res.ranks[0].throttled_usec == 100000); // 75ms window + 25ms tail
    CHECK(res.ranks[0].cpu_millicore_usec == 50'000'000); // two full grants
    CHECK(res.ranks[1].cpu_millicore_usec == 150'000'000);
}

TEST_CASE("a waiter suspended with no open round goes back to waiting") {
    // K=1: when rank 0 resumes at 100ms the round is still open, so it has
    // no work and polls again until the next suspension.
    auto res = simulate(waiter_scenario(150000, 1, true));
    CHECK(res.wall_clock_usec == 150000);
    REQUIRE(res.rounds.size() == 1);
    REQUIRE(res.rounds[0].size() == 1);
    CHECK(res.ranks[0].nr_throttled == 2);
    CHECK(res.ranks[0].throttled_usec == 100000);
    CHECK(res.ranks[0].cpu_millicore_usec == 50'000'000);
}

TEST_CASE("requests-only runs ignore barrier polling") {
    SimScenario on = waiter_scenario(50000, 1, true);
    on.mode = SimScenario::Mode::RequestsOnly;
    for (auto& r : on.ranks) r.cgroup.quota_usec.reset();
    SimScenario off = on;
    off.busy_wait_barriers = false;
    auto a = simulate(on);
    auto b = simulate(off);
    CHECK(results_equal(a, b));
    CHECK(a.ranks[0].cpu_millicore_usec == 100'000); // compute only
    CHECK(a.ranks[0].nr_throttled == 0);
}

TEST_CASE("polling waiters contend for node share like computing ranks") {
    // 1500m node, equal weights: 750m each while both are runnable. rank 0
    // finishes its 75us of work and keeps polling at 750m, so both ranks end
    // up consuming the same total.
    SimScenario s;
    s.mode = SimScenario::Mode::HardLimits;
    s.iterations = 1;
    s.busy_wait_barriers = true;
    s.nodes.push_back({1500, 0});
    RankProfile a;
    a.cells = 75;
    a.comm_rounds_per_iter = 1;
    a.cgroup.cpu_weight = 500;
    a.cgroup.quota_usec = 25000;
    RankProfile b = a;
    b.cells = 15000;
    b.cgroup.quota_usec = 100000;
    s.ranks = {a, b};

    auto res = simulate(s);
    CHECK(res.wall_clock_usec == 20000); // 15e6 mcus at 750m
    CHECK(res.ranks[0].cpu_millicore_usec == 15'000'000);
    CHECK(res.ranks[0].nr_throttled == 0);
    CHECK(res.ranks[1].cpu_millicore_usec == 15'000'000);

    // shrink rank 0's quota: it suspends at 13334us and rank 1 speeds up to
    // the full core for the rest of its chunk.
    s.ranks[0].cgroup.quota_usec = 10000;
    auto tight = simulate(s);
    CHECK(tight.wall_clock_usec == 18334);
    CHECK(tight.ranks[0].cpu_millicore_usec == 10'000'000); // full grant, no more
    CHECK(tight.ranks[0].nr_throttled == 1);
    CHECK(tight.ranks[0].throttled_usec == 5000); // cut at the run's end
    CHECK(tight.ranks[1].cpu_millicore_usec == 15'000'000);
}

TEST_CASE("scenario ranks can be derived from an allocation plan") {
    WeightVector v;
    for (auto w : {1, 1, 5, 15}) v.weights.emplace_back(w);
    auto plan = allocate_cpu(v, 4000, LimitMode::HardLimits);
    auto cells = apportion_cells(v, 12225);
    auto ranks = ranks_from_plan(plan, cells.cells_per_rank, Rational(1), 4, {0, 0, 0, 0});
    REQUIRE(ranks.size() == 4);
    CHECK(ranks[3].cells == 8335);
    CHECK(ranks[3].cgroup.cpu_weight == 2727);
    CHECK(*ranks[3].cgroup.quota_usec == 272700);
    CHECK(ranks[0].comm_rounds_per_iter == 4);

    SimScenario s;
    s.mode = SimScenario::Mode::HardLimits;
    s.iterations = 1;
    s.nodes.push_back({4000, 0});
    s.ranks = ranks;
    CHECK_NOTHROW(s.validate());
}
