#include "ranksched/sim.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "ranksched/errors.hpp"
#include "ranksched/scaling.hpp"

namespace ranksched {

namespace {

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();

std::int64_t ceil_div(std::int64_t x, std::int64_t d) {
    return (x + d - 1) / d;
}

} // namespace

void SimScenario::validate() const {
    if (nodes.empty()) throw BadScenario("scenario has no nodes");
    if (ranks.empty()) throw BadScenario("scenario has no ranks");
    if (iterations < 1) throw BadScenario("iterations must be positive");
    if (barrier_latency_usec < 0) throw BadScenario("barrier latency must be non-negative");
    if (sample_interval_usec < 1) throw BadScenario("sample interval must be positive");
    for (std::size_t n = 0; n < nodes.size(); ++n) {
        if (nodes[n].capacity_millicores < 1)
            throw BadScenario("node " + std::to_string(n) + " has no capacity");
        if (nodes[n].background_load_millicores < 0)
            throw BadScenario("node " + std::to_string(n) + " has negative background load");
    }
    int k = ranks.front().comm_rounds_per_iter;
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        const auto& r = ranks[i];
        std::string who = "rank " + std::to_string(i);
        if (r.cells < 1) throw BadScenario(who + " has no cells");
        if (r.cost_per_cell_usec <= Rational(0)) throw BadScenario(who + " has non-positive cost");
        if (r.comm_rounds_per_iter < 1) throw BadScenario(who + " has no comm rounds");
        if (r.comm_rounds_per_iter != k)
            throw BadScenario("comm rounds differ between ranks; barriers are global");
        if (r.node < 0 || static_cast<std::size_t>(r.node) >= nodes.size())
            throw BadScenario(who + " references node " + std::to_string(r.node));
        r.cgroup.validate();
        bool bounded = r.cgroup.bounded();
        if (mode == Mode::HardLimits && !bounded)
            throw BadScenario(who + " has no quota in a hard-limits scenario");
        if (mode == Mode::RequestsOnly && bounded)
            throw BadScenario(who + " has a quota in a requests-only scenario");
        Rational work = Rational(r.cells) * r.cost_per_cell_usec * Rational(1000);
        if (work < Rational(1)) throw BadScenario(who + " work rounds to zero");
        if (Rational(2'000'000'000'000'000) < work)
            throw BadScenario(who + " work exceeds supported range");
    }
}

std::vector<std::int64_t> fair_share(std::int64_t available_millicores,
                                     const std::vector<std::int64_t>& weights,
                                     std::int64_t cap_millicores) {
    if (available_millicores < 0) throw ValidationError("available capacity is negative");
    if (cap_millicores < 1) throw ValidationError("per-rank cap must be positive");
    const std::size_t n = weights.size();
    for (std::size_t i = 0; i < n; ++i)
        if (weights[i] < 1) throw ValidationError("fair share weight must be positive");

    std::vector<std::int64_t> alloc(n, 0);
    std::vector<std::size_t> active(n);
    std::iota(active.begin(), active.end(), 0);
    std::int64_t remaining = available_millicores;

    while (!active.empty() && remaining > 0) {
        __int128 wsum = 0;
        for (auto i : active) wsum += weights[i];
        // Ranks whose proportional share reaches the cap take exactly the cap.
        std::vector<std::size_t> capped, rest;
        for (auto i : active) {
            if (static_cast<__int128>(remaining) * weights[i] >= static_cast<__int128>(cap_millicores) * wsum)
                capped.push_back(i);
            else
                rest.push_back(i);
        }
        if (!capped.empty()) {
            for (auto i : capped) alloc[i] = cap_millicores;
            remaining -= cap_millicores * static_cast<std::int64_t>(capped.size());
            active.swap(rest);
            continue;
        }
        // Nobody hits the cap: split the remainder by largest remainder over
        // the common denominator wsum.
        std::vector<__int128> rem(n, 0);
        std::int64_t assigned = 0;
        for (auto i : active) {
            __int128 t = static_cast<__int128>(remaining) * weights[i];
            alloc[i] = static_cast<std::int64_t>(t / wsum);
            rem[i] = t % wsum;
            assigned += alloc[i];
        }
        std::int64_t leftover = remaining - assigned;
        std::stable_sort(active.begin(), active.end(), [&](std::size_t a, std::size_t b) {
            if (rem[a] != rem[b]) return rem[a] > rem[b];
            return a < b;
        });
        for (std::int64_t j = 0; j < leftover; ++j) alloc[active[static_cast<std::size_t>(j)]] += 1;
        break;
    }
    return alloc;
}

PeriodWalk step_period_oracle(std::int64_t quota_usec, std::int64_t period_usec,
                              std::int64_t demand_millicores, std::int64_t horizon_usec) {
    if (quota_usec < 1) throw ValidationError("quota must be positive");
    if (period_usec < 1) throw ValidationError("period must be positive");
    if (demand_millicores < 1) throw ValidationError("demand must be positive");
    if (horizon_usec < 0 || horizon_usec % period_usec != 0)
        throw ValidationError("horizon must be a whole number of periods");

    const std::int64_t periods = horizon_usec / period_usec;
    const std::int64_t need_mcus = demand_millicores * period_usec;
    const std::int64_t quota_mcus = quota_usec * 1000;
    const std::int64_t grant_mcus = std::min(quota_mcus, need_mcus);
    const std::int64_t run_wall = ceil_div(grant_mcus, demand_millicores);

    PeriodWalk w;
    std::int64_t run_mcus_total = 0;
    for (std::int64_t p = 0; p < periods; ++p) {
        run_mcus_total += grant_mcus;
        if (grant_mcus < need_mcus) {
            w.throttled_usec += period_usec - run_wall;
            w.nr_throttled += 1;
        }
    }
    w.run_usec = run_mcus_total / 1000;
    return w;
}

// ---------------------------------------------------------------------------
// Event engine

struct SimEngine::Impl {
    enum class St { Computing, Throttled, Blocked, Done };

    struct Rank {
        // static
        int node = 0;
        std::int64_t weight = 1;
        bool bounded = false;
        std::int64_t quota_full = 0; // mcus per period when bounded
        std::int64_t period = kDefaultPeriodUsec;
        std::vector<std::int64_t> chunk_mcus;
        // dynamic
        St st = St::Computing;
        std::int64_t work_left = 0;
        std::int64_t quota_left = 0;
        std::int64_t period_idx = 0; // period the current quota belongs to
        std::int64_t resume_at = 0;
        std::int64_t throttle_start = 0;
        std::int64_t throttle_counted_period = -1;
        std::int64_t rate = 0; // current millicores while computing
        // stats
        std::int64_t nr_throttled = 0;
        std::int64_t throttled_usec = 0;
        std::int64_t used = 0; // mcus
        std::vector<std::pair<std::int64_t, std::int64_t>> checkpoints; // (t, used)
    };

    struct Pending {
        std::int64_t apply_at = 0;
        std::int64_t seq = 0;
        std::size_t rank = 0;
        std::int64_t new_weight = 0;
        bool replace_quota = false;
        std::int64_t new_quota_full = 0; // mcus
        std::int64_t requested_at = 0;
        std::int64_t effective = 0;
    };

    SimScenario sc;
    int num_ranks = 0;
    int comm_rounds = 1;
    std::int64_t latency = 0;
    bool spin = false; // barrier waiters poll and burn quota

    std::vector<Rank> ranks;
    std::vector<std::int64_t> node_avail;

    std::int64_t now = 0;
    bool done = false;

    int cur_round = 0;
    std::int64_t completed_iters = 0;
    std::int64_t iter_start = 0;
    std::int64_t round_start = 0;
    int arrived = 0;
    std::int64_t last_arrival = -1;
    std::int64_t pending_barrier = -1;

    std::vector<Pending> pending;
    std::int64_t seq_counter = 0;

    std::optional<PatchPlan> plan;
    std::int64_t sync_delay = 0;
    std::vector<bool> plan_fired;

    SimResult res;
    bool finished_result = false;

    explicit Impl(const SimScenario& scenario) : sc(scenario) {
        sc.validate();
        num_ranks = static_cast<int>(sc.ranks.size());
        comm_rounds = sc.ranks.front().comm_rounds_per_iter;
        latency = sc.barrier_latency_usec;
        spin = sc.busy_wait_barriers && sc.mode == SimScenario::Mode::HardLimits;

        node_avail.resize(sc.nodes.size());
        std::vector<bool> node_used(sc.nodes.size(), false);
        for (const auto& rp : sc.ranks) node_used[static_cast<std::size_t>(rp.node)] = true;
        for (std::size_t n = 0; n < sc.nodes.size(); ++n) {
            node_avail[n] = sc.nodes[n].capacity_millicores - sc.nodes[n].background_load_millicores;
            if (node_used[n] && node_avail[n] < 1)
                throw UnschedulableScenario("node " + std::to_string(n) +
                                            " has no capacity left for its ranks");
        }

        ranks.resize(static_cast<std::size_t>(num_ranks));
        for (int i = 0; i < num_ranks; ++i) {
            const auto& rp = sc.ranks[static_cast<std::size_t>(i)];
            Rank& r = ranks[static_cast<std::size_t>(i)];
            r.node = rp.node;
            r.weight = rp.cgroup.cpu_weight;
            r.bounded = rp.cgroup.bounded();
            r.period = rp.cgroup.period_usec;
            if (r.bounded) {
                __int128 q = static_cast<__int128>(*rp.cgroup.quota_usec) * 1000;
                r.quota_full = static_cast<std::int64_t>(q);
            }
            std::int64_t work =
                (Rational(rp.cells) * rp.cost_per_cell_usec * Rational(1000)).floor();
            r.chunk_mcus.resize(static_cast<std::size_t>(comm_rounds));
            std::int64_t base = work / comm_rounds;
            std::int64_t extra = work % comm_rounds;
            for (int c = 0; c < comm_rounds; ++c)
                r.chunk_mcus[static_cast<std::size_t>(c)] = base + (c < extra ? 1 : 0);
            r.st = St::Computing;
            r.work_left = r.chunk_mcus[0];
            r.quota_left = r.quota_full;
            r.period_idx = 0;
            r.checkpoints.emplace_back(0, 0);
        }
        res.rounds.emplace_back();
        recompute_rates();
    }

    std::int64_t boundary_after(const Rank& r, std::int64_t t) const {
        return (t / r.period + 1) * r.period;
    }

    bool spinning(const Rank& r) const { return spin && r.st == St::Blocked; }

    void recompute_rates() {
        for (std::size_t n = 0; n < sc.nodes.size(); ++n) {
            std::vector<std::size_t> who;
            std::vector<std::int64_t> w;
            for (std::size_t i = 0; i < ranks.size(); ++i) {
                bool demands = ranks[i].st == St::Computing || spinning(ranks[i]);
                if (demands && ranks[i].node == static_cast<int>(n)) {
                    who.push_back(i);
                    w.push_back(ranks[i].weight);
                }
            }
            if (who.empty()) continue;
            auto shares = fair_share(node_avail[n], w, 1000);
            for (std::size_t k = 0; k < who.size(); ++k) ranks[who[k]].rate = shares[k];
        }
    }

    std::int64_t next_event_time() const {
        std::int64_t tn = kInf;
        for (const auto& r : ranks) {
            switch (r.st) {
            case St::Computing:
                if (r.work_left == 0 || (r.bounded && r.quota_left == 0)) return now;
                if (r.rate > 0) {
                    tn = std::min(tn, now + ceil_div(r.work_left, r.rate));
                    if (r.bounded) {
                        std::int64_t b = boundary_after(r, now);
                        std::int64_t tq = now + ceil_div(r.quota_left, r.rate);
                        tn = std::min(tn, std::min(tq, b));
                    }
                } else if (r.bounded) {
                    tn = std::min(tn, boundary_after(r, now));
                }
                break;
            case St::Throttled:
                tn = std::min(tn, r.resume_at);
                break;
            case St::Blocked:
                // A polling waiter drains quota and must see every boundary,
                // or stale quota would leak across periods.
                if (spin && r.bounded) {
                    if (r.quota_left == 0) return now;
                    if (r.rate > 0) tn = std::min(tn, now + ceil_div(r.quota_left, r.rate));
                    tn = std::min(tn, boundary_after(r, now));
                }
                break;
            default:
                break;
            }
        }
        if (pending_barrier >= 0) tn = std::min(tn, pending_barrier);
        for (const auto& p : pending) tn = std::min(tn, p.apply_at);
        if (plan) {
            for (std::size_t e = 0; e < plan->entries.size(); ++e) {
                const auto& entry = plan->entries[e];
                if (!plan_fired[e] && entry.trigger.kind == PatchTrigger::Kind::AtTime)
                    tn = std::min(tn, std::max(now, entry.trigger.time_usec));
            }
        }
        return tn;
    }

    // Usage between two checkpoints is linear, so every flat stretch (idle,
    // throttled, blocked) must be fenced by marks or sampling would smear
    // consumption into it.
    static void mark(Rank& r, std::int64_t t) {
        if (r.checkpoints.back().first != t) r.checkpoints.emplace_back(t, r.used);
    }

    void advance_all(std::int64_t t) {
        std::int64_t dt = t - now;
        if (dt <= 0) return;
        for (auto& r : ranks) {
            if (r.st == St::Computing) {
                if (r.rate > 0) {
                    __int128 by_rate = static_cast<__int128>(r.rate) * dt;
                    std::int64_t c = r.work_left;
                    if (by_rate < c) c = static_cast<std::int64_t>(by_rate);
                    if (r.bounded && r.quota_left < c) c = r.quota_left;
                    if (c > 0) {
                        r.work_left -= c;
                        if (r.bounded) r.quota_left -= c;
                        r.used += c;
                    }
                }
                mark(r, t);
            } else if (spinning(r) && r.rate > 0) {
                // polling burns CPU but moves no work
                __int128 by_rate = static_cast<__int128>(r.rate) * dt;
                std::int64_t c = r.bounded ? r.quota_left : kInf;
                if (by_rate < c) c = static_cast<std::int64_t>(by_rate);
                if (c > 0) {
                    if (r.bounded) r.quota_left -= c;
                    r.used += c;
                }
                mark(r, t);
            }
        }
    }

    void process_resizes() {
        if (pending.empty()) return;
        std::vector<Pending> due, later;
        for (auto& p : pending) (p.apply_at == now ? due : later).push_back(p);
        if (due.empty()) return;
        std::sort(due.begin(), due.end(),
                  [](const Pending& a, const Pending& b) { return a.seq < b.seq; });
        for (const auto& p : due) {
            Rank& r = ranks[p.rank];
            r.weight = p.new_weight;
            if (p.replace_quota) {
                r.quota_full = p.new_quota_full;
            }
            if (r.bounded) {
                // Applied on a period boundary: the new allowance starts here.
                r.quota_left = r.quota_full;
                r.period_idx = now / r.period;
            }
            ResizeOutcome out;
            out.rank = p.rank;
            out.requested_at_usec = p.requested_at;
            out.effective_usec = p.effective;
            out.applied_usec = now;
            out.status = ResizeOutcome::Status::Applied;
            out.new_request_millicores = p.new_weight;
            res.resize_events.push_back(out);
        }
        pending.swap(later);
    }

    void process_boundaries() {
        for (auto& r : ranks) {
            if (r.st == St::Throttled && r.resume_at == now) {
                // Suspended at a barrier wait: go back to waiting unless the
                // round opened in the meantime and left work behind.
                r.st = r.work_left > 0 ? St::Computing : St::Blocked;
                r.throttled_usec += now - r.throttle_start;
                r.quota_left = r.quota_full;
                r.period_idx = now / r.period;
                mark(r, now);
            } else if ((r.st == St::Computing || spinning(r)) && r.bounded &&
                       now % r.period == 0 && now / r.period > r.period_idx) {
                r.quota_left = r.quota_full;
                r.period_idx = now / r.period;
            }
        }
    }

    void process_completions() {
        for (std::size_t i = 0; i < ranks.size(); ++i) {
            Rank& r = ranks[i];
            if (r.st == St::Computing && r.work_left == 0) {
                r.st = St::Blocked;
                ++arrived;
                last_arrival = now;
                if (arrived == num_ranks) pending_barrier = now + latency;
            }
        }
    }

    void process_throttles() {
        for (auto& r : ranks) {
            if (!(r.st == St::Computing || spinning(r))) continue;
            if (!r.bounded || r.quota_left > 0) continue;
            r.st = St::Throttled;
            r.resume_at = boundary_after(r, now);
            r.throttle_start = now;
            std::int64_t p = now / r.period;
            if (r.throttle_counted_period != p) {
                r.nr_throttled += 1;
                r.throttle_counted_period = p;
            }
        }
    }

    void release_round() {
        round_start = now;
        for (auto& r : ranks) {
            r.work_left = r.chunk_mcus[static_cast<std::size_t>(cur_round)];
            if (r.st == St::Throttled) continue; // picks the chunk up at its boundary
            r.st = St::Computing;
            if (r.bounded && now / r.period > r.period_idx) {
                r.quota_left = r.quota_full;
                r.period_idx = now / r.period;
            }
            mark(r, now);
        }
    }

    void fire_entry(std::size_t idx) {
        const PatchEntry& entry = plan->entries[idx];
        plan_fired[idx] = true;
        for (std::size_t t = 0; t < entry.targets.size(); ++t) {
            ResizeRequest rq;
            rq.rank = entry.targets[t];
            rq.new_request_millicores = entry.new_requests_millicores[t];
            if (entry.new_limits_millicores)
                rq.new_limit_millicores = (*entry.new_limits_millicores)[t];
            enqueue_resize(rq, now + sync_delay, now, /*from_plan=*/true);
        }
    }

    void on_iteration_complete() {
        if (!plan) return;
        for (std::size_t e = 0; e < plan->entries.size(); ++e) {
            if (plan_fired[e]) continue;
            const auto& trig = plan->entries[e].trigger;
            bool fire = false;
            if (trig.kind == PatchTrigger::Kind::AtIteration) {
                fire = completed_iters >= trig.iteration;
            } else if (trig.kind == PatchTrigger::Kind::AtProgressFraction) {
                __int128 lhs = static_cast<__int128>(completed_iters) * trig.fraction.den();
                __int128 rhs = static_cast<__int128>(trig.fraction.num()) * sc.iterations;
                fire = lhs >= rhs;
            }
            if (fire) fire_entry(e);
        }
    }

    void process_barrier() {
        if (pending_barrier != now) return;
        pending_barrier = -1;
        arrived = 0;
        res.rounds.back().push_back(RoundTrace{round_start, last_arrival});
        last_arrival = -1;
        ++cur_round;
        if (cur_round == comm_rounds) {
            cur_round = 0;
            res.per_iteration_wall_usec.push_back(now - iter_start);
            ++completed_iters;
            on_iteration_complete();
            if (completed_iters == sc.iterations) {
                done = true;
                res.wall_clock_usec = now;
                res.iterations_completed = completed_iters;
                for (auto& r : ranks) {
                    // a waiter suspended when the run ends still owes its tally
                    if (r.st == St::Throttled) r.throttled_usec += now - r.throttle_start;
                    r.st = St::Done;
                }
                return;
            }
            res.rounds.emplace_back();
            iter_start = now;
        }
        release_round();
    }

    void process_attime_triggers() {
        if (!plan) return;
        for (std::size_t e = 0; e < plan->entries.size(); ++e) {
            if (plan_fired[e]) continue;
            const auto& trig = plan->entries[e].trigger;
            if (trig.kind == PatchTrigger::Kind::AtTime && trig.time_usec <= now) fire_entry(e);
        }
    }

    void enqueue_resize(const ResizeRequest& rq, std::int64_t effective,
                        std::int64_t requested_at, bool from_plan) {
        if (rq.rank >= ranks.size()) throw ValidationError("resize targets unknown rank");
        if (rq.new_request_millicores < 1)
            throw ValidationError("resize request must be at least 1 millicore");
        Rank& r = ranks[rq.rank];
        if (requested_at < 0) requested_at = now;
        if (effective < now) effective = now;

        std::optional<std::int64_t> replacement_quota;
        if (rq.new_limit_millicores) {
            if (!r.bounded)
                throw ValidationError("cannot set a limit on a requests-only rank");
            __int128 q = static_cast<__int128>(
                             quota_for_limit(*rq.new_limit_millicores, r.period)) *
                         1000;
            replacement_quota = static_cast<std::int64_t>(q);
        }

        if (r.bounded) {
            // The request is granted against the limit that will be in force:
            // the one shipped with this resize, or else the standing one.
            const std::int64_t quota = replacement_quota.value_or(r.quota_full);
            __int128 lhs = static_cast<__int128>(rq.new_request_millicores) * r.period;
            __int128 rhs = static_cast<__int128>(quota);
            if (lhs > rhs) {
                ResizeOutcome out;
                out.rank = rq.rank;
                out.requested_at_usec = requested_at;
                out.effective_usec = effective;
                out.applied_usec = -1;
                out.status = ResizeOutcome::Status::Conflict;
                out.new_request_millicores = rq.new_request_millicores;
                out.detail = "request " + std::to_string(rq.new_request_millicores) +
                             "m exceeds " +
                             (replacement_quota ? std::string("its own new limit ")
                                                : std::string("existing limit ")) +
                             std::to_string(quota / r.period) + "m";
                res.resize_events.push_back(out);
                if (!from_plan)
                    throw ResizeConflict(out.detail + " (rank " + std::to_string(rq.rank) + ")");
                return;
            }
        }

        Pending p;
        p.rank = rq.rank;
        p.new_weight = rq.new_request_millicores;
        if (replacement_quota) {
            p.replace_quota = true;
            p.new_quota_full = *replacement_quota;
        }
        p.requested_at = requested_at;
        p.effective = effective;
        std::int64_t base = std::max(effective, now);
        std::int64_t b = (base % r.period == 0) ? base : (base / r.period + 1) * r.period;
        p.apply_at = b;
        p.seq = seq_counter++;
        pending.push_back(p);
    }

    void step() {
        std::int64_t tn = next_event_time();
        if (tn == kInf)
            throw SimulationError("no runnable rank can make progress");
        advance_all(tn);
        now = tn;
        process_resizes();
        process_boundaries();
        process_completions();
        process_throttles();
        process_barrier();
        if (!done) process_attime_triggers();
        recompute_rates();
    }

    void run() {
        while (!done) step();
    }

    void build_result() {
        if (finished_result) return;
        finished_result = true;
        if (!res.rounds.empty() && res.rounds.back().empty()) res.rounds.pop_back();
        res.ranks.resize(ranks.size());
        const std::int64_t wall = res.wall_clock_usec;
        const std::int64_t step_usec = sc.sample_interval_usec;
        for (std::size_t i = 0; i < ranks.size(); ++i) {
            Rank& r = ranks[i];
            RankStats& st = res.ranks[i];
            st.nr_throttled = r.nr_throttled;
            st.throttled_usec = r.throttled_usec;
            st.cpu_millicore_usec = r.used;
            std::int64_t prev_t = 0;
            std::int64_t prev_u = 0;
            for (std::int64_t end = std::min(step_usec, wall); prev_t < wall;
                 end = std::min(end + step_usec, wall)) {
                std::int64_t u = used_at(r, end);
                UsageSample s;
                s.time_usec = end;
                s.millicores = (u - prev_u) / (end - prev_t);
                st.samples.push_back(s);
                prev_t = end;
                prev_u = u;
            }
        }
        std::sort(res.resize_events.begin(), res.resize_events.end(),
                  [](const ResizeOutcome& a, const ResizeOutcome& b) {
                      if (a.requested_at_usec != b.requested_at_usec)
                          return a.requested_at_usec < b.requested_at_usec;
                      return a.rank < b.rank;
                  });
    }

    static std::int64_t used_at(const Rank& r, std::int64_t t) {
        const auto& cp = r.checkpoints;
        auto it = std::upper_bound(cp.begin(), cp.end(), t,
                                   [](std::int64_t v, const std::pair<std::int64_t, std::int64_t>& c) {
                                       return v < c.first;
                                   });
        if (it == cp.begin()) return 0;
        auto hi = it;
        auto lo = it - 1;
        if (hi == cp.end()) return lo->second;
        // linear between accounting checkpoints
        __int128 du = hi->second - lo->second;
        std::int64_t dt = hi->first - lo->first;
        return lo->second + static_cast<std::int64_t>(du * (t - lo->first) / dt);
    }
};

SimEngine::SimEngine(const SimScenario& scenario) : impl_(new Impl(scenario)) {}
SimEngine::~SimEngine() = default;
SimEngine::SimEngine(SimEngine&&) noexcept = default;
SimEngine& SimEngine::operator=(SimEngine&&) noexcept = default;

std::int64_t SimEngine::now() const { return impl_->now; }
bool SimEngine::finished() const { return impl_->done; }

void SimEngine::run_until(std::int64_t t_usec) {
    while (!impl_->done) {
        std::int64_t tn = impl_->next_event_time();
        if (tn > t_usec) break;
        impl_->step();
    }
    if (!impl_->done && impl_->now < t_usec) {
        impl_->advance_all(t_usec);
        impl_->now = t_usec;
    }
}

void SimEngine::apply_resize(const ResizeRequest& request, std::int64_t effective_usec,
                             std::int64_t requested_at_usec) {
    impl_->enqueue_resize(request, effective_usec, requested_at_usec, /*from_plan=*/false);
}

void SimEngine::attach_plan(const PatchPlan& plan, std::int64_t sync_delay_usec) {
    plan.validate();
    if (sync_delay_usec < 0) throw ValidationError("sync delay must be non-negative");
    for (const auto& entry : plan.entries) {
        for (auto t : entry.targets)
            if (t >= impl_->ranks.size())
                throw ValidationError("patch plan targets rank " + std::to_string(t) +
                                      " which the scenario does not have");
        if (entry.new_limits_millicores && impl_->sc.mode == SimScenario::Mode::RequestsOnly)
            throw ValidationError("patch plan sets limits but the scenario runs requests-only");
    }
    impl_->plan = plan;
    impl_->sync_delay = sync_delay_usec;
    impl_->plan_fired.assign(plan.entries.size(), false);
}

SimResult SimEngine::finish() {
    impl_->run();
    impl_->build_result();
    return std::move(impl_->res);
}

SimResult simulate(const SimScenario& scenario) {
    SimEngine e(scenario);
    return e.finish();
}

std::vector<RankProfile> ranks_from_plan(const AllocationPlan& plan,
                                         const std::vector<std::int64_t>& cells,
                                         const Rational& cost_per_cell_usec,
                                         int comm_rounds_per_iter,
                                         const std::vector<int>& node_of_rank,
                                         std::int64_t period_usec) {
    plan.validate();
    if (cells.size() != plan.size() || node_of_rank.size() != plan.size())
        throw ValidationError("cells/node lists must match the plan's rank count");
    std::vector<RankProfile> out(plan.size());
    for (std::size_t i = 0; i < plan.size(); ++i) {
        out[i].cells = cells[i];
        out[i].cost_per_cell_usec = cost_per_cell_usec;
        out[i].comm_rounds_per_iter = comm_rounds_per_iter;
        out[i].node = node_of_rank[i];
        out[i].cgroup = cgroup_for_rank(plan, i, period_usec);
    }
    return out;
}

} // namespace ranksched
