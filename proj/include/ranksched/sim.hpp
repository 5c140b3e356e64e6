#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ranksched/cgroup.hpp"
#include "ranksched/rational.hpp"

namespace ranksched {

struct NodeSpec {
    std::int64_t capacity_millicores = 0;
    std::int64_t background_load_millicores = 0; // constant co-resident draw
};

// One single-threaded MPI rank. Demand while computing is one full core,
// subject to node contention and the rank's bandwidth quota.
struct RankProfile {
    std::int64_t cells = 0;
    Rational cost_per_cell_usec{1};    // CPU microseconds per cell per iteration
    int comm_rounds_per_iter = 4;      // K barriers per iteration
    int node = 0;
    CgroupParams cgroup;
};

struct SimScenario {
    enum class Mode { HardLimits, RequestsOnly };
    Mode mode = Mode::RequestsOnly;
    std::int64_t iterations = 1;
    std::int64_t barrier_latency_usec = 0;
    std::int64_t sample_interval_usec = 5000000;
    // MPI-style busy polling: a rank waiting at a barrier keeps burning CPU
    // (and quota) without making progress, so it can be suspended while
    // "idle". Only meaningful under HardLimits; weight-based scheduling lets
    // waiters yield, so RequestsOnly runs ignore the flag.
    bool busy_wait_barriers = false;
    std::vector<NodeSpec> nodes;
    std::vector<RankProfile> ranks;

    void validate() const;
};

struct UsageSample {
    std::int64_t time_usec = 0;  // end of the averaging window
    std::int64_t millicores = 0; // mean rate over the window, floored
};

struct RankStats {
    std::int64_t nr_throttled = 0;
    std::int64_t throttled_usec = 0;
    // Exact CPU consumed, in millicore-microseconds (1e-9 core-seconds).
    std::int64_t cpu_millicore_usec = 0;
    std::vector<UsageSample> samples;
};

struct ResizeOutcome {
    enum class Status { Applied, Conflict };
    std::size_t rank = 0;
    std::int64_t requested_at_usec = 0; // trigger fire time
    std::int64_t effective_usec = 0;    // fire + sync delay
    std::int64_t applied_usec = 0;      // period boundary where it landed (Applied only)
    Status status = Status::Applied;
    std::int64_t new_request_millicores = 0;
    std::string detail;
};

struct RoundTrace {
    std::int64_t start_usec = 0;        // all ranks released into the round
    std::int64_t last_arrival_usec = 0; // slowest rank reached the barrier
};

struct SimResult {
    std::int64_t wall_clock_usec = 0;
    std::int64_t iterations_completed = 0;
    std::vector<std::int64_t> per_iteration_wall_usec;
    std::vector<RankStats> ranks;
    std::vector<ResizeOutcome> resize_events;
    // rounds[i][r]: round r of iteration i. Kept in memory for consistency
    // checks; not part of the serialized result.
    std::vector<std::vector<RoundTrace>> rounds;
};

// Weighted max-min fair share of a node's available capacity among the
// runnable ranks, each capped (single-threaded demand). Exact integer
// millicores: capped ranks get the cap, the rest split the remainder by
// largest-remainder apportionment. Total never exceeds the available
// capacity.
std::vector<std::int64_t> fair_share(std::int64_t available_millicores,
                                     const std::vector<std::int64_t>& weights,
                                     std::int64_t cap_millicores = 1000);

struct PeriodWalk {
    std::int64_t run_usec = 0;       // CPU time obtained over the horizon
    std::int64_t throttled_usec = 0; // wall time spent suspended
    std::int64_t nr_throttled = 0;   // periods containing a suspension
};

// Brute-force reference for one cgroup under constant demand: walks the
// horizon period by period. Within each period the cgroup gets
// min(quota, demand*period/1000) CPU microseconds and is suspended to the
// period end if the demand was not met. Horizon must be a whole number of
// periods. Wall-clock rounding matches the simulator: a partial microsecond
// of runtime rounds up.
PeriodWalk step_period_oracle(std::int64_t quota_usec, std::int64_t period_usec,
                              std::int64_t demand_millicores, std::int64_t horizon_usec);

struct ResizeRequest {
    std::size_t rank = 0;
    std::int64_t new_request_millicores = 0;
    // For hard-limits scenarios: replacement limit. Unset keeps the old one.
    std::optional<std::int64_t> new_limit_millicores;
};

struct PatchPlan;

// Deterministic discrete-event execution of a scenario. Time is integer
// virtual microseconds. Exposed as a class so resizes can be injected while
// a run is in flight.
class SimEngine {
public:
    explicit SimEngine(const SimScenario& scenario);
    ~SimEngine();
    SimEngine(SimEngine&&) noexcept;
    SimEngine& operator=(SimEngine&&) noexcept;

    std::int64_t now() const;
    bool finished() const;

    // Advances until the next event would land beyond `t_usec`.
    void run_until(std::int64_t t_usec);

    // Registers an in-place resize, applied at the rank's next period
    // boundary at or after effective_usec (never before now()). Throws
    // ResizeConflict if a hard-limits target asks for more than its current
    // limit; the scenario keeps running with the old parameters in that case
    // only when the request came through a patch plan.
    void apply_resize(const ResizeRequest& request, std::int64_t effective_usec,
                      std::int64_t requested_at_usec = -1);

    // Registers a patch plan whose triggers are resolved during the run.
    // Each firing target becomes a resize effective at fire + sync_delay.
    void attach_plan(const PatchPlan& plan, std::int64_t sync_delay_usec);

    SimResult finish();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

SimResult simulate(const SimScenario& scenario);

// Scenario ranks derived from an allocation plan: one rank per plan entry.
std::vector<RankProfile> ranks_from_plan(const AllocationPlan& plan,
                                         const std::vector<std::int64_t>& cells,
                                         const Rational& cost_per_cell_usec,
                                         int comm_rounds_per_iter,
                                         const std::vector<int>& node_of_rank,
                                         std::int64_t period_usec = kDefaultPeriodUsec);

} // namespace ranksched
