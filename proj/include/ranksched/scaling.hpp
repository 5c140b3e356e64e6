#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ranksched/alloc.hpp"
#include "ranksched/sim.hpp"

namespace ranksched {

// Three-phase allocation profile: full allocation during startup, a reduced
// mid-run allocation, and a tail allocation once the solve has quieted down.
struct PhaseSchedule {
    std::int64_t t1_usec = 0;
    std::int64_t t2_usec = 0;
    AllocationPlan alloc_max;
    AllocationPlan alloc_mid;
    AllocationPlan alloc_min;

    void validate() const;
};

// alloc_max for t < t1, alloc_mid for t1 <= t < t2, alloc_min for t >= t2.
const AllocationPlan& phase_allocation(std::int64_t t_usec, const PhaseSchedule& schedule);

struct PatchTrigger {
    enum class Kind { AtTime, AtIteration, AtProgressFraction };
    Kind kind = Kind::AtTime;
    std::int64_t time_usec = 0;      // AtTime
    std::int64_t iteration = 0;      // AtIteration: fires when this many iterations completed
    Rational fraction{0};            // AtProgressFraction
};

struct PatchEntry {
    PatchTrigger trigger;
    std::vector<std::size_t> targets;
    std::vector<std::int64_t> new_requests_millicores;
    std::optional<std::vector<std::int64_t>> new_limits_millicores;
};

struct PatchPlan {
    std::vector<PatchEntry> entries;

    void validate() const;
};

// Two patch entries: move every rank to alloc_mid at t1 and alloc_min at t2.
PatchPlan build_patch_plan(const PhaseSchedule& schedule);

constexpr std::int64_t kDefaultSyncDelayUsec = 5000000;

// Runs the scenario with the plan injected. Trigger firings become resizes
// effective sync_delay later, landing on the next period boundary. A target
// whose new request exceeds its standing hard limit is recorded as a
// ResizeConflict outcome; the remaining targets still go through.
SimResult apply_plan_in_sim(const PatchPlan& plan, const SimScenario& scenario,
                            std::int64_t sync_delay_usec = kDefaultSyncDelayUsec);

enum class ProgressSource { IterationCounter, TimeDirectoryListing, LogLine };

struct ProgressSignal {
    ProgressSource source = ProgressSource::IterationCounter;
    std::int64_t staleness_usec = 0; // how far behind the observed value lags
};

enum class TransitionDecision { Fire, Hold };

// Pure threshold test on an already-observed progress value.
TransitionDecision detect_transition(const ProgressSignal& signal, const Rational& observed,
                                     const Rational& threshold);

// Step-function progress history: value holds from each point until the next.
struct ProgressTrace {
    std::vector<std::pair<std::int64_t, Rational>> points; // (time, fraction), time ascending

    Rational at(std::int64_t t_usec) const; // 0 before the first point
    void validate() const;
};

// Earliest time at which a monitor reading the trace through the signal's
// staleness window sees progress >= threshold. Empty when that never happens
// within the horizon.
std::optional<std::int64_t> first_fire_time(const ProgressSignal& signal,
                                            const ProgressTrace& trace,
                                            const Rational& threshold,
                                            std::int64_t horizon_usec);

// Millicore-microseconds of CPU provisioned by the schedule over [0, t_end):
// each phase contributes its total allocation times its duration.
std::int64_t provisioned_millicore_usec(const PhaseSchedule& schedule, std::int64_t t_end_usec);

} // namespace ranksched
