#pragma once

#include <cstdint>
#include <vector>

#include "ranksched/alloc.hpp"
#include "ranksched/rational.hpp"
#include "ranksched/sim.hpp"

namespace ranksched {

// Trapezoidal integral of the sampled usage, summed across ranks, in
// core-seconds (millicores x usec / 1e9). Integration starts at each series'
// first sample; the last value extends as a constant to t_end. A single
// sample therefore integrates as a constant over [t0, t_end]. Exact.
Rational cpu_core_seconds(const std::vector<std::vector<UsageSample>>& series,
                          std::int64_t t_end_usec);

// eta = baseline / config. eta > 1 means the configuration consumed less.
Rational resource_efficiency(const Rational& baseline_core_seconds,
                             const Rational& config_core_seconds);

struct SpeedupReport {
    Rational speedup;             // t_reference / t_config
    Rational parallel_efficiency; // speedup / (allocated cores)
};

SpeedupReport speedup_and_parallel_efficiency(std::int64_t t_reference_usec,
                                              std::int64_t t_config_usec,
                                              std::int64_t total_alloc_millicores);

struct PodPlacement {
    int node = 0;
    std::int64_t request_millicores = 0;
};

struct NodeHeadroom {
    int node = 0;
    std::int64_t free_millicores = 0; // capacity minus resident requests, signed
    bool overcommitted = false;
};

struct HeadroomReport {
    std::vector<NodeHeadroom> per_node;
    std::int64_t cluster_free_millicores = 0;
};

HeadroomReport packing_headroom(const std::vector<NodeSpec>& nodes,
                                const std::vector<PodPlacement>& pods);

// Per-rank request reduction relative to a baseline plan (signed; negative
// when the new plan asks for more).
std::vector<std::int64_t> per_rank_freed(const AllocationPlan& baseline,
                                         const AllocationPlan& plan);

struct FreedGroup {
    std::int64_t request_millicores = 0; // the group's per-rank request
    std::int64_t rank_count = 0;
    std::int64_t freed_millicores = 0; // summed reduction vs baseline
};

// Ranks grouped by equal request, each with its total freed millicores vs
// the baseline. Groups are ordered by ascending request.
std::vector<FreedGroup> freed_by_group(const AllocationPlan& baseline,
                                       const AllocationPlan& plan);

} // namespace ranksched
