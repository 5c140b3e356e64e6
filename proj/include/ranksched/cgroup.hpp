#pragma once

#include <cstdint>
#include <optional>

#include "ranksched/alloc.hpp"

namespace ranksched {

constexpr std::int64_t kDefaultPeriodUsec = 100000;

// CFS bandwidth parameters for one rank's cgroup. An empty quota means
// unlimited (requests-only pods).
struct CgroupParams {
    std::optional<std::int64_t> quota_usec; // CPU-time budget per period
    std::int64_t period_usec = kDefaultPeriodUsec;
    std::int64_t cpu_weight = 1; // proportional share under contention

    bool bounded() const { return quota_usec.has_value(); }
    void validate() const;
};

// quota = limit * period / 1000. Throws NonIntegralQuota when that division
// is not exact, rather than rounding a hard limit up or down silently.
std::int64_t quota_for_limit(std::int64_t limit_millicores, std::int64_t period_usec);

// Bandwidth parameters for one rank of a plan: hard-limits plans get a
// bounded quota from their limit, requests-only plans run unbounded. Either
// way the contention weight is the request in millicores.
CgroupParams cgroup_for_rank(const AllocationPlan& plan, std::size_t rank,
                             std::int64_t period_usec = kDefaultPeriodUsec);

} // namespace ranksched
