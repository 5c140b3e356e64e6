#include "ranksched/cgroup.hpp"

#include <string>

#include "ranksched/errors.hpp"

namespace ranksched {

void CgroupParams::validate() const {
    if (period_usec < 1) throw ValidationError("cgroup period must be positive");
    if (quota_usec && *quota_usec < 1) throw ValidationError("cgroup quota must be positive");
    if (cpu_weight < 1) throw ValidationError("cgroup cpu weight must be positive");
}

std::int64_t quota_for_limit(std::int64_t limit_millicores, std::int64_t period_usec) {
    if (limit_millicores < 1) throw ValidationError("limit must be at least 1 millicore");
    if (period_usec < 1) throw ValidationError("period must be positive");
    __int128 product = static_cast<__int128>(limit_millicores) * period_usec;
    if (product % 1000 != 0)
        throw NonIntegralQuota("limit " + std::to_string(limit_millicores) + "m over period " +
                               std::to_string(period_usec) +
                               "us does not yield a whole-microsecond quota");
    __int128 q = product / 1000;
    if (q > INT64_MAX) throw ValidationError("quota exceeds 64-bit range");
    return static_cast<std::int64_t>(q);
}

CgroupParams cgroup_for_rank(const AllocationPlan& plan, std::size_t rank,
                             std::int64_t period_usec) {
    plan.validate();
    if (rank >= plan.size()) throw ValidationError("rank index out of range");
    CgroupParams p;
    p.period_usec = period_usec;
    p.cpu_weight = plan.requests_millicores[rank];
    if (plan.mode == LimitMode::HardLimits)
        p.quota_usec = quota_for_limit((*plan.limits_millicores)[rank], period_usec);
    p.validate();
    return p;
}

} // namespace ranksched
