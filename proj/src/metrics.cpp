#include "ranksched/metrics.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "ranksched/errors.hpp"

namespace ranksched {

Rational cpu_core_seconds(const std::vector<std::vector<UsageSample>>& series,
                          std::int64_t t_end_usec) {
    if (series.empty()) throw EmptySeries("no usage series given");
    Rational total(0);
    for (std::size_t s = 0; s < series.size(); ++s) {
        const auto& samples = series[s];
        if (samples.empty()) throw EmptySeries("usage series " + std::to_string(s) + " is empty");
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (i > 0 && samples[i].time_usec <= samples[i - 1].time_usec)
                throw ValidationError("sample times must strictly increase");
            if (samples[i].millicores < 0) throw ValidationError("negative usage sample");
        }
        if (t_end_usec < samples.back().time_usec)
            throw ValidationError("integration end precedes the last sample");
        for (std::size_t i = 1; i < samples.size(); ++i) {
            Rational dt(samples[i].time_usec - samples[i - 1].time_usec);
            Rational mean = (Rational(samples[i].millicores) + Rational(samples[i - 1].millicores)) /
                            Rational(2);
            total += dt * mean;
        }
        total += Rational(t_end_usec - samples.back().time_usec) *
                 Rational(samples.back().millicores);
    }
    return total / Rational(1000000000); // millicore-usec -> core-seconds
}

Rational resource_efficiency(const Rational& baseline_core_seconds,
                             const Rational& config_core_seconds) {
    if (config_core_seconds <= Rational(0) || baseline_core_seconds <= Rational(0))
        throw ValidationError("core-second totals must be positive");
    return baseline_core_seconds / config_core_seconds;
}

SpeedupReport speedup_and_parallel_efficiency(std::int64_t t_reference_usec,
                                              std::int64_t t_config_usec,
                                              std::int64_t total_alloc_millicores) {
    if (t_reference_usec < 1 || t_config_usec < 1)
        throw ValidationError("wall-clock times must be positive");
    if (total_alloc_millicores < 1) throw ValidationError("allocation must be positive");
    SpeedupReport r;
    r.speedup = Rational(t_reference_usec) / Rational(t_config_usec);
    r.parallel_efficiency = r.speedup * Rational(1000) / Rational(total_alloc_millicores);
    return r;
}

HeadroomReport packing_headroom(const std::vector<NodeSpec>& nodes,
                                const std::vector<PodPlacement>& pods) {
    if (nodes.empty()) throw ValidationError("no nodes");
    std::vector<std::int64_t> used(nodes.size(), 0);
    for (const auto& p : pods) {
        if (p.node < 0 || static_cast<std::size_t>(p.node) >= nodes.size())
            throw ValidationError("pod placed on unknown node " + std::to_string(p.node));
        if (p.request_millicores < 0) throw ValidationError("negative pod request");
        used[static_cast<std::size_t>(p.node)] += p.request_millicores;
    }
    HeadroomReport report;
    for (std::size_t n = 0; n < nodes.size(); ++n) {
        NodeHeadroom h;
        h.node = static_cast<int>(n);
        h.free_millicores = nodes[n].capacity_millicores - used[n];
        h.overcommitted = h.free_millicores < 0;
        report.cluster_free_millicores += h.free_millicores;
        report.per_node.push_back(h);
    }
    return report;
}

std::vector<std::int64_t> per_rank_freed(const AllocationPlan& baseline,
                                         const AllocationPlan& plan) {
    baseline.validate();
    plan.validate();
    if (baseline.size() != plan.size())
        throw ValidationError("plans cover different rank counts");
    std::vector<std::int64_t> freed(plan.size());
    for (std::size_t i = 0; i < plan.size(); ++i)
        freed[i] = baseline.requests_millicores[i] - plan.requests_millicores[i];
    return freed;
}

std::vector<FreedGroup> freed_by_group(const AllocationPlan& baseline,
                                       const AllocationPlan& plan) {
    auto freed = per_rank_freed(baseline, plan);
    std::map<std::int64_t, FreedGroup> groups;
    for (std::size_t i = 0; i < plan.size(); ++i) {
        auto& g = groups[plan.requests_millicores[i]];
        g.request_millicores = plan.requests_millicores[i];
        g.rank_count += 1;
        g.freed_millicores += freed[i];
    }
    std::vector<FreedGroup> out;
    for (auto& [_, g] : groups) out.push_back(g);
    return out;
}

} // namespace ranksched
