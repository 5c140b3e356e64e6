#include "ranksched/scaling.hpp"

#include <algorithm>
#include <string>

#include "ranksched/errors.hpp"

namespace ranksched {

void PhaseSchedule::validate() const {
    if (t1_usec <= 0 || t2_usec <= t1_usec)
        throw ValidationError("phase boundaries must satisfy 0 < t1 < t2");
    alloc_max.validate();
    alloc_mid.validate();
    alloc_min.validate();
    if (alloc_mid.size() != alloc_max.size() || alloc_min.size() != alloc_max.size())
        throw ValidationError("phase plans must cover the same ranks");
    if (alloc_mid.mode != alloc_max.mode || alloc_min.mode != alloc_max.mode)
        throw ValidationError("phase plans must share one limit mode");
}

const AllocationPlan& phase_allocation(std::int64_t t_usec, const PhaseSchedule& schedule) {
    schedule.validate();
    if (t_usec < schedule.t1_usec) return schedule.alloc_max;
    if (t_usec < schedule.t2_usec) return schedule.alloc_mid;
    return schedule.alloc_min;
}

void PatchPlan::validate() const {
    if (entries.empty()) throw ValidationError("patch plan has no entries");
    std::int64_t prev_time = -1, prev_iter = -1;
    Rational prev_frac(-1);
    for (std::size_t e = 0; e < entries.size(); ++e) {
        const auto& entry = entries[e];
        std::string who = "patch entry " + std::to_string(e);
        if (entry.targets.empty()) throw ValidationError(who + " has no targets");
        if (entry.new_requests_millicores.size() != entry.targets.size())
            throw ValidationError(who + " request list does not match its targets");
        if (entry.new_limits_millicores &&
            entry.new_limits_millicores->size() != entry.targets.size())
            throw ValidationError(who + " limit list does not match its targets");
        for (auto r : entry.new_requests_millicores)
            if (r < 1) throw ValidationError(who + " requests below 1m");
        switch (entry.trigger.kind) {
        case PatchTrigger::Kind::AtTime:
            if (entry.trigger.time_usec < 0) throw ValidationError(who + " has a negative time");
            if (entry.trigger.time_usec <= prev_time)
                throw ValidationError("time triggers must strictly increase");
            prev_time = entry.trigger.time_usec;
            break;
        case PatchTrigger::Kind::AtIteration:
            if (entry.trigger.iteration < 1)
                throw ValidationError(who + " fires before the first iteration");
            if (entry.trigger.iteration <= prev_iter)
                throw ValidationError("iteration triggers must strictly increase");
            prev_iter = entry.trigger.iteration;
            break;
        case PatchTrigger::Kind::AtProgressFraction:
            if (entry.trigger.fraction < Rational(0) || Rational(1) < entry.trigger.fraction)
                throw ValidationError(who + " progress threshold outside [0,1]");
            if (entry.trigger.fraction <= prev_frac)
                throw ValidationError("progress triggers must strictly increase");
            prev_frac = entry.trigger.fraction;
            break;
        }
    }
}

PatchPlan build_patch_plan(const PhaseSchedule& schedule) {
    schedule.validate();
    PatchPlan plan;
    auto entry_for = [](std::int64_t t, const AllocationPlan& alloc) {
        PatchEntry e;
        e.trigger.kind = PatchTrigger::Kind::AtTime;
        e.trigger.time_usec = t;
        e.targets.resize(alloc.size());
        for (std::size_t i = 0; i < alloc.size(); ++i) e.targets[i] = i;
        e.new_requests_millicores = alloc.requests_millicores;
        e.new_limits_millicores = alloc.limits_millicores;
        return e;
    };
    plan.entries.push_back(entry_for(schedule.t1_usec, schedule.alloc_mid));
    plan.entries.push_back(entry_for(schedule.t2_usec, schedule.alloc_min));
    plan.validate();
    return plan;
}

SimResult apply_plan_in_sim(const PatchPlan& plan, const SimScenario& scenario,
                            std::int64_t sync_delay_usec) {
    SimEngine engine(scenario);
    engine.attach_plan(plan, sync_delay_usec);
    return engine.finish();
}

TransitionDecision detect_transition(const ProgressSignal&, const Rational& observed,
                                     const Rational& threshold) {
    return observed >= threshold ? TransitionDecision::Fire : TransitionDecision::Hold;
}

void ProgressTrace::validate() const {
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].second < Rational(0) || Rational(1) < points[i].second)
            throw ValidationError("progress values must lie in [0,1]");
        if (i > 0 && points[i].first <= points[i - 1].first)
            throw ValidationError("progress trace times must strictly increase");
        if (i > 0 && points[i].second < points[i - 1].second)
            throw ValidationError("progress cannot move backwards");
    }
}

Rational ProgressTrace::at(std::int64_t t_usec) const {
    Rational value(0);
    for (const auto& [t, v] : points) {
        if (t > t_usec) break;
        value = v;
    }
    return value;
}

std::optional<std::int64_t> first_fire_time(const ProgressSignal& signal,
                                            const ProgressTrace& trace,
                                            const Rational& threshold,
                                            std::int64_t horizon_usec) {
    trace.validate();
    if (signal.staleness_usec < 0) throw ValidationError("staleness must be non-negative");
    if (detect_transition(signal, trace.at(-signal.staleness_usec), threshold) ==
        TransitionDecision::Fire)
        return 0; // threshold already visible at the start
    for (const auto& [t, v] : trace.points) {
        if (v >= threshold) {
            std::int64_t fire = t + signal.staleness_usec;
            if (fire <= horizon_usec) return fire;
            return std::nullopt;
        }
    }
    return std::nullopt;
}

std::int64_t provisioned_millicore_usec(const PhaseSchedule& schedule, std::int64_t t_end_usec) {
    schedule.validate();
    if (t_end_usec < 0) throw ValidationError("horizon must be non-negative");
    auto clamp = [&](std::int64_t a, std::int64_t b) {
        return std::max<std::int64_t>(0, std::min(b, t_end_usec) - a);
    };
    std::int64_t span_max = std::min(schedule.t1_usec, t_end_usec);
    std::int64_t span_mid = clamp(schedule.t1_usec, schedule.t2_usec);
    std::int64_t span_min = std::max<std::int64_t>(0, t_end_usec - schedule.t2_usec);
    return schedule.alloc_max.budget_millicores * span_max +
           schedule.alloc_mid.budget_millicores * span_mid +
           schedule.alloc_min.budget_millicores * span_min;
}

} // namespace ranksched
