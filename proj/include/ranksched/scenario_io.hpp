#pragma once

#include <string>

#include "ranksched/alloc.hpp"
#include "ranksched/metrics.hpp"
#include "ranksched/scaling.hpp"
#include "ranksched/sim.hpp"

namespace ranksched {

// JSON text <-> core structs. Formats are documented in the README. Numeric
// fields that must stay exact (weights, costs, fractions) travel as integers
// or as "a/b" / decimal strings, never as floating point.

struct ScenarioFile {
    SimScenario scenario;
    std::optional<PatchPlan> patch_plan;
    std::optional<PhaseSchedule> phase_schedule;
    std::int64_t sync_delay_usec = kDefaultSyncDelayUsec;

    // The plan to run with: patch_plan if present, else one derived from
    // phase_schedule, else nothing.
    std::optional<PatchPlan> effective_plan() const;
};

ScenarioFile load_scenario(const std::string& json_text);
std::string save_scenario(const ScenarioFile& file);

std::string save_result(const SimResult& result, const ScenarioFile& origin);
SimResult load_result(const std::string& json_text);

// Summary of the scenario a result came from, embedded in result JSON so
// reports are self-contained.
struct ResultContext {
    std::string mode;
    std::int64_t total_request_millicores = 0;
    std::vector<std::int64_t> requests_millicores;
    std::vector<NodeSpec> nodes;
    std::vector<int> node_of_rank;
};

ResultContext load_result_context(const std::string& json_text);

std::string save_allocation(const AllocationPlan& plan);
AllocationPlan load_allocation(const std::string& json_text);

PhaseSchedule load_phase_schedule(const std::string& json_text);
std::string save_patch_plan(const PatchPlan& plan);
PatchPlan load_patch_plan(const std::string& json_text);

// time_usec,rank,millicores rows for every usage sample of every rank.
std::string timeline_csv(const SimResult& result);

// rank,nr_throttled,throttled_usec,fraction (of wall clock, 6 decimals).
std::string throttle_csv(const SimResult& result);

// Operator commands (kubectl patch ... --subresource resize) for a plan.
// Documentation artifact; never executed here.
std::string patch_script(const PatchPlan& plan, const std::vector<std::string>& pod_names);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace ranksched
