// Python face of the toolkit. Structured values cross as plain dicts and
// lists; anything that must stay exact (weights, fractions, core-seconds)
// crosses as fractions.Fraction or as the JSON text formats, never as
// floating point.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <vector>

#include "ranksched/artifacts.hpp"
#include "ranksched/cgroup.hpp"
#include "ranksched/errors.hpp"
#include "ranksched/metrics.hpp"
#include "ranksched/scaling.hpp"
#include "ranksched/scenario_io.hpp"
#include "ranksched/sim.hpp"

namespace py = pybind11;
using namespace ranksched;

namespace {

Rational rational_from_py(const py::handle& v) {
    if (py::isinstance<py::int_>(v)) return Rational(v.cast<std::int64_t>());
    if (py::isinstance<py::str>(v)) return Rational::parse(v.cast<std::string>());
    if (py::hasattr(v, "numerator") && py::hasattr(v, "denominator"))
        return Rational(v.attr("numerator").cast<std::int64_t>(),
                        v.attr("denominator").cast<std::int64_t>());
    throw py::type_error("expected int, 'a/b' / decimal string, or Fraction, got " +
                         std::string(py::str(py::type::of(v))));
}

py::object to_fraction(const Rational& r) {
    static py::object ctor = py::module_::import("fractions").attr("Fraction");
    return ctor(r.num(), r.den());
}

WeightVector weights_from_py(const py::sequence& seq) {
    WeightVector w;
    for (const auto& item : seq) w.weights.push_back(rational_from_py(item));
    return w;
}

py::dict plan_to_dict(const AllocationPlan& plan) {
    py::dict d;
    d["mode"] = plan.mode == LimitMode::HardLimits ? "hard_limits" : "requests_only";
    d["budget_millicores"] = plan.budget_millicores;
    d["requests_millicores"] = plan.requests_millicores;
    d["limits_millicores"] =
        plan.limits_millicores ? py::cast(*plan.limits_millicores) : py::none();
    py::list fr;
    for (const auto& f : plan.fractions) fr.append(to_fraction(f));
    d["fractions"] = fr;
    return d;
}

AllocationPlan plan_from_dict(const py::dict& d) {
    AllocationPlan plan;
    std::string mode = d["mode"].cast<std::string>();
    if (mode == "hard_limits")
        plan.mode = LimitMode::HardLimits;
    else if (mode == "requests_only")
        plan.mode = LimitMode::RequestsOnly;
    else
        throw ValidationError("mode must be hard_limits or requests_only, got " + mode);
    plan.requests_millicores = d["requests_millicores"].cast<std::vector<std::int64_t>>();
    if (d.contains("budget_millicores")) {
        plan.budget_millicores = d["budget_millicores"].cast<std::int64_t>();
    } else {
        for (auto r : plan.requests_millicores) plan.budget_millicores += r;
    }
    if (d.contains("limits_millicores") && !d["limits_millicores"].is_none())
        plan.limits_millicores = d["limits_millicores"].cast<std::vector<std::int64_t>>();
    else if (plan.mode == LimitMode::HardLimits)
        plan.limits_millicores = plan.requests_millicores;
    if (d.contains("fractions") && !d["fractions"].is_none()) {
        for (const auto& f : d["fractions"]) plan.fractions.push_back(rational_from_py(f));
    } else {
        for (auto r : plan.requests_millicores)
            plan.fractions.emplace_back(r, plan.budget_millicores);
    }
    plan.validate();
    return plan;
}

std::string run_scenario_text(const std::string& json_text) {
    ScenarioFile file = load_scenario(json_text);
    auto plan = file.effective_plan();
    SimResult res = plan ? apply_plan_in_sim(*plan, file.scenario, file.sync_delay_usec)
                         : simulate(file.scenario);
    return save_result(res, file);
}

} // namespace

PYBIND11_MODULE(_ranksched, m) {
    m.doc() = "Load-proportional CPU allocation and CFS bandwidth simulation for "
              "barrier-synchronized MPI ranks";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<SimulationError>(m, "SimulationError", PyExc_RuntimeError);

    m.def(
        "allocate_cpu",
        [](const py::sequence& weights, std::int64_t budget_millicores, bool hard_limits) {
            return plan_to_dict(allocate_cpu(
                weights_from_py(weights), budget_millicores,
                hard_limits ? LimitMode::HardLimits : LimitMode::RequestsOnly));
        },
        py::arg("weights"), py::arg("budget_millicores"), py::arg("hard_limits") = false,
        "Split a millicore budget across ranks proportionally to the weights.\n"
        "Requests sum to the budget exactly; ties go to the lowest rank.");

    m.def(
        "cell_fractions",
        [](const py::sequence& weights) {
            py::list out;
            for (const auto& f : cell_fractions(weights_from_py(weights)))
                out.append(to_fraction(f));
            return out;
        },
        py::arg("weights"), "Exact load fractions w_i / sum(w); they sum to exactly 1.");

    m.def(
        "apportion_cells",
        [](const py::sequence& weights, std::int64_t total_cells) {
            return apportion_cells(weights_from_py(weights), total_cells).cells_per_rank;
        },
        py::arg("weights"), py::arg("total_cells"),
        "Largest-remainder split of a cell count; outputs sum to the total exactly.");

    m.def("quota_for_limit", &quota_for_limit, py::arg("limit_millicores"),
          py::arg("period_usec") = kDefaultPeriodUsec,
          "CFS quota in microseconds for a millicore limit: limit * period / 1000.\n"
          "Raises ValidationError when the division is not exact.");

    m.def(
        "fair_share",
        [](std::int64_t available_millicores, const std::vector<std::int64_t>& weights,
           std::int64_t cap_millicores) {
            return fair_share(available_millicores, weights, cap_millicores);
        },
        py::arg("available_millicores"), py::arg("weights"), py::arg("cap_millicores") = 1000,
        "Weighted max-min share of a node among runnable ranks, each capped.");

    m.def(
        "throttle_oracle",
        [](std::int64_t quota_usec, std::int64_t period_usec, std::int64_t demand_millicores,
           std::int64_t horizon_usec) {
            auto w = step_period_oracle(quota_usec, period_usec, demand_millicores,
                                        horizon_usec);
            py::dict d;
            d["run_usec"] = w.run_usec;
            d["throttled_usec"] = w.throttled_usec;
            d["nr_throttled"] = w.nr_throttled;
            return d;
        },
        py::arg("quota_usec"), py::arg("period_usec"), py::arg("demand_millicores"),
        py::arg("horizon_usec"),
        "Period-by-period reference walk of one cgroup under constant demand.");

    m.def("simulate", &run_scenario_text, py::arg("scenario_json"),
          "Run a scenario document (same JSON schema as the CLI) and return the\n"
          "result document as JSON text. A patch plan or phase schedule in the\n"
          "document is applied during the run.");

    m.def(
        "plan_from_schedule",
        [](const std::string& schedule_json) {
            return save_patch_plan(build_patch_plan(load_phase_schedule(schedule_json)));
        },
        py::arg("schedule_json"),
        "Turn a three-phase schedule document into a two-entry patch plan document.");

    m.def(
        "patch_script",
        [](const std::string& plan_json, const std::vector<std::string>& pod_names) {
            return patch_script(load_patch_plan(plan_json), pod_names);
        },
        py::arg("plan_json"), py::arg("pod_names"),
        "kubectl commands (documentation artifact) for a patch plan document.");

    m.def(
        "cpu_core_seconds",
        [](const std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>>& series,
           std::int64_t t_end_usec) {
            std::vector<std::vector<UsageSample>> s;
            for (const auto& rank : series) {
                std::vector<UsageSample> r;
                for (const auto& [t, mc] : rank) r.push_back({t, mc});
                s.push_back(std::move(r));
            }
            return to_fraction(cpu_core_seconds(s, t_end_usec));
        },
        py::arg("series"), py::arg("t_end_usec"),
        "Exact trapezoidal core-seconds over per-rank (time_usec, millicores)\n"
        "samples, summed across ranks.");

    m.def(
        "resource_efficiency",
        [](const py::handle& baseline, const py::handle& config) {
            return to_fraction(
                resource_efficiency(rational_from_py(baseline), rational_from_py(config)));
        },
        py::arg("baseline_core_seconds"), py::arg("config_core_seconds"),
        "baseline / config; above 1 means the configuration consumed less.");

    m.def(
        "speedup",
        [](std::int64_t t_reference_usec, std::int64_t t_config_usec,
           std::int64_t total_alloc_millicores) {
            auto r = speedup_and_parallel_efficiency(t_reference_usec, t_config_usec,
                                                     total_alloc_millicores);
            py::dict d;
            d["speedup"] = to_fraction(r.speedup);
            d["parallel_efficiency"] = to_fraction(r.parallel_efficiency);
            return d;
        },
        py::arg("t_reference_usec"), py::arg("t_config_usec"),
        py::arg("total_alloc_millicores"));

    m.def(
        "packing_headroom",
        [](const std::vector<std::pair<std::int64_t, std::int64_t>>& nodes,
           const std::vector<std::pair<int, std::int64_t>>& pods) {
            std::vector<NodeSpec> ns;
            for (const auto& [cap, bg] : nodes) ns.push_back({cap, bg});
            std::vector<PodPlacement> ps;
            for (const auto& [node, req] : pods) ps.push_back({node, req});
            auto rep = packing_headroom(ns, ps);
            py::list per_node;
            for (const auto& n : rep.per_node) {
                py::dict d;
                d["node"] = n.node;
                d["free_millicores"] = n.free_millicores;
                d["overcommitted"] = n.overcommitted;
                per_node.append(d);
            }
            py::dict d;
            d["per_node"] = per_node;
            d["cluster_free_millicores"] = rep.cluster_free_millicores;
            return d;
        },
        py::arg("nodes"), py::arg("pods"),
        "Free millicores per node and cluster-wide; nodes are (capacity,\n"
        "background) pairs, pods are (node, request) pairs.");

    m.def("format_millicores", &format_millicores, py::arg("millicores"));
    m.def("parse_millicores", &parse_millicores, py::arg("text"));

    m.def(
        "emit_manifest",
        [](const py::dict& plan, const std::vector<std::string>& pod_names) {
            return emit_manifest(plan_from_dict(plan), pod_names);
        },
        py::arg("plan"), py::arg("pod_names"),
        "Multi-document pod manifest (requests, limits, resizePolicy) for a plan.");

    m.def(
        "parse_manifest",
        [](const std::string& text) {
            auto parsed = parse_manifest(text);
            py::dict d;
            d["plan"] = plan_to_dict(parsed.plan);
            d["pod_names"] = parsed.pod_names;
            return d;
        },
        py::arg("text"));

    m.def(
        "emit_processor_weights",
        [](const py::sequence& weights) {
            return emit_processor_weights(weights_from_py(weights));
        },
        py::arg("weights"),
        "decomposeParDict processorWeights fragment; smallest integer ratios.");

    m.def(
        "emit_decomposition_report",
        [](const std::vector<std::int64_t>& cells_per_rank) {
            DecompositionReport rep;
            rep.cells_per_rank = cells_per_rank;
            for (auto c : cells_per_rank) rep.total_cells += c;
            return emit_decomposition_report(rep);
        },
        py::arg("cells_per_rank"), "rank,cells CSV.");

    m.def(
        "ingest_decomposition_report",
        [](const std::string& csv_text) {
            auto ing = ingest_decomposition_report(csv_text);
            py::dict d;
            d["cells_per_rank"] = ing.report.cells_per_rank;
            d["total_cells"] = ing.report.total_cells;
            py::list w;
            for (const auto& f : ing.weights.weights) w.append(to_fraction(f));
            d["weights"] = w;
            return d;
        },
        py::arg("csv_text"),
        "Cells per rank plus derived weights (cells over their gcd).");

    m.attr("DEFAULT_PERIOD_USEC") = kDefaultPeriodUsec;
    m.attr("DEFAULT_SYNC_DELAY_USEC") = kDefaultSyncDelayUsec;
    m.attr("__version__") = "0.1.0";
}
