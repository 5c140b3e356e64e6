// ranksched: plan, simulate and report rank-aware CPU scheduling.
//
// Subcommands: allocate, simulate, plan, report, emit. Exit codes: 0 ok,
// 2 validation error, 3 simulation error. All output is deterministic for
// a given set of inputs.

#include <algorithm>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ranksched/alloc.hpp"
#include "ranksched/artifacts.hpp"
#include "ranksched/errors.hpp"
#include "ranksched/metrics.hpp"
#include "ranksched/scaling.hpp"
#include "ranksched/scenario_io.hpp"
#include "ranksched/sim.hpp"

using namespace ranksched;

namespace {

WeightVector parse_weights(const std::string& csv) {
    WeightVector w;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) throw ValidationError("empty weight in list '" + csv + "'");
        w.weights.push_back(Rational::parse(tok));
    }
    w.validate();
    return w;
}

std::int64_t parse_budget(std::string text) {
    if (!text.empty() && text.back() == 'm') text.pop_back();
    if (text.empty()) throw ValidationError("empty budget");
    for (char c : text)
        if (c < '0' || c > '9') throw ValidationError("budget must be millicores, got '" + text + "'");
    return std::stoll(text);
}

std::vector<std::string> pod_names(const std::string& prefix, std::size_t n) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back(prefix + "-" + std::to_string(i));
    return names;
}

std::string file_stem(const std::string& path) {
    auto slash = path.find_last_of('/');
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    auto dot = base.find_last_of('.');
    return dot == std::string::npos ? base : base.substr(0, dot);
}

// ---------------------------------------------------------------- allocate

struct AllocateArgs {
    std::string weights_csv;
    std::string report_path;
    std::string budget_text;
    std::int64_t cells = 0;
    std::string mode = "requests-only";
    std::string out_path;
    std::string manifest_path;
    std::string fragment_path;
    std::string cells_report_path;
    std::string pod_prefix = "rank";
    bool quiet = false;
};

int cmd_allocate(const AllocateArgs& a) {
    if (a.weights_csv.empty() == a.report_path.empty())
        throw ValidationError("give exactly one of --weights or --report");
    WeightVector weights = a.weights_csv.empty()
                               ? ingest_decomposition_report(read_file(a.report_path)).weights
                               : parse_weights(a.weights_csv);
    const LimitMode mode =
        a.mode == "hard-limits" ? LimitMode::HardLimits : LimitMode::RequestsOnly;

    std::optional<AllocationPlan> plan;
    if (!a.budget_text.empty()) plan = allocate_cpu(weights, parse_budget(a.budget_text), mode);

    std::optional<CellApportionment> cells;
    if (a.cells > 0) cells = apportion_cells(weights, a.cells);
    if (!plan && !cells) throw ValidationError("nothing to do: give --budget and/or --cells");

    if (!a.quiet) {
        auto fractions = cell_fractions(weights);
        std::cout << "rank weight fraction";
        if (plan) std::cout << " request";
        if (plan && plan->limits_millicores) std::cout << " limit";
        if (cells) std::cout << " cells";
        std::cout << "\n";
        for (std::size_t i = 0; i < weights.size(); ++i) {
            std::cout << i << " " << weights.weights[i].str() << " " << fractions[i].str();
            if (plan) std::cout << " " << plan->requests_millicores[i] << "m";
            if (plan && plan->limits_millicores)
                std::cout << " " << (*plan->limits_millicores)[i] << "m";
            if (cells) std::cout << " " << cells->cells_per_rank[i];
            std::cout << "\n";
        }
        std::cout << "total - 1";
        if (plan) std::cout << " " << plan->budget_millicores << "m";
        if (plan && plan->limits_millicores) std::cout << " " << plan->budget_millicores << "m";
        if (cells) std::cout << " " << cells->total_cells;
        std::cout << "\n";
    }

    if (!a.out_path.empty()) {
        if (!plan) throw ValidationError("--out needs --budget");
        write_file(a.out_path, save_allocation(*plan));
    }
    if (!a.manifest_path.empty()) {
        if (!plan) throw ValidationError("--manifest needs --budget");
        write_file(a.manifest_path, emit_manifest(*plan, pod_names(a.pod_prefix, plan->size())));
    }
    if (!a.fragment_path.empty()) write_file(a.fragment_path, emit_processor_weights(weights));
    if (!a.cells_report_path.empty()) {
        if (!cells) throw ValidationError("--cells-report needs --cells");
        DecompositionReport rep;
        rep.cells_per_rank = cells->cells_per_rank;
        rep.total_cells = cells->total_cells;
        write_file(a.cells_report_path, emit_decomposition_report(rep));
    }
    return 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::vector<std::string> inputs;
    std::string out_path;
    std::string out_dir;
    std::string timeline_path;
    std::string throttle_path;
    std::optional<std::int64_t> sync_delay;
    unsigned jobs = 1;
};

SimResult run_scenario_file(const ScenarioFile& f, std::optional<std::int64_t> sync_override) {
    auto plan = f.effective_plan();
    if (!plan) return simulate(f.scenario);
    return apply_plan_in_sim(*plan, f.scenario,
                             sync_override.value_or(f.sync_delay_usec));
}

int cmd_simulate(const SimulateArgs& a) {
    if (a.inputs.empty()) throw ValidationError("no scenario files given");
    if (a.inputs.size() > 1 && (!a.out_path.empty() || !a.timeline_path.empty() ||
                                !a.throttle_path.empty()))
        throw ValidationError("--out/--timeline/--throttle take a single scenario; "
                              "use --out-dir for batches");

    std::vector<ScenarioFile> files;
    for (const auto& path : a.inputs) files.push_back(load_scenario(read_file(path)));

    std::vector<SimResult> results(files.size());
    if (a.jobs <= 1 || files.size() == 1) {
        for (std::size_t i = 0; i < files.size(); ++i)
            results[i] = run_scenario_file(files[i], a.sync_delay);
    } else {
        // Scenario runs are independent; parallelize across files only.
        std::vector<std::future<SimResult>> futs;
        for (std::size_t i = 0; i < files.size(); ++i)
            futs.push_back(std::async(std::launch::async, [&, i] {
                return run_scenario_file(files[i], a.sync_delay);
            }));
        for (std::size_t i = 0; i < files.size(); ++i) results[i] = futs[i].get();
    }

    for (std::size_t i = 0; i < files.size(); ++i) {
        const auto& r = results[i];
        std::int64_t nr = 0, thr = 0;
        for (const auto& st : r.ranks) {
            nr += st.nr_throttled;
            thr += st.throttled_usec;
        }
        std::cout << a.inputs[i] << ": wall_usec=" << r.wall_clock_usec
                  << " iterations=" << r.iterations_completed << " nr_throttled=" << nr
                  << " throttled_usec=" << thr << " resizes=" << r.resize_events.size() << "\n";
        if (!a.out_path.empty()) write_file(a.out_path, save_result(r, files[i]));
        if (!a.out_dir.empty())
            write_file(a.out_dir + "/" + file_stem(a.inputs[i]) + ".result.json",
                       save_result(r, files[i]));
        if (!a.timeline_path.empty()) write_file(a.timeline_path, timeline_csv(r));
        if (!a.throttle_path.empty()) write_file(a.throttle_path, throttle_csv(r));
    }
    return 0;
}

// -------------------------------------------------------------------- plan

struct PlanArgs {
    std::string schedule_path;
    std::string scenario_path;
    std::string out_path;
    std::string script_path;
    std::string pod_prefix = "rank";
};

int cmd_plan(const PlanArgs& a) {
    if (a.schedule_path.empty() == a.scenario_path.empty())
        throw ValidationError("give exactly one of --schedule or --scenario");

    std::optional<PatchPlan> plan;
    if (!a.schedule_path.empty()) {
        plan = build_patch_plan(load_phase_schedule(read_file(a.schedule_path)));
    } else {
        plan = load_scenario(read_file(a.scenario_path)).effective_plan();
        if (!plan)
            throw ValidationError("scenario file carries no patch plan or phase schedule");
    }

    std::size_t max_rank = 0;
    for (const auto& e : plan->entries)
        for (auto t : e.targets) max_rank = std::max(max_rank, t);

    if (!a.out_path.empty()) write_file(a.out_path, save_patch_plan(*plan));
    if (!a.script_path.empty())
        write_file(a.script_path, patch_script(*plan, pod_names(a.pod_prefix, max_rank + 1)));
    std::cout << "entries=" << plan->entries.size() << " ranks=" << max_rank + 1 << "\n";
    return 0;
}

// ------------------------------------------------------------------ report

struct ReportArgs {
    std::vector<std::string> inputs; // first file is the baseline
    std::string csv_path;
};

struct ReportRow {
    std::string name;
    std::int64_t wall_usec = 0;
    std::int64_t iterations = 0;
    Rational core_seconds{0};
    Rational max_throttle_fraction{0};
    Rational eta{0};
    Rational speedup{0};
    Rational parallel_efficiency{0};
    std::int64_t free_millicores = 0;
};

ReportRow summarize(const std::string& path) {
    const std::string text = read_file(path);
    const SimResult r = load_result(text);
    const ResultContext ctx = load_result_context(text);

    ReportRow row;
    row.name = path;
    row.wall_usec = r.wall_clock_usec;
    row.iterations = r.iterations_completed;

    std::int64_t cpu = 0;
    for (const auto& st : r.ranks) {
        cpu += st.cpu_millicore_usec;
        if (r.wall_clock_usec > 0) {
            Rational f(st.throttled_usec, r.wall_clock_usec);
            if (f > row.max_throttle_fraction) row.max_throttle_fraction = f;
        }
    }
    row.core_seconds = Rational(cpu, 1000000000);

    std::vector<PodPlacement> pods;
    for (std::size_t i = 0; i < ctx.requests_millicores.size(); ++i)
        pods.push_back({ctx.node_of_rank[i], ctx.requests_millicores[i]});
    row.free_millicores = packing_headroom(ctx.nodes, pods).cluster_free_millicores;
    return row;
}

int cmd_report(const ReportArgs& a) {
    if (a.inputs.size() < 1) throw ValidationError("need at least a baseline result");
    std::vector<ReportRow> rows;
    std::vector<std::int64_t> alloc;
    for (const auto& path : a.inputs) {
        rows.push_back(summarize(path));
        alloc.push_back(load_result_context(read_file(path)).total_request_millicores);
    }
    const ReportRow& base = rows[0];
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].eta = resource_efficiency(base.core_seconds, rows[i].core_seconds);
        auto rep = speedup_and_parallel_efficiency(base.wall_usec, rows[i].wall_usec, alloc[i]);
        rows[i].speedup = rep.speedup;
        rows[i].parallel_efficiency = rep.parallel_efficiency;
    }

    std::ostringstream out;
    out << "name,wall_s,iterations,core_s,max_throttle_frac,eta,speedup,parallel_eff,"
           "free_millicores\n";
    for (const auto& r : rows)
        out << r.name << ',' << Rational(r.wall_usec, 1000000).decimal(3) << ',' << r.iterations
            << ',' << r.core_seconds.decimal(3) << ',' << r.max_throttle_fraction.decimal(6)
            << ',' << r.eta.decimal(4) << ',' << r.speedup.decimal(4) << ','
            << r.parallel_efficiency.decimal(4) << ',' << r.free_millicores << '\n';

    std::cout << out.str();
    if (!a.csv_path.empty()) write_file(a.csv_path, out.str());
    return 0;
}

// -------------------------------------------------------------------- emit

struct EmitArgs {
    std::string allocation_path;
    std::string plan_path;
    std::string manifest_path;
    std::string fragment_path;
    std::string script_path;
    std::string pod_prefix = "rank";
};

int cmd_emit(const EmitArgs& a) {
    bool did = false;
    if (!a.manifest_path.empty() || !a.fragment_path.empty()) {
        if (a.allocation_path.empty())
            throw ValidationError("--manifest/--weights-fragment need --allocation");
        auto plan = load_allocation(read_file(a.allocation_path));
        if (!a.manifest_path.empty()) {
            write_file(a.manifest_path,
                       emit_manifest(plan, pod_names(a.pod_prefix, plan.size())));
            did = true;
        }
        if (!a.fragment_path.empty()) {
            WeightVector w;
            w.weights = plan.fractions;
            write_file(a.fragment_path, emit_processor_weights(w));
            did = true;
        }
    }
    if (!a.script_path.empty()) {
        if (a.plan_path.empty()) throw ValidationError("--script needs --plan");
        auto plan = load_patch_plan(read_file(a.plan_path));
        std::size_t max_rank = 0;
        for (const auto& e : plan.entries)
            for (auto t : e.targets) max_rank = std::max(max_rank, t);
        write_file(a.script_path, patch_script(plan, pod_names(a.pod_prefix, max_rank + 1)));
        did = true;
    }
    if (!did) throw ValidationError("nothing to emit; see --help");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rank-aware CPU allocation, bandwidth-limit simulation and resize planning"};
    app.require_subcommand(1);

    AllocateArgs alloc_args;
    auto* alloc_cmd = app.add_subcommand(
        "allocate", "Split a millicore budget or cell count across ranks by load weight");
    alloc_cmd->add_option("-w,--weights", alloc_args.weights_csv,
                          "comma-separated rank weights (integers or rationals)");
    alloc_cmd->add_option("-r,--report", alloc_args.report_path,
                          "derive weights from a rank,cells decomposition report");
    alloc_cmd->add_option("-C,--budget", alloc_args.budget_text,
                          "total CPU budget in millicores, e.g. 4000 or 4000m");
    alloc_cmd->add_option("--cells", alloc_args.cells, "total cell count to apportion");
    alloc_cmd->add_option("--mode", alloc_args.mode, "hard-limits or requests-only")
        ->check(CLI::IsMember({"hard-limits", "requests-only"}));
    alloc_cmd->add_option("-o,--out", alloc_args.out_path, "write allocation JSON here");
    alloc_cmd->add_option("--manifest", alloc_args.manifest_path, "write pod manifests here");
    alloc_cmd->add_option("--weights-fragment", alloc_args.fragment_path,
                          "write a processorWeights fragment here");
    alloc_cmd->add_option("--cells-report", alloc_args.cells_report_path,
                          "write the cell apportionment as a rank,cells report");
    alloc_cmd->add_option("--pod-prefix", alloc_args.pod_prefix, "pod name prefix");
    alloc_cmd->add_flag("-q,--quiet", alloc_args.quiet, "suppress the table");

    SimulateArgs sim_args;
    std::int64_t sync_delay_flag = -1;
    auto* sim_cmd = app.add_subcommand("simulate", "Run scenario files through the simulator");
    sim_cmd->add_option("files", sim_args.inputs, "scenario JSON files")->required();
    sim_cmd->add_option("-o,--out", sim_args.out_path, "write the result JSON here");
    sim_cmd->add_option("--out-dir", sim_args.out_dir,
                        "write <name>.result.json here for every input");
    sim_cmd->add_option("--timeline", sim_args.timeline_path, "write the usage timeline CSV");
    sim_cmd->add_option("--throttle", sim_args.throttle_path, "write the throttle CSV");
    sim_cmd->add_option("--sync-delay", sync_delay_flag,
                        "override the scenario's resize sync delay (usec)");
    sim_cmd->add_option("-j,--jobs", sim_args.jobs, "simulate this many files in parallel");

    PlanArgs plan_args;
    auto* plan_cmd = app.add_subcommand("plan", "Build or extract a resize patch plan");
    plan_cmd->add_option("--schedule", plan_args.schedule_path, "phase schedule JSON");
    plan_cmd->add_option("--scenario", plan_args.scenario_path,
                         "scenario file whose plan/schedule to use");
    plan_cmd->add_option("-o,--out", plan_args.out_path, "write the patch plan JSON here");
    plan_cmd->add_option("--script", plan_args.script_path,
                         "write operator resize commands here");
    plan_cmd->add_option("--pod-prefix", plan_args.pod_prefix, "pod name prefix");

    ReportArgs report_args;
    auto* report_cmd =
        app.add_subcommand("report", "Compare result files against the first (baseline)");
    report_cmd->add_option("results", report_args.inputs, "result JSON files")->required();
    report_cmd->add_option("--csv", report_args.csv_path, "also write the table here");

    EmitArgs emit_args;
    auto* emit_cmd = app.add_subcommand("emit", "Render artifacts from saved JSON documents");
    emit_cmd->add_option("--allocation", emit_args.allocation_path, "allocation JSON");
    emit_cmd->add_option("--plan", emit_args.plan_path, "patch plan JSON");
    emit_cmd->add_option("--manifest", emit_args.manifest_path, "write pod manifests here");
    emit_cmd->add_option("--weights-fragment", emit_args.fragment_path,
                         "write a processorWeights fragment here");
    emit_cmd->add_option("--script", emit_args.script_path, "write resize commands here");
    emit_cmd->add_option("--pod-prefix", emit_args.pod_prefix, "pod name prefix");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*alloc_cmd) return cmd_allocate(alloc_args);
        if (*sim_cmd) {
            if (sync_delay_flag >= 0) sim_args.sync_delay = sync_delay_flag;
            return cmd_simulate(sim_args);
        }
        if (*plan_cmd) return cmd_plan(plan_args);
        if (*report_cmd) return cmd_report(report_args);
        if (*emit_cmd) return cmd_emit(emit_args);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const SimulationError& e) {
        std::cerr << "simulation error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
