#include "ranksched/scenario_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ranksched/errors.hpp"

namespace ranksched {

using nlohmann::json;

namespace {

Rational rational_from_json(const json& j, const char* what) {
    try {
        if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
        if (j.is_string()) return Rational::parse(j.get<std::string>());
    } catch (const std::exception& e) {
        throw BadScenario(std::string(what) + ": " + e.what());
    }
    throw BadScenario(std::string(what) + ": expected integer or rational string");
}

json rational_to_json(const Rational& r) {
    if (r.is_integer()) return json(r.num());
    return json(r.str());
}

std::int64_t require_int(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number_integer())
        throw BadScenario(std::string("missing or non-integer field: ") + key);
    return j.at(key).get<std::int64_t>();
}

std::int64_t int_or(const json& j, const char* key, std::int64_t fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer())
        throw BadScenario(std::string("non-integer field: ") + key);
    return j.at(key).get<std::int64_t>();
}

SimScenario::Mode mode_from_string(const std::string& s) {
    if (s == "hard_limits") return SimScenario::Mode::HardLimits;
    if (s == "requests_only") return SimScenario::Mode::RequestsOnly;
    throw BadScenario("unknown mode: " + s + " (want hard_limits or requests_only)");
}

std::string mode_to_string(SimScenario::Mode m) {
    return m == SimScenario::Mode::HardLimits ? "hard_limits" : "requests_only";
}

json trigger_to_json(const PatchTrigger& t) {
    json j;
    switch (t.kind) {
    case PatchTrigger::Kind::AtTime:
        j["at_time_usec"] = t.time_usec;
        break;
    case PatchTrigger::Kind::AtIteration:
        j["at_iteration"] = t.iteration;
        break;
    case PatchTrigger::Kind::AtProgressFraction:
        j["at_progress_fraction"] = t.fraction.str();
        break;
    }
    return j;
}

PatchTrigger trigger_from_json(const json& j) {
    const int present = int(j.contains("at_time_usec")) + int(j.contains("at_iteration")) +
                        int(j.contains("at_progress_fraction"));
    if (present != 1)
        throw BadScenario("patch entry needs exactly one of at_time_usec, at_iteration, "
                          "at_progress_fraction");
    PatchTrigger t;
    if (j.contains("at_time_usec")) {
        t.kind = PatchTrigger::Kind::AtTime;
        t.time_usec = require_int(j, "at_time_usec");
    } else if (j.contains("at_iteration")) {
        t.kind = PatchTrigger::Kind::AtIteration;
        t.iteration = require_int(j, "at_iteration");
    } else {
        t.kind = PatchTrigger::Kind::AtProgressFraction;
        t.fraction = rational_from_json(j.at("at_progress_fraction"), "at_progress_fraction");
    }
    return t;
}

json entry_to_json(const PatchEntry& e) {
    json j = trigger_to_json(e.trigger);
    j["targets"] = e.targets;
    j["new_requests_millicores"] = e.new_requests_millicores;
    if (e.new_limits_millicores) j["new_limits_millicores"] = *e.new_limits_millicores;
    return j;
}

PatchEntry entry_from_json(const json& j) {
    PatchEntry e;
    e.trigger = trigger_from_json(j);
    if (!j.contains("targets") || !j.at("targets").is_array())
        throw BadScenario("patch entry: targets must be an array of rank indices");
    e.targets = j.at("targets").get<std::vector<std::size_t>>();
    if (!j.contains("new_requests_millicores"))
        throw BadScenario("patch entry: missing new_requests_millicores");
    e.new_requests_millicores = j.at("new_requests_millicores").get<std::vector<std::int64_t>>();
    if (j.contains("new_limits_millicores"))
        e.new_limits_millicores = j.at("new_limits_millicores").get<std::vector<std::int64_t>>();
    return e;
}

json plan_to_json(const PatchPlan& p) {
    json arr = json::array();
    for (const auto& e : p.entries) arr.push_back(entry_to_json(e));
    return json{{"entries", std::move(arr)}};
}

PatchPlan plan_from_json(const json& j) {
    PatchPlan p;
    if (!j.contains("entries") || !j.at("entries").is_array())
        throw BadScenario("patch plan: missing entries array");
    for (const auto& je : j.at("entries")) p.entries.push_back(entry_from_json(je));
    p.validate();
    return p;
}

json scenario_to_json(const SimScenario& s) {
    json j;
    j["mode"] = mode_to_string(s.mode);
    j["iterations"] = s.iterations;
    j["barrier_latency_usec"] = s.barrier_latency_usec;
    j["sample_interval_usec"] = s.sample_interval_usec;
    if (s.busy_wait_barriers) j["busy_wait_barriers"] = true;
    json nodes = json::array();
    for (const auto& n : s.nodes)
        nodes.push_back({{"capacity_millicores", n.capacity_millicores},
                         {"background_load_millicores", n.background_load_millicores}});
    j["nodes"] = std::move(nodes);
    json ranks = json::array();
    for (const auto& r : s.ranks) {
        json jr;
        jr["cells"] = r.cells;
        jr["cost_per_cell_usec"] = rational_to_json(r.cost_per_cell_usec);
        jr["comm_rounds_per_iter"] = r.comm_rounds_per_iter;
        jr["node"] = r.node;
        jr["cpu_weight_millicores"] = r.cgroup.cpu_weight;
        if (r.cgroup.quota_usec) {
            jr["quota_usec"] = *r.cgroup.quota_usec;
            jr["period_usec"] = r.cgroup.period_usec;
        }
        ranks.push_back(std::move(jr));
    }
    j["ranks"] = std::move(ranks);
    return j;
}

SimScenario scenario_from_json(const json& j) {
    SimScenario s;
    if (!j.contains("mode") || !j.at("mode").is_string())
        throw BadScenario("missing mode");
    s.mode = mode_from_string(j.at("mode").get<std::string>());
    s.iterations = require_int(j, "iterations");
    s.barrier_latency_usec = int_or(j, "barrier_latency_usec", 0);
    s.sample_interval_usec = int_or(j, "sample_interval_usec", 5000000);
    if (j.contains("busy_wait_barriers")) {
        if (!j.at("busy_wait_barriers").is_boolean())
            throw BadScenario("busy_wait_barriers must be a boolean");
        s.busy_wait_barriers = j.at("busy_wait_barriers").get<bool>();
    }
    if (!j.contains("nodes") || !j.at("nodes").is_array() || j.at("nodes").empty())
        throw BadScenario("missing nodes array");
    for (const auto& jn : j.at("nodes")) {
        NodeSpec n;
        n.capacity_millicores = require_int(jn, "capacity_millicores");
        n.background_load_millicores = int_or(jn, "background_load_millicores", 0);
        s.nodes.push_back(n);
    }
    if (!j.contains("ranks") || !j.at("ranks").is_array() || j.at("ranks").empty())
        throw BadScenario("missing ranks array");
    for (const auto& jr : j.at("ranks")) {
        RankProfile r;
        r.cells = require_int(jr, "cells");
        if (!jr.contains("cost_per_cell_usec"))
            throw BadScenario("rank: missing cost_per_cell_usec");
        r.cost_per_cell_usec = rational_from_json(jr.at("cost_per_cell_usec"), "cost_per_cell_usec");
        r.comm_rounds_per_iter = int_or(jr, "comm_rounds_per_iter", 4);
        r.node = static_cast<int>(int_or(jr, "node", 0));
        r.cgroup.cpu_weight = require_int(jr, "cpu_weight_millicores");
        if (jr.contains("quota_usec")) {
            r.cgroup.quota_usec = require_int(jr, "quota_usec");
            r.cgroup.period_usec = int_or(jr, "period_usec", kDefaultPeriodUsec);
        }
        s.ranks.push_back(std::move(r));
    }
    s.validate();
    return s;
}

json phase_schedule_to_json(const PhaseSchedule& ps) {
    auto alloc = [](const AllocationPlan& p) {
        json a;
        a["mode"] = p.mode == LimitMode::HardLimits ? "hard_limits" : "requests_only";
        a["budget_millicores"] = p.budget_millicores;
        a["requests_millicores"] = p.requests_millicores;
        if (p.limits_millicores) a["limits_millicores"] = *p.limits_millicores;
        json fr = json::array();
        for (const auto& f : p.fractions) fr.push_back(f.str());
        a["fractions"] = std::move(fr);
        return a;
    };
    json j;
    j["t1_usec"] = ps.t1_usec;
    j["t2_usec"] = ps.t2_usec;
    j["alloc_max"] = alloc(ps.alloc_max);
    j["alloc_mid"] = alloc(ps.alloc_mid);
    j["alloc_min"] = alloc(ps.alloc_min);
    return j;
}

AllocationPlan allocation_from_json(const json& j) {
    AllocationPlan p;
    if (!j.contains("mode") || !j.at("mode").is_string())
        throw BadScenario("allocation: missing mode");
    const std::string m = j.at("mode").get<std::string>();
    if (m == "hard_limits")
        p.mode = LimitMode::HardLimits;
    else if (m == "requests_only")
        p.mode = LimitMode::RequestsOnly;
    else
        throw BadScenario("allocation: unknown mode " + m);
    p.budget_millicores = require_int(j, "budget_millicores");
    if (!j.contains("requests_millicores"))
        throw BadScenario("allocation: missing requests_millicores");
    p.requests_millicores = j.at("requests_millicores").get<std::vector<std::int64_t>>();
    if (j.contains("limits_millicores"))
        p.limits_millicores = j.at("limits_millicores").get<std::vector<std::int64_t>>();
    if (j.contains("fractions"))
        for (const auto& jf : j.at("fractions"))
            p.fractions.push_back(rational_from_json(jf, "fraction"));
    else
        for (const auto r : p.requests_millicores)
            p.fractions.push_back(Rational(r, p.budget_millicores));
    p.validate();
    return p;
}

PhaseSchedule phase_schedule_from_json(const json& j) {
    PhaseSchedule ps;
    ps.t1_usec = require_int(j, "t1_usec");
    ps.t2_usec = require_int(j, "t2_usec");
    for (const auto* key : {"alloc_max", "alloc_mid", "alloc_min"})
        if (!j.contains(key)) throw BadScenario(std::string("phase schedule: missing ") + key);
    ps.alloc_max = allocation_from_json(j.at("alloc_max"));
    ps.alloc_mid = allocation_from_json(j.at("alloc_mid"));
    ps.alloc_min = allocation_from_json(j.at("alloc_min"));
    ps.validate();
    return ps;
}

} // namespace

std::optional<PatchPlan> ScenarioFile::effective_plan() const {
    if (patch_plan) return patch_plan;
    if (phase_schedule) return build_patch_plan(*phase_schedule);
    return std::nullopt;
}

ScenarioFile load_scenario(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw BadScenario(std::string("scenario JSON: ") + e.what());
    }
    ScenarioFile f;
    if (!j.contains("scenario")) throw BadScenario("missing top-level scenario object");
    f.scenario = scenario_from_json(j.at("scenario"));
    if (j.contains("patch_plan")) f.patch_plan = plan_from_json(j.at("patch_plan"));
    if (j.contains("phase_schedule"))
        f.phase_schedule = phase_schedule_from_json(j.at("phase_schedule"));
    f.sync_delay_usec = int_or(j, "sync_delay_usec", kDefaultSyncDelayUsec);
    if (f.sync_delay_usec < 0) throw BadScenario("sync_delay_usec must be >= 0");
    return f;
}

std::string save_scenario(const ScenarioFile& file) {
    json j;
    j["scenario"] = scenario_to_json(file.scenario);
    if (file.patch_plan) j["patch_plan"] = plan_to_json(*file.patch_plan);
    if (file.phase_schedule) j["phase_schedule"] = phase_schedule_to_json(*file.phase_schedule);
    if (file.sync_delay_usec != kDefaultSyncDelayUsec) j["sync_delay_usec"] = file.sync_delay_usec;
    return j.dump(2) + "\n";
}

std::string save_result(const SimResult& result, const ScenarioFile& origin) {
    json j;
    const auto& s = origin.scenario;
    json ctx;
    ctx["mode"] = mode_to_string(s.mode);
    std::int64_t total = 0;
    json reqs = json::array();
    json node_of = json::array();
    for (const auto& r : s.ranks) {
        total += r.cgroup.cpu_weight;
        reqs.push_back(r.cgroup.cpu_weight);
        node_of.push_back(r.node);
    }
    ctx["total_request_millicores"] = total;
    ctx["requests_millicores"] = std::move(reqs);
    ctx["node_of_rank"] = std::move(node_of);
    json nodes = json::array();
    for (const auto& n : s.nodes)
        nodes.push_back({{"capacity_millicores", n.capacity_millicores},
                         {"background_load_millicores", n.background_load_millicores}});
    ctx["nodes"] = std::move(nodes);
    j["context"] = std::move(ctx);

    j["wall_clock_usec"] = result.wall_clock_usec;
    j["iterations_completed"] = result.iterations_completed;
    j["per_iteration_wall_usec"] = result.per_iteration_wall_usec;
    json ranks = json::array();
    for (const auto& r : result.ranks) {
        json jr;
        jr["nr_throttled"] = r.nr_throttled;
        jr["throttled_usec"] = r.throttled_usec;
        jr["cpu_millicore_usec"] = r.cpu_millicore_usec;
        json samples = json::array();
        for (const auto& s2 : r.samples) samples.push_back({s2.time_usec, s2.millicores});
        jr["samples"] = std::move(samples);
        ranks.push_back(std::move(jr));
    }
    j["ranks"] = std::move(ranks);
    json resizes = json::array();
    for (const auto& e : result.resize_events) {
        json je;
        je["rank"] = e.rank;
        je["requested_at_usec"] = e.requested_at_usec;
        je["effective_usec"] = e.effective_usec;
        je["applied_usec"] = e.applied_usec;
        je["status"] = e.status == ResizeOutcome::Status::Applied ? "applied" : "conflict";
        je["new_request_millicores"] = e.new_request_millicores;
        if (!e.detail.empty()) je["detail"] = e.detail;
        resizes.push_back(std::move(je));
    }
    j["resize_events"] = std::move(resizes);
    return j.dump(2) + "\n";
}

SimResult load_result(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw BadScenario(std::string("result JSON: ") + e.what());
    }
    SimResult r;
    r.wall_clock_usec = require_int(j, "wall_clock_usec");
    r.iterations_completed = require_int(j, "iterations_completed");
    if (j.contains("per_iteration_wall_usec"))
        r.per_iteration_wall_usec = j.at("per_iteration_wall_usec").get<std::vector<std::int64_t>>();
    if (!j.contains("ranks") || !j.at("ranks").is_array())
        throw BadScenario("result JSON: missing ranks");
    for (const auto& jr : j.at("ranks")) {
        RankStats st;
        st.nr_throttled = require_int(jr, "nr_throttled");
        st.throttled_usec = require_int(jr, "throttled_usec");
        st.cpu_millicore_usec = require_int(jr, "cpu_millicore_usec");
        if (jr.contains("samples"))
            for (const auto& js : jr.at("samples")) {
                if (!js.is_array() || js.size() != 2)
                    throw BadScenario("result JSON: sample must be [time_usec, millicores]");
                st.samples.push_back({js.at(0).get<std::int64_t>(), js.at(1).get<std::int64_t>()});
            }
        r.ranks.push_back(std::move(st));
    }
    if (j.contains("resize_events"))
        for (const auto& je : j.at("resize_events")) {
            ResizeOutcome e;
            e.rank = static_cast<std::size_t>(require_int(je, "rank"));
            e.requested_at_usec = require_int(je, "requested_at_usec");
            e.effective_usec = require_int(je, "effective_usec");
            e.applied_usec = require_int(je, "applied_usec");
            const std::string st = je.contains("status") ? je.at("status").get<std::string>() : "applied";
            e.status = st == "conflict" ? ResizeOutcome::Status::Conflict : ResizeOutcome::Status::Applied;
            e.new_request_millicores = int_or(je, "new_request_millicores", 0);
            if (je.contains("detail")) e.detail = je.at("detail").get<std::string>();
            r.resize_events.push_back(std::move(e));
        }
    return r;
}

ResultContext load_result_context(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw BadScenario(std::string("result JSON: ") + e.what());
    }
    if (!j.contains("context")) throw BadScenario("result JSON: missing context");
    const json& c = j.at("context");
    ResultContext ctx;
    ctx.mode = c.at("mode").get<std::string>();
    ctx.total_request_millicores = require_int(c, "total_request_millicores");
    ctx.requests_millicores = c.at("requests_millicores").get<std::vector<std::int64_t>>();
    ctx.node_of_rank = c.at("node_of_rank").get<std::vector<int>>();
    for (const auto& jn : c.at("nodes")) {
        NodeSpec n;
        n.capacity_millicores = require_int(jn, "capacity_millicores");
        n.background_load_millicores = int_or(jn, "background_load_millicores", 0);
        ctx.nodes.push_back(n);
    }
    return ctx;
}

std::string save_allocation(const AllocationPlan& plan) {
    json a;
    a["mode"] = plan.mode == LimitMode::HardLimits ? "hard_limits" : "requests_only";
    a["budget_millicores"] = plan.budget_millicores;
    a["requests_millicores"] = plan.requests_millicores;
    if (plan.limits_millicores) a["limits_millicores"] = *plan.limits_millicores;
    json fr = json::array();
    for (const auto& f : plan.fractions) fr.push_back(f.str());
    a["fractions"] = std::move(fr);
    return a.dump(2) + "\n";
}

AllocationPlan load_allocation(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw BadScenario(std::string("allocation JSON: ") + e.what());
    }
    return allocation_from_json(j);
}

PhaseSchedule load_phase_schedule(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw BadScenario(std::string("phase schedule JSON: ") + e.what());
    }
    return phase_schedule_from_json(j);
}

std::string save_patch_plan(const PatchPlan& plan) {
    return plan_to_json(plan).dump(2) + "\n";
}

PatchPlan load_patch_plan(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw BadScenario(std::string("patch plan JSON: ") + e.what());
    }
    return plan_from_json(j);
}

std::string timeline_csv(const SimResult& result) {
    std::ostringstream out;
    out << "time_usec,rank,millicores\n";
    for (std::size_t i = 0; i < result.ranks.size(); ++i)
        for (const auto& s : result.ranks[i].samples)
            out << s.time_usec << ',' << i << ',' << s.millicores << '\n';
    return out.str();
}

std::string throttle_csv(const SimResult& result) {
    std::ostringstream out;
    out << "rank,nr_throttled,throttled_usec,fraction\n";
    for (std::size_t i = 0; i < result.ranks.size(); ++i) {
        const auto& r = result.ranks[i];
        Rational frac(0);
        if (result.wall_clock_usec > 0)
            frac = Rational(r.throttled_usec, result.wall_clock_usec);
        out << i << ',' << r.nr_throttled << ',' << r.throttled_usec << ','
            << frac.decimal(6) << '\n';
    }
    return out.str();
}

std::string patch_script(const PatchPlan& plan, const std::vector<std::string>& pod_names) {
    std::ostringstream out;
    out << "#!/bin/sh\n# generated resize commands, one per target per entry\n";
    for (const auto& e : plan.entries) {
        switch (e.trigger.kind) {
        case PatchTrigger::Kind::AtTime:
            out << "# at t=" << e.trigger.time_usec << "us\n";
            break;
        case PatchTrigger::Kind::AtIteration:
            out << "# at iteration " << e.trigger.iteration << "\n";
            break;
        case PatchTrigger::Kind::AtProgressFraction:
            out << "# at progress " << e.trigger.fraction.str() << "\n";
            break;
        }
        for (std::size_t k = 0; k < e.targets.size(); ++k) {
            const std::size_t rank = e.targets[k];
            const std::string name = rank < pod_names.size()
                                         ? pod_names[rank]
                                         : "rank-" + std::to_string(rank);
            out << "kubectl patch pod " << name << " --subresource resize --patch "
                << "'{\"spec\":{\"containers\":[{\"name\":\"" << name
                << "\",\"resources\":{\"requests\":{\"cpu\":\""
                << e.new_requests_millicores[k] << "m\"}";
            if (e.new_limits_millicores)
                out << ",\"limits\":{\"cpu\":\"" << (*e.new_limits_millicores)[k] << "m\"}";
            out << "}}]}}'\n";
        }
    }
    return out.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write file: " + path);
    out << content;
}

} // namespace ranksched
