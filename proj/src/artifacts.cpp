#include "ranksched/artifacts.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "ranksched/errors.hpp"

namespace ranksched {

namespace {

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    return lines;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

} // namespace

std::string format_millicores(std::int64_t millicores) {
    if (millicores < 0) throw ValidationError("negative millicores");
    return std::to_string(millicores) + "m";
}

std::int64_t parse_millicores(const std::string& text) {
    if (text.size() < 2 || text.back() != 'm')
        throw ValidationError("millicore value must look like '182m', got '" + text + "'");
    std::string digits = text.substr(0, text.size() - 1);
    for (char c : digits)
        if (c < '0' || c > '9')
            throw ValidationError("millicore value must be a whole number, got '" + text + "'");
    return std::stoll(digits);
}

std::string emit_manifest(const AllocationPlan& plan, const std::vector<std::string>& pod_names) {
    plan.validate();
    if (pod_names.size() != plan.size())
        throw ValidationError("need one pod name per rank");
    std::ostringstream out;
    for (std::size_t i = 0; i < plan.size(); ++i) {
        if (i > 0) out << "---\n";
        out << "pod: " << pod_names[i] << "\n";
        out << "rank: " << i << "\n";
        out << "resources:\n";
        out << "  requests:\n";
        out << "    cpu: " << format_millicores(plan.requests_millicores[i]) << "\n";
        if (plan.limits_millicores) {
            out << "  limits:\n";
            out << "    cpu: " << format_millicores((*plan.limits_millicores)[i]) << "\n";
        }
        out << "resizePolicy:\n";
        out << "  - resourceName: cpu\n";
        out << "    restartPolicy: NotRequired\n";
        out << "  - resourceName: memory\n";
        out << "    restartPolicy: RestartContainer\n";
    }
    return out.str();
}

ParsedManifests parse_manifest(const std::string& text) {
    ParsedManifests result;
    std::vector<std::int64_t> requests, limits;
    bool any_limit = false;

    std::string pod;
    bool have_rank = false;
    std::int64_t rank = -1;
    std::optional<std::int64_t> request, limit;
    enum class Section { None, Requests, Limits } section = Section::None;

    auto flush = [&]() {
        if (pod.empty() && !have_rank && !request) return;
        if (pod.empty() || !have_rank || !request)
            throw ValidationError("manifest document missing pod, rank or cpu request");
        if (rank != static_cast<std::int64_t>(requests.size()))
            throw ValidationError("manifest ranks must appear in order starting at 0");
        result.pod_names.push_back(pod);
        requests.push_back(*request);
        if (limit) {
            any_limit = true;
            limits.push_back(*limit);
        }
        pod.clear();
        have_rank = false;
        request.reset();
        limit.reset();
        section = Section::None;
    };

    for (const auto& raw : split_lines(text)) {
        std::string line = trim(raw);
        if (line == "---") {
            flush();
            continue;
        }
        if (line.rfind("pod:", 0) == 0) {
            pod = trim(line.substr(4));
        } else if (line.rfind("rank:", 0) == 0) {
            rank = std::stoll(trim(line.substr(5)));
            have_rank = true;
        } else if (line == "requests:") {
            section = Section::Requests;
        } else if (line == "limits:") {
            section = Section::Limits;
        } else if (line.rfind("cpu:", 0) == 0) {
            std::int64_t v = parse_millicores(trim(line.substr(4)));
            if (section == Section::Requests)
                request = v;
            else if (section == Section::Limits)
                limit = v;
            else
                throw ValidationError("cpu value outside requests/limits section");
        }
    }
    flush();

    if (requests.empty()) throw ValidationError("manifest text contains no pod documents");
    if (any_limit && limits.size() != requests.size())
        throw ValidationError("some documents carry limits and some do not");

    AllocationPlan& plan = result.plan;
    plan.mode = any_limit ? LimitMode::HardLimits : LimitMode::RequestsOnly;
    plan.requests_millicores = requests;
    if (any_limit) plan.limits_millicores = limits;
    plan.budget_millicores = 0;
    for (auto r : requests) plan.budget_millicores += r;
    for (auto r : requests)
        plan.fractions.push_back(Rational(r, plan.budget_millicores));
    plan.validate();
    return result;
}

std::string emit_processor_weights(const WeightVector& weights) {
    weights.validate();
    // scale to the smallest integer vector with the same ratios
    std::int64_t lcm = 1;
    for (const auto& w : weights.weights) {
        std::int64_t d = w.den();
        std::int64_t g = std::gcd(lcm, d);
        lcm = lcm / g * d;
    }
    std::vector<std::int64_t> ints;
    std::int64_t g = 0;
    for (const auto& w : weights.weights) {
        std::int64_t v = w.num() * (lcm / w.den());
        ints.push_back(v);
        g = std::gcd(g, v);
    }
    std::ostringstream out;
    out << "processorWeights (";
    for (auto v : ints) out << " " << v / g;
    out << " );\n";
    return out.str();
}

std::string emit_decomposition_report(const DecompositionReport& report) {
    std::ostringstream out;
    out << "rank,cells\n";
    for (std::size_t i = 0; i < report.cells_per_rank.size(); ++i)
        out << i << "," << report.cells_per_rank[i] << "\n";
    return out.str();
}

IngestedReport ingest_decomposition_report(const std::string& csv_text) {
    std::vector<std::pair<std::int64_t, std::int64_t>> rows;
    for (const auto& raw : split_lines(csv_text)) {
        std::string line = trim(raw);
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw MalformedReport("expected 'rank,cells', got '" + line + "'");
        std::string a = trim(line.substr(0, comma));
        std::string b = trim(line.substr(comma + 1));
        if (a == "rank" && b == "cells") continue; // header
        for (const auto& field : {a, b}) {
            if (field.empty()) throw MalformedReport("empty field in '" + line + "'");
            for (char c : field)
                if (c < '0' || c > '9')
                    throw MalformedReport("non-numeric field in '" + line + "'");
        }
        rows.emplace_back(std::stoll(a), std::stoll(b));
    }
    if (rows.empty()) throw MalformedReport("report has no rows");

    std::sort(rows.begin(), rows.end());
    IngestedReport out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto [rank, cells] = rows[i];
        if (i > 0 && rank == rows[i - 1].first)
            throw MalformedReport("rank " + std::to_string(rank) + " appears twice");
        if (rank != static_cast<std::int64_t>(i))
            throw RankGap("ranks must cover 0.." + std::to_string(rows.size() - 1) +
                          "; missing rank " + std::to_string(i));
        if (cells < 1) throw MalformedReport("rank " + std::to_string(rank) + " has no cells");
        out.report.cells_per_rank.push_back(cells);
        out.report.total_cells += cells;
    }
    std::int64_t g = 0;
    for (auto c : out.report.cells_per_rank) g = std::gcd(g, c);
    for (auto c : out.report.cells_per_rank) out.weights.weights.push_back(Rational(c / g));
    return out;
}

} // namespace ranksched
