#include <doctest.h>

#include <random>

#include "ranksched/alloc.hpp"
#include "ranksched/artifacts.hpp"
#include "ranksched/errors.hpp"

using namespace ranksched;

TEST_CASE("millicore formatting and parsing invert each other") {
    CHECK(format_millicores(182) == "182m");
    CHECK(format_millicores(0) == "0m");
    CHECK(parse_millicores("2727m") == 2727);

    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<std::int64_t> mc(1, 1000000);
    for (int i = 0; i < 500; ++i) {
        std::int64_t v = mc(rng);
        CHECK(parse_millicores(format_millicores(v)) == v);
    }

    CHECK_THROWS_AS(parse_millicores(""), ValidationError);
    CHECK_THROWS_AS(parse_millicores("m"), ValidationError);
    CHECK_THROWS_AS(parse_millicores("182"), ValidationError);
    CHECK_THROWS_AS(parse_millicores("1.5m"), ValidationError);
    CHECK_THROWS_AS(parse_millicores("-5m"), ValidationError);
    CHECK_THROWS_AS(parse_millicores("18m2"), ValidationError);
    CHECK_THROWS_AS(format_millicores(-1), ValidationError);
}

namespace {

AllocationPlan paper_plan(LimitMode mode) {
    WeightVector w;
    for (int v : {1, 1, 5, 15}) w.weights.emplace_back(v);
    return allocate_cpu(w, 4000, mode);
}

} // namespace

TEST_CASE("manifest text lists every rank with requests and resize policy") {
    auto plan = paper_plan(LimitMode::HardLimits);
    auto text = emit_manifest(plan, {"solver-0", "solver-1", "solver-2", "solver-3"});

    const std::string expected_head =
        "pod: solver-0\n"
        "rank: 0\n"
        "resources:\n"
        "  requests:\n"
        "    cpu: 182m\n"
        "  limits:\n"
        "    cpu: 182m\n"
        "resizePolicy:\n"
        "  - resourceName: cpu\n"
        "    restartPolicy: NotRequired\n"
        "  - resourceName: memory\n"
        "    restartPolicy: RestartContainer\n";
    CHECK(text.rfind(expected_head, 0) == 0);
    CHECK(text.find("cpu: 2727m") != std::string::npos);
    // three separators for four documents
    std::size_t seps = 0, pos = 0;
    while ((pos = text.find("---\n", pos)) != std::string::npos) {
        ++seps;
        pos += 4;
    }
    CHECK(seps == 3);
}

TEST_CASE("requests-only manifests omit the limits block") {
    auto plan = paper_plan(LimitMode::RequestsOnly);
    auto text = emit_manifest(plan, {"a", "b", "c", "d"});
    CHECK(text.find("limits:") == std::string::npos);
    CHECK(text.find("requests:") != std::string::npos);
}

TEST_CASE("manifest round-trip preserves the operative fields") {
    for (auto mode : {LimitMode::HardLimits, LimitMode::RequestsOnly}) {
        auto plan = paper_plan(mode);
        std::vector<std::string> names = {"w-0", "w-1", "w-2", "w-3"};
        auto parsed = parse_manifest(emit_manifest(plan, names));
        CHECK(parsed.pod_names == names);
        CHECK(parsed.plan.mode == plan.mode);
        CHECK(parsed.plan.budget_millicores == plan.budget_millicores);
        CHECK(parsed.plan.requests_millicores == plan.requests_millicores);
        if (mode == LimitMode::HardLimits) {
            REQUIRE(parsed.plan.limits_millicores.has_value());
            CHECK(*parsed.plan.limits_millicores == *plan.limits_millicores);
        } else {
            CHECK_FALSE(parsed.plan.limits_millicores.has_value());
        }
        // fractions come back as request over total
        CHECK(parsed.plan.fractions[3] == Rational(2727, 4000));
    }
}

TEST_CASE("manifest parsing rejects broken documents") {
    auto plan = paper_plan(LimitMode::HardLimits);
    auto good = emit_manifest(plan, {"a", "b", "c", "d"});

    CHECK_THROWS_AS(parse_manifest(""), ValidationError);
    CHECK_THROWS_AS(parse_manifest("pod: x\nrank: 0\n"), ValidationError); // no request

    // ranks out of order
    std::string swapped = good;
    swapped.replace(swapped.find("rank: 0"), 7, "rank: 9");
    CHECK_THROWS_AS(parse_manifest(swapped), ValidationError);

    // one document drops its limit
    std::string mixed = good;
    auto lim = mixed.find("  limits:\n    cpu: 182m\n");
    mixed.erase(lim, std::string("  limits:\n    cpu: 182m\n").size());
    CHECK_THROWS_AS(parse_manifest(mixed), ValidationError);

    CHECK_THROWS_AS(parse_manifest("pod: x\nrank: 0\ncpu: 100m\n"), ValidationError);
}

TEST_CASE("weight fragments are reduced integer ratios") {
    WeightVector w;
    for (int v : {1, 1, 5, 15}) w.weights.emplace_back(v);
    CHECK(emit_processor_weights(w) == "processorWeights ( 1 1 5 15 );\n");

    WeightVector scaled;
    for (int v : {2, 2, 10, 30}) scaled.weights.emplace_back(v);
    CHECK(emit_processor_weights(scaled) == "processorWeights ( 1 1 5 15 );\n");

    WeightVector halves;
    for (int v : {1, 1, 5, 15}) halves.weights.emplace_back(v, 2);
    CHECK(emit_processor_weights(halves) == "processorWeights ( 1 1 5 15 );\n");

    WeightVector mixed;
    mixed.weights.emplace_back(1, 3);
    mixed.weights.emplace_back(1, 6);
    CHECK(emit_processor_weights(mixed) == "processorWeights ( 2 1 );\n");

    WeightVector cells;
    for (int v : {6480, 4860, 3240, 1620}) cells.weights.emplace_back(v);
    CHECK(emit_processor_weights(cells) == "processorWeights ( 4 3 2 1 );\n");
}

TEST_CASE("decomposition reports round-trip") {
    DecompositionReport rep;
    rep.cells_per_rank = {3057, 3056, 3056, 3056};
    rep.total_cells = 12225;
    auto csv = emit_decomposition_report(rep);
    CHECK(csv == "rank,cells\n0,3057\n1,3056\n2,3056\n3,3056\n");

    auto in = ingest_decomposition_report(csv);
    CHECK(in.report.cells_per_rank == rep.cells_per_rank);
    CHECK(in.report.total_cells == 12225);
    REQUIRE(in.weights.weights.size() == 4);
    CHECK(in.weights.weights[0] == Rational(3057)); // gcd is 1 here
}

TEST_CASE("report rows may arrive in any order") {
    auto in = ingest_decomposition_report("2,30\n0,10\n1,20\n");
    CHECK(in.report.cells_per_rank == std::vector<std::int64_t>{10, 20, 30});
    CHECK(in.weights.weights[0] == Rational(1));
    CHECK(in.weights.weights[2] == Rational(3));
}

TEST_CASE("header and whitespace are tolerated") {
    auto in = ingest_decomposition_report("rank,cells\n 0 , 6480 \n\n1,1620\n");
    CHECK(in.report.cells_per_rank == std::vector<std::int64_t>{6480, 1620});
    CHECK(in.weights.weights[0] == Rational(4));
    CHECK(in.weights.weights[1] == Rational(1));
}

TEST_CASE("gaps and malformed rows are distinct failures") {
    CHECK_THROWS_AS(ingest_decomposition_report("0,5\n2,5\n"), RankGap);
    CHECK_THROWS_AS(ingest_decomposition_report("1,5\n2,5\n"), RankGap);
    CHECK_THROWS_AS(ingest_decomposition_report("0,5\n0,6\n"), MalformedReport);
    CHECK_THROWS_AS(ingest_decomposition_report("0,abc\n"), MalformedReport);
    CHECK_THROWS_AS(ingest_decomposition_report("0,-3\n"), MalformedReport);
    CHECK_THROWS_AS(ingest_decomposition_report("0,0\n"), MalformedReport);
    CHECK_THROWS_AS(ingest_decomposition_report("just text\n"), MalformedReport);
    CHECK_THROWS_AS(ingest_decomposition_report(""), MalformedReport);
    CHECK_THROWS_AS(ingest_decomposition_report("rank,cells\n"), MalformedReport);
}

TEST_CASE("ingested weights feed straight into apportionment") {
    auto in = ingest_decomposition_report("0,1149\n1,5744\n2,17233\n");
    auto plan = allocate_cpu(in.weights, 24126, LimitMode::RequestsOnly);
    // weights equal cells here (gcd 1), so requests track cells exactly
    CHECK(plan.requests_millicores == std::vector<std::int64_t>{1149, 5744, 17233});
}
