#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ranksched/alloc.hpp"

namespace ranksched {

// "182m" <-> 182. Parsing accepts exactly what formatting produces.
std::string format_millicores(std::int64_t millicores);
std::int64_t parse_millicores(const std::string& text);

// Multi-document pod manifest text for a plan, one document per rank, in
// rank order. Requests always present; limits only for hard-limits plans.
// Every document carries the in-place resize policy: cpu NotRequired,
// memory RestartContainer.
std::string emit_manifest(const AllocationPlan& plan, const std::vector<std::string>& pod_names);

struct ParsedManifests {
    AllocationPlan plan; // fractions reconstructed as request/budget
    std::vector<std::string> pod_names;
};

ParsedManifests parse_manifest(const std::string& text);

// Decomposition weight fragment, e.g.
//   processorWeights ( 1 1 5 15 );
// Rational weights are rendered as the smallest integer vector with the
// same ratios, so values stay exact.
std::string emit_processor_weights(const WeightVector& weights);

struct DecompositionReport {
    std::vector<std::int64_t> cells_per_rank;
    std::int64_t total_cells = 0;
};

struct IngestedReport {
    DecompositionReport report;
    WeightVector weights; // cells divided by their gcd
};

// Parses "rank,cells" CSV (header optional, any rank order). Ranks must
// cover 0..N-1 exactly; gaps raise RankGap, anything else malformed raises
// MalformedReport.
IngestedReport ingest_decomposition_report(const std::string& csv_text);

std::string emit_decomposition_report(const DecompositionReport& report);

} // namespace ranksched
