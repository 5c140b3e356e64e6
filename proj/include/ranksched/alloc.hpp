#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ranksched/rational.hpp"

namespace ranksched {

// Per-rank share weights. Positive, exact; scale does not matter.
struct WeightVector {
    std::vector<Rational> weights;

    std::size_t size() const { return weights.size(); }
    void validate() const;
};

enum class LimitMode {
    HardLimits,   // limits == requests (Guaranteed-style pods)
    RequestsOnly, // no limits (Burstable-style pods)
};

struct AllocationPlan {
    LimitMode mode = LimitMode::RequestsOnly;
    std::int64_t budget_millicores = 0;
    std::vector<std::int64_t> requests_millicores;
    // Present iff mode == HardLimits, elementwise equal to requests.
    std::optional<std::vector<std::int64_t>> limits_millicores;
    // Exact load fractions the requests were derived from; sums to 1.
    std::vector<Rational> fractions;

    std::size_t size() const { return requests_millicores.size(); }
    void validate() const;
};

struct CellApportionment {
    std::int64_t total_cells = 0;
    std::vector<std::int64_t> cells_per_rank;
};

// f_i = w_i / sum(w). Exact; the result sums to exactly 1.
std::vector<Rational> cell_fractions(const WeightVector& weights);

// Largest-remainder apportionment of `total` indivisible units across
// `fractions` (which must sum to 1). Ties in remainders go to the lowest
// index. Every output is within 1 of fraction*total and the outputs sum to
// exactly `total`.
std::vector<std::int64_t> apportion_exact(const std::vector<Rational>& fractions,
                                          std::int64_t total);

CellApportionment apportion_cells(const WeightVector& weights, std::int64_t total_cells);

// Splits a millicore budget across ranks proportionally to the weights.
// Throws BudgetTooSmall if any rank would land below 1 millicore.
AllocationPlan allocate_cpu(const WeightVector& weights, std::int64_t budget_millicores,
                            LimitMode mode);

} // namespace ranksched
