#include "ranksched/alloc.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "ranksched/errors.hpp"

namespace ranksched {

void WeightVector::validate() const {
    if (weights.empty()) throw ValidationError("weight vector is empty");
    for (std::size_t i = 0; i < weights.size(); ++i)
        if (weights[i] <= Rational(0))
            throw ValidationError("weight " + std::to_string(i) + " is not positive");
}

void AllocationPlan::validate() const {
    if (requests_millicores.empty()) throw ValidationError("allocation plan has no ranks");
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < requests_millicores.size(); ++i) {
        if (requests_millicores[i] < 1)
            throw ValidationError("request for rank " + std::to_string(i) + " is below 1m");
        sum += requests_millicores[i];
    }
    if (sum != budget_millicores)
        throw ValidationError("requests sum to " + std::to_string(sum) + "m, budget is " +
                              std::to_string(budget_millicores) + "m");
    if (mode == LimitMode::HardLimits) {
        if (!limits_millicores || *limits_millicores != requests_millicores)
            throw ValidationError("hard-limits plan must carry limits equal to requests");
    } else if (limits_millicores) {
        throw ValidationError("requests-only plan must not carry limits");
    }
    if (fractions.size() != requests_millicores.size())
        throw ValidationError("fraction count does not match rank count");
}

std::vector<Rational> cell_fractions(const WeightVector& weights) {
    weights.validate();
    Rational sum(0);
    for (const auto& w : weights.weights) sum += w;
    std::vector<Rational> out;
    out.reserve(weights.size());
    for (const auto& w : weights.weights) out.push_back(w / sum);
    return out;
}

std::vector<std::int64_t> apportion_exact(const std::vector<Rational>& fractions,
                                          std::int64_t total) {
    if (fractions.empty()) throw ValidationError("no fractions to apportion over");
    if (total < 0) throw ValidationError("apportionment total is negative");
    Rational fsum(0);
    for (const auto& f : fractions) {
        if (f < Rational(0)) throw ValidationError("negative fraction");
        fsum += f;
    }
    if (fsum != Rational(1)) throw ValidationError("fractions do not sum to 1");

    const std::size_t n = fractions.size();
    std::vector<std::int64_t> out(n);
    std::vector<Rational> remainder(n);
    std::int64_t assigned = 0;
    for (std::size_t i = 0; i < n; ++i) {
        Rational target = fractions[i] * Rational(total);
        out[i] = target.floor();
        remainder[i] = target - Rational(out[i]);
        assigned += out[i];
    }
    std::int64_t leftover = total - assigned;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (remainder[a] != remainder[b]) return remainder[b] < remainder[a];
        return a < b;
    });
    for (std::int64_t k = 0; k < leftover; ++k) out[order[static_cast<std::size_t>(k)]] += 1;
    return out;
}

CellApportionment apportion_cells(const WeightVector& weights, std::int64_t total_cells) {
    if (total_cells < 1) throw ValidationError("total cell count must be positive");
    CellApportionment a;
    a.total_cells = total_cells;
    a.cells_per_rank = apportion_exact(cell_fractions(weights), total_cells);
    return a;
}

AllocationPlan allocate_cpu(const WeightVector& weights, std::int64_t budget_millicores,
                            LimitMode mode) {
    if (budget_millicores < 1) throw BudgetTooSmall("budget below 1 millicore");
    AllocationPlan plan;
    plan.mode = mode;
    plan.budget_millicores = budget_millicores;
    plan.fractions = cell_fractions(weights);
    plan.requests_millicores = apportion_exact(plan.fractions, budget_millicores);
    for (std::size_t i = 0; i < plan.requests_millicores.size(); ++i) {
        if (plan.requests_millicores[i] < 1)
            throw BudgetTooSmall("budget " + std::to_string(budget_millicores) +
                                 "m leaves rank " + std::to_string(i) + " below 1m");
    }
    if (mode == LimitMode::HardLimits) plan.limits_millicores = plan.requests_millicores;
    plan.validate();
    return plan;
}

} // namespace ranksched
