#pragma once

#include "fairalloc/core.hpp"
#include "fairalloc/rng.hpp"

#include <vector>

namespace fairalloc {

// Exact proportional targets alpha_i * quantity for one fill or day-batch
// side. Sum of targets equals the quantity exactly.
struct FractionalTargets {
    Qty quantity = 0;
    int day = 0;  // context for day-cycled policies; 0 when not applicable
    std::vector<Rational> targets;
};

FractionalTargets fractional_targets(Qty quantity, const AccountBook& book, int day = 0);

// Decides which accounts absorb the +-1 residual adjustments that preserve
// the sum. All variants are deterministic given their configuration.
class ResidualPolicy {
public:
    enum class Kind { LargestAccount, Rotation, Random };

    static ResidualPolicy largest_account();
    // cycle 0 rotates when the context day changes (daily, the default);
    // cycle L > 0 rotates every L invocations.
    static ResidualPolicy rotation(int cycle = 0);
    static ResidualPolicy random(std::uint64_t seed);

    // Preference order for residual units, favored account first. Advances the
    // invocation counter exactly once.
    std::vector<std::size_t> preference(const AccountBook& book, int day);

    Kind kind() const { return kind_; }
    int cycle() const { return cycle_; }
    std::uint64_t seed() const { return seed_; }
    std::uint64_t invocations() const { return invocations_; }

private:
    ResidualPolicy(Kind kind, int cycle, std::uint64_t seed);

    Kind kind_;
    int cycle_;
    std::uint64_t seed_;
    std::uint64_t invocations_ = 0;
    std::uint64_t offset_ = 0;
    int last_day_ = 0;
    Rng rng_;
};

// Nearest integer per component (half away from zero), then a largest-remainder
// fixup so the parts sum to the quantity. No component crosses zero, so the
// result is sign-admissible; every part stays within 1 of its target.
std::vector<Qty> round_sum_preserving(const FractionalTargets& targets, const AccountBook& book,
                                      ResidualPolicy& policy);

AllocationVector allocate_fill_proportional(const Fill& fill, const AccountBook& book,
                                            ResidualPolicy& policy);

}  // namespace fairalloc
