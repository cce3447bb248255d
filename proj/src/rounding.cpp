#include "fairalloc/rounding.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace fairalloc {

FractionalTargets fractional_targets(Qty quantity, const AccountBook& book, int day) {
    FractionalTargets out;
    out.quantity = quantity;
    out.day = day;
    out.targets.reserve(book.size());
    for (std::size_t i = 0; i < book.size(); ++i) {
        out.targets.push_back(book.alpha(i) * quantity);
    }
    return out;
}

ResidualPolicy::ResidualPolicy(Kind kind, int cycle, std::uint64_t seed)
    : kind_(kind), cycle_(cycle), seed_(seed), rng_(seed) {}

ResidualPolicy ResidualPolicy::largest_account() {
    return ResidualPolicy(Kind::LargestAccount, 0, 0);
}

ResidualPolicy ResidualPolicy::rotation(int cycle) {
    if (cycle < 0) {
        throw std::invalid_argument("rotation cycle must be non-negative");
    }
    return ResidualPolicy(Kind::Rotation, cycle, 0);
}

ResidualPolicy ResidualPolicy::random(std::uint64_t seed) {
    return ResidualPolicy(Kind::Random, 0, seed);
}

namespace {

// Indices sorted by AUM descending; equal AUM keeps input order so the result
// is stable across runs.
std::vector<std::size_t> by_aum_desc(const AccountBook& book) {
    std::vector<std::size_t> order(book.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return book.at(a).aum > book.at(b).aum;
    });
    return order;
}

}  // namespace

std::vector<std::size_t> ResidualPolicy::preference(const AccountBook& book, int day) {
    const std::uint64_t invocation = invocations_++;
    switch (kind_) {
        case Kind::LargestAccount:
            return by_aum_desc(book);
        case Kind::Rotation: {
            if (cycle_ == 0) {
                // Advance the starting account whenever the context day moves.
                if (invocation == 0) {
                    last_day_ = day;
                } else if (day != last_day_) {
                    last_day_ = day;
                    ++offset_;
                }
            } else {
                offset_ = invocation / static_cast<std::uint64_t>(cycle_);
            }
            std::vector<std::size_t> order = by_aum_desc(book);
            std::rotate(order.begin(), order.begin() + (offset_ % order.size()), order.end());
            return order;
        }
        case Kind::Random:
            return rng_.permutation(book.size());
    }
    throw std::logic_error("unreachable residual policy kind");
}

std::vector<Qty> round_sum_preserving(const FractionalTargets& targets, const AccountBook& book,
                                      ResidualPolicy& policy) {
    const std::size_t n = targets.targets.size();
    if (n != book.size()) {
        throw std::invalid_argument("target count does not match account count");
    }

    std::vector<Qty> parts(n);
    BigInt rounded_sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const BigInt r = round_half_away(targets.targets[i]);
        parts[i] = static_cast<Qty>(r);
        rounded_sum += r;
    }

    // Residual units to distribute: positive means the parts fell short of the
    // quantity and some accounts must take one more unit in the fill's
    // direction; negative means one fewer.
    BigInt deficit = BigInt(targets.quantity) - rounded_sum;
    if (deficit == 0) {
        return parts;
    }

    const int step = deficit > 0 ? 1 : -1;
    // Moving with the fill direction is an adjustment "toward" the trade;
    // favored accounts take those first. Moving against it, the least favored
    // account gives up a unit first.
    const bool with_fill = (targets.quantity > 0) == (step > 0);
    std::vector<std::size_t> order = policy.preference(book, targets.day);
    if (!with_fill) {
        std::reverse(order.begin(), order.end());
    }

    // Rank candidates by how cheap the adjustment is: the account whose target
    // residual most favors the step moves first. Stable sort keeps the policy
    // order among exact ties.
    std::vector<std::size_t> candidates(order);
    std::stable_sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
        // Cost of stepping account i is |target - (part + step)| - |target - part|,
        // monotone in (part - target) * step; smaller is better.
        const Rational da = (Rational(parts[a]) - targets.targets[a]) * step;
        const Rational db = (Rational(parts[b]) - targets.targets[b]) * step;
        return da < db;
    });

    BigInt remaining = deficit > 0 ? deficit : -deficit;
    for (std::size_t idx = 0; remaining > 0; idx = (idx + 1) % candidates.size()) {
        const std::size_t i = candidates[idx];
        const Qty next = parts[i] + step;
        // Never push a part across zero: sign admissibility requires every
        // part to trade with the fill or stay flat.
        const bool crosses = (targets.quantity > 0 && next < 0) || (targets.quantity < 0 && next > 0);
        if (crosses) {
            continue;
        }
        parts[i] = next;
        --remaining;
    }
    return parts;
}

AllocationVector allocate_fill_proportional(const Fill& fill, const AccountBook& book,
                                            ResidualPolicy& policy) {
    AllocationVector alloc;
    alloc.fill_seq = fill.seq;
    FractionalTargets targets = fractional_targets(fill.qty, book, fill.day);
    alloc.parts = round_sum_preserving(targets, book, policy);
    validate_allocation(fill, alloc, book.size());
    return alloc;
}

}  // namespace fairalloc
