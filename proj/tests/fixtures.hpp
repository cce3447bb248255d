#pragma once

#include "fairalloc/core.hpp"

#include <vector>

// Shared two-account worked example used across the test suite: eight fills
// over two days, a 90/10 AUM split, and the hand-checked ledgers that go with
// them. Prices are minor units (cents).
namespace testdata {

inline std::vector<fairalloc::Fill> sample_fills() {
    return {
        {1, 1, 10000, 8},  {2, 1, 13000, 2},  {3, 1, 15000, -4}, {4, 1, 14000, -10},
        {5, 2, 11000, -4}, {6, 2, 11500, -4}, {7, 2, 11000, -4}, {8, 2, 8000, 16},
    };
}

inline fairalloc::AccountBook sample_book() {
    return fairalloc::AccountBook({{"A1", 9000000}, {"A2", 1000000}});
}

// Build one allocation vector per fill from parallel part lists.
inline std::vector<fairalloc::AllocationVector> make_allocations(
    const std::vector<fairalloc::Fill>& fills,
    const std::vector<std::vector<fairalloc::Qty>>& parts) {
    std::vector<fairalloc::AllocationVector> out;
    out.reserve(fills.size());
    for (std::size_t i = 0; i < fills.size(); ++i) out.push_back({fills[i].seq, parts[i]});
    return out;
}

}  // namespace testdata
