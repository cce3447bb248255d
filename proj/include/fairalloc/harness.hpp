#pragma once

#include "fairalloc/config.hpp"
#include "fairalloc/methods.hpp"

#include <span>
#include <string>
#include <vector>

namespace fairalloc {

// A finished method run plus its divergence trail: q after every fill,
// computed from the allocation's positions at actual fill prices.
struct MethodRow {
    std::string label;
    MethodResult result;
    std::vector<Rational> q_trajectory;
    Rational terminal_q;
};

std::vector<Rational> divergence_trajectory(std::span<const Fill> fills,
                                            std::span<const AllocationVector> allocations,
                                            const AccountBook& book);

// Dispatch by method name (simple | hpha | aps | four). Unknown names throw.
MethodRow run_method(const std::string& name, std::span<const Fill> fills, const AccountBook& book,
                     const RunConfig& config);

// Reorders parsed allocation rows to match the blotter one-to-one. Rejects
// seqs missing from either side; origin names the file in errors.
std::vector<AllocationVector> align_allocations(std::span<const Fill> fills,
                                                std::span<const AllocationVector> rows,
                                                const std::string& origin);

struct ReplayInput {
    std::string label;
    std::vector<AllocationVector> allocations;  // already aligned to the blotter
};

struct ComparisonReport {
    std::vector<MethodRow> rows;  // simple, hpha, aps, four, then any replays
    RunConfig config;
};

ComparisonReport compare(std::span<const Fill> fills, const AccountBook& book,
                         const RunConfig& config, std::span<const ReplayInput> replays = {});

}  // namespace fairalloc
