#pragma once

#include "fairalloc/harness.hpp"

#include <json.hpp>

#include <string>

namespace fairalloc {

// All emitters render money at 2 decimals, allocation factors and average
// prices at 4, divergence in scientific notation — fixed field order, no
// environment-dependent bytes, so identical inputs give identical files.

nlohmann::ordered_json config_to_json(const RunConfig& config);

// Single-method report: terminal summary, per-fill allocations, q trail.
nlohmann::ordered_json run_to_json(const MethodRow& row, std::span<const Fill> fills,
                                   const AccountBook& book, const RunConfig& config);

// Per-fill trajectory table: fund and per-account part/position/cumulative
// P&L columns, one row per fill.
std::string run_to_csv(const MethodRow& row, std::span<const Fill> fills, const AccountBook& book);

nlohmann::ordered_json comparison_to_json(const ComparisonReport& report,
                                          std::span<const Fill> fills, const AccountBook& book);

// One row per method: fund position and P&L, then per-account position and
// P&L pairs.
std::string comparison_to_csv(const ComparisonReport& report, const AccountBook& book);

// path "" or "-" writes to stdout. Throws on unwritable paths.
void write_text(const std::string& path, const std::string& text);

}  // namespace fairalloc
